// End-to-end CLI checks: spawns the built binary against the sample data
// files and inspects exit codes and report payloads.

#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "zerorate/io.hpp"

#ifndef ZR_CLI_PATH
#error "ZR_CLI_PATH must be defined"
#endif
#ifndef ZR_DATA_DIR
#error "ZR_DATA_DIR must be defined"
#endif

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  std::string cmd = std::string(ZR_CLI_PATH) + " " + args + " 2>/dev/null";
  RunResult res;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf;
  while (std::size_t got = fread(buf.data(), 1, buf.size(), pipe)) res.out.append(buf.data(), got);
  int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

std::string data(const std::string& name) { return std::string(ZR_DATA_DIR) + "/" + name; }

}  // namespace

TEST_CASE("channel validate") {
  RunResult r = run_cli("channel validate --channel " + data("bsc01.json"));
  CHECK(r.exit_code == 0);
  auto j = zerorate::Json::parse(r.out);
  CHECK(j.at("input_size") == 2);
  CHECK(j.at("valid") == true);
}

TEST_CASE("missing file exits 1") {
  CHECK(run_cli("channel validate --channel /no/such/file.json").exit_code == 1);
  CHECK(run_cli("decode exact --channel " + data("bsc01.json") +
                " --code /no/such/code.txt --list-size 1")
            .exit_code == 1);
}

TEST_CASE("zero-rate exponent via CLI") {
  RunResult r = run_cli("exponent zero-rate --channel " + data("bsc01.json") +
                        " --list-size 1");
  REQUIRE(r.exit_code == 0);
  auto j = zerorate::Json::parse(r.out);
  CHECK(std::abs(j.at("value_nats").get<double>() - 0.25541281188299536) < 1e-6);
  CHECK(std::abs(j.at("argmax")[0].get<double>() - 0.5) < 1e-4);
}

TEST_CASE("dmin via CLI") {
  RunResult r = run_cli("code dmin --channel " + data("bsc01.json") + " --code " +
                        data("pair16.txt") + " --list-size 1");
  REQUIRE(r.exit_code == 0);
  auto j = zerorate::Json::parse(r.out);
  CHECK(std::abs(j.at("value_nats").get<double>() - 0.51082562376599072) < 1e-8);
  CHECK(j.at("witness_subset") == zerorate::Json::array({0, 1}));
}

TEST_CASE("decode exact via CLI, both methods agree") {
  std::string base = "decode exact --channel " + data("bsc01.json") + " --code " +
                     data("pair16.txt") + " --list-size 1";
  RunResult direct = run_cli(base + " --method direct");
  RunResult types = run_cli(base + " --method types");
  REQUIRE(direct.exit_code == 0);
  REQUIRE(types.exit_code == 0);
  auto jd = zerorate::Json::parse(direct.out);
  auto jt = zerorate::Json::parse(types.out);
  CHECK(std::abs(jd.at("average").get<double>() - jt.at("average").get<double>()) < 1e-12);

  RunResult csv = run_cli(base + " --format csv");
  CHECK(csv.out.rfind("m,P_e_m\n", 0) == 0);
}

TEST_CASE("size guard exits 2") {
  // |Y|^n for the n = 30 pair exceeds the default guard
  RunResult r = run_cli("decode exact --channel " + data("bsc01.json") + " --code " +
                        data("pair30.txt") + " --list-size 1");
  CHECK(r.exit_code == 2);
}

TEST_CASE("bound verify via CLI") {
  RunResult r = run_cli("bound verify --channel " + data("bsc01.json") + " --code " +
                        data("pair16.txt") + " --list-size 1");
  REQUIRE(r.exit_code == 0);
  auto j = zerorate::Json::parse(r.out);
  CHECK(j.at("holds") == true);
}

TEST_CASE("ramsey extract via CLI") {
  RunResult r = run_cli("ramsey extract --code " + data("rand_m30_n10.txt") +
                        " --k 2 --t 2");
  REQUIRE(r.exit_code == 0);
  auto j = zerorate::Json::parse(r.out);
  CHECK(j.at("m_prime").get<int>() >= 2);
  CHECK(j.at("conditions_ok") == true);
  CHECK(j.at("deviation_within_bound") == true);
  CHECK(j.at("delta") == "1/4");
}

TEST_CASE("halving run via CLI") {
  RunResult r = run_cli("halving run --code " + data("rand_m64_n16.txt") + " --t 4 --exact");
  REQUIRE(r.exit_code == 0);
  auto j = zerorate::Json::parse(r.out);
  CHECK(j.at("final_ok") == true);
  CHECK(j.at("trace").at("bound_holds") == true);

  RunResult csv = run_cli("halving run --code " + data("rand_m64_n16.txt") +
                          " --t 4 --format csv");
  CHECK(csv.out.rfind("step,m,var_before", 0) == 0);
}

TEST_CASE("reports are byte-identical across runs") {
  std::string cmd = "exponent zero-rate --channel " + data("bsc01.json") +
                    " --list-size 1 --seed 7";
  CHECK(run_cli(cmd).out == run_cli(cmd).out);
}
