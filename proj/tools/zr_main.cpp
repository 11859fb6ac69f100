// zerorate command-line front end.
//
// Exit codes: 0 success, 1 validation/input error, 2 size guard exceeded,
// 3 assertion or bound violation.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "zerorate/acceptance.hpp"
#include "zerorate/zerorate.hpp"

namespace {

using namespace zerorate;

struct OutputOptions {
  std::string output;  // empty = stdout
  std::string format = "json";
};

void add_output_options(CLI::App* cmd, OutputOptions& out) {
  cmd->add_option("--output", out.output, "write the report to this path instead of stdout");
  cmd->add_option("--format", out.format, "report format")
      ->check(CLI::IsMember({"json", "csv"}));
}

// generic CSV fallback: one key,value row per top-level scalar field
std::string json_to_csv(const Json& j) {
  std::ostringstream out;
  out << "key,value\n";
  for (const auto& [key, val] : j.items()) {
    if (val.is_number_float())
      out << key << "," << format_sig12(val.get<double>()) << "\n";
    else if (val.is_primitive())
      out << key << "," << val.dump() << "\n";
  }
  return out.str();
}

void emit(const Json& j, const OutputOptions& opt, const std::string& csv = "") {
  std::string payload =
      opt.format == "csv" ? (csv.empty() ? json_to_csv(j) : csv) : j.dump(2) + "\n";
  if (opt.output.empty())
    std::cout << payload;
  else
    write_text_file(opt.output, payload);
}

std::uint64_t guard_or_env(std::uint64_t fallback) {
  if (const char* env = std::getenv("ZR_GUARD")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && v > 0) return static_cast<std::uint64_t>(v);
  }
  return fallback;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zero-rate list-decoding reliability toolbox"};
  app.require_subcommand(1);

  std::string channel_path, code_path;
  int list_size = 1;
  int k = 2;
  std::uint64_t t = 2;
  std::uint64_t seed = 0;
  int starts = 64;
  std::string method, mode = "exact";
  int target_size = 0;
  bool exact_flag = false;
  OutputOptions out;

  // channel validate
  auto* channel = app.add_subcommand("channel", "channel file operations");
  auto* validate = channel->add_subcommand("validate", "validate a channel file");
  validate->add_option("--channel", channel_path, "channel JSON file")->required();
  add_output_options(validate, out);

  // exponent zero-rate
  auto* exponent = app.add_subcommand("exponent", "exponent computations");
  auto* zero_rate = exponent->add_subcommand("zero-rate", "zero-rate exponent E_L(0+)");
  zero_rate->add_option("--channel", channel_path, "channel JSON file")->required();
  zero_rate->add_option("--list-size", list_size, "list size L")->required();
  zero_rate->add_option("--method", method, "optimizer")
      ->check(CLI::IsMember({"multistart", "grid"}));
  zero_rate->add_option("--seed", seed, "multistart seed (default 0)");
  zero_rate->add_option("--starts", starts, "multistart count (default 64)");
  add_output_options(zero_rate, out);

  // code dmin
  auto* code_cmd = app.add_subcommand("code", "code-level quantities");
  auto* dmin_cmd = code_cmd->add_subcommand("dmin", "exhaustive D_min over (L+1)-subsets");
  dmin_cmd->add_option("--channel", channel_path, "channel JSON file")->required();
  dmin_cmd->add_option("--code", code_path, "code text file")->required();
  dmin_cmd->add_option("--list-size", list_size, "list size L")->required();
  add_output_options(dmin_cmd, out);

  // decode exact
  auto* decode = app.add_subcommand("decode", "exact ML list decoding");
  auto* exact = decode->add_subcommand("exact", "exact error probabilities");
  exact->add_option("--channel", channel_path, "channel JSON file")->required();
  exact->add_option("--code", code_path, "code text file")->required();
  exact->add_option("--list-size", list_size, "list size L")->required();
  exact->add_option("--method", method, "direct enumeration or type classes")
      ->check(CLI::IsMember({"direct", "types"}));
  add_output_options(exact, out);

  // bound verify
  auto* bound = app.add_subcommand("bound", "bound verification");
  auto* verify = bound->add_subcommand("verify", "finite-n lower bound on P_e_max");
  verify->add_option("--channel", channel_path, "channel JSON file")->required();
  verify->add_option("--code", code_path, "code text file")->required();
  verify->add_option("--list-size", list_size, "list size L")->required();
  add_output_options(verify, out);

  // ramsey extract
  auto* ramsey = app.add_subcommand("ramsey", "monochromatic subcode extraction");
  auto* extract = ramsey->add_subcommand("extract", "extract and verify a subcode");
  extract->add_option("--code", code_path, "code text file")->required();
  extract->add_option("--k", k, "subset size K")->required();
  extract->add_option("--t", t, "quantization cells per unit interval")->required();
  extract->add_option("--mode", mode, "search mode")
      ->check(CLI::IsMember({"exact", "greedy"}));
  extract->add_option("--target-size", target_size, "fail if the subset is smaller (exact)");
  add_output_options(extract, out);

  // halving run
  auto* halving = app.add_subcommand("halving", "sample-space halving procedure");
  auto* run = halving->add_subcommand("run", "extract, halve, and trace");
  run->add_option("--code", code_path, "code text file")->required();
  run->add_option("--t", t, "skew quantization (2t cells of [-1,1])")->required();
  run->add_flag("--exact", exact_flag, "exact monochromatic extraction (default greedy)");
  add_output_options(run, out);

  // suite acceptance
  auto* suite = app.add_subcommand("suite", "verification suites");
  auto* accept = suite->add_subcommand("acceptance", "run all acceptance criteria");
  add_output_options(accept, out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*validate) {
      Channel ch = load_channel(channel_path);
      Json j;
      j["input_size"] = ch.input_size();
      j["output_size"] = ch.output_size();
      j["valid"] = true;
      emit(j, out);
    } else if (*zero_rate) {
      Channel ch = load_channel(channel_path);
      ZeroRateOptions opt;
      opt.seed = seed;
      opt.starts = starts;
      ExponentResult r = zero_rate_exponent(
          ch, list_size,
          method == "grid" ? ZeroRateMethod::kGrid : ZeroRateMethod::kMultistart, opt);
      emit(to_json(r), out);
    } else if (*dmin_cmd) {
      Channel ch = load_channel(channel_path);
      Code c = load_code(code_path);
      DMinResult r = d_min(ch, c, list_size, guard_or_env(default_subset_guard()));
      emit(to_json(r.best, &r.witness_subset), out);
    } else if (*exact) {
      Channel ch = load_channel(channel_path);
      Code c = load_code(code_path);
      DecodingOutcome o;
      if (method == "types") {
        if (c.message_count() != list_size + 1)
          throw ValidationError("types method needs a code with exactly L+1 codewords");
        std::vector<int> subset(c.message_count());
        std::iota(subset.begin(), subset.end(), 0);
        o = error_probabilities_via_types(ch, c, subset, list_size,
                                          guard_or_env(default_type_enum_guard()));
      } else {
        o = error_probabilities_direct(ch, c, list_size,
                                       guard_or_env(default_sequence_guard()));
      }
      emit(to_json(o), out, out.format == "csv" ? decoding_to_csv(o) : "");
    } else if (*verify) {
      Channel ch = load_channel(channel_path);
      Code c = load_code(code_path);
      LowerBoundReport rep =
          verify_lower_bound(ch, c, list_size, guard_or_env(default_subset_guard()),
                             guard_or_env(default_sequence_guard()),
                             guard_or_env(default_type_enum_guard()));
      emit(to_json(rep), out);
    } else if (*extract) {
      Code c = load_code(code_path);
      SubcodeReport rep = extract_subcode(
          c, k, t, mode == "greedy" ? MonoSearchMode::kGreedy : MonoSearchMode::kExact,
          target_size, guard_or_env(default_exact_mono_guard(k)), guard_or_env(10'000'000ULL));
      emit(to_json(rep), out);
      if (!rep.conditions_ok || !rep.deviation_within_bound)
        throw BoundViolationError("extraction conditions or deviation bound violated");
    } else if (*run) {
      Code c = load_code(code_path);
      FiniteEnsemble ens = ensemble_from_code(c);
      TheoremReport rep = theorem_check(
          ens, t, exact_flag ? MonoSearchMode::kExact : MonoSearchMode::kGreedy,
          guard_or_env(default_rv_extract_guard()));
      emit(to_json(rep), out, out.format == "csv" ? halving_to_csv(rep.trace) : "");
    } else if (*accept) {
      std::vector<CriterionResult> results = run_acceptance();
      bool ok = true;
      for (const auto& r : results) {
        char line[256];
        std::snprintf(line, sizeof(line), "[%2d/10] %s  %-28s %s (%.1fs)", r.id,
                      r.pass ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str(), r.seconds);
        std::cout << line << "\n";
        ok = ok && r.pass;
      }
      std::cout << (ok ? "acceptance: all criteria passed\n"
                       : "acceptance: FAILURES present\n");
      if (!out.output.empty()) {
        Json j = Json::array();
        for (const auto& r : results) {
          Json c;
          c["id"] = r.id;
          c["name"] = r.name;
          c["pass"] = r.pass;
          c["detail"] = r.detail;
          c["seconds"] = r.seconds;
          j.push_back(std::move(c));
        }
        write_text_file(out.output, j.dump(2) + "\n");
      }
      return ok ? 0 : 3;
    }
  } catch (const SizeGuardExceededError& e) {
    std::cerr << "size guard: " << e.what() << "\n";
    return 2;
  } catch (const CheckError& e) {
    std::cerr << "check failed: " << e.what() << "\n";
    return 3;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
