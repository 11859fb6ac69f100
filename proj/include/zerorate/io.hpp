#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "zerorate/channel.hpp"
#include "zerorate/code.hpp"
#include "zerorate/decoder.hpp"
#include "zerorate/exponent.hpp"
#include "zerorate/halving.hpp"
#include "zerorate/ramsey.hpp"

namespace zerorate {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Channel JSON: {"matrix": [[row per input symbol]]}, 0-based symbols.
// ---------------------------------------------------------------------------

inline Channel channel_from_json(const Json& j) {
  if (!j.contains("matrix")) throw IoError("channel JSON needs a \"matrix\" field");
  std::vector<std::vector<double>> m;
  for (const auto& row : j.at("matrix")) m.push_back(row.get<std::vector<double>>());
  return validate_channel(m);
}

inline Json channel_to_json(const Channel& ch) {
  Json j;
  j["matrix"] = ch.matrix();
  return j;
}

inline Channel load_channel(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open channel file: " + path);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw IoError("bad channel JSON in " + path + ": " + e.what());
  }
  return channel_from_json(j);
}

// ---------------------------------------------------------------------------
// Code text file: one codeword per line, space-separated 0-based symbols.
// Optional header line "# |X|=k"; other '#' lines are comments.
// ---------------------------------------------------------------------------

inline Code parse_code(std::istream& in) {
  std::vector<std::vector<int>> rows;
  int alphabet = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto pos = line.find("|X|=");
      if (pos != std::string::npos) alphabet = std::stoi(line.substr(pos + 4));
      continue;
    }
    std::istringstream ls(line);
    std::vector<int> row;
    int v;
    while (ls >> v) row.push_back(v);
    if (!row.empty()) rows.push_back(std::move(row));
  }
  return make_code(std::move(rows), alphabet);
}

inline Code load_code(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open code file: " + path);
  return parse_code(in);
}

inline std::string code_to_text(const Code& code) {
  std::ostringstream out;
  out << "# |X|=" << code.alphabet_size << "\n";
  for (const auto& row : code.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? " " : "") << row[i];
    out << "\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Report serialization.  Rationals are emitted as exact "num/den" strings;
// field order is fixed by construction (ordered_json).
// ---------------------------------------------------------------------------

inline std::string rational_str(const Rational& q) {
  return numerator(q).str() + "/" + denominator(q).str();
}

inline Rational parse_rational(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) return Rational(Int(s));
  return Rational(Int(s.substr(0, slash)), Int(s.substr(slash + 1)));
}

inline Json to_json(const ExponentResult& r, const std::vector<int>* witness = nullptr) {
  Json j;
  j["value_nats"] = r.value;
  j["argmax"] = r.argmax.weights;
  j["gap"] = r.gap;
  j["iterations"] = r.iterations;
  if (witness) j["witness_subset"] = *witness;
  return j;
}

inline ExponentResult exponent_from_json(const Json& j) {
  ExponentResult r;
  r.value = j.at("value_nats").get<double>();
  r.argmax = SimplexPoint(j.at("argmax").get<std::vector<double>>());
  r.gap = j.at("gap").get<double>();
  r.iterations = j.at("iterations").get<int>();
  return r;
}

inline const char* method_name(DecodingOutcome::Method m) {
  switch (m) {
    case DecodingOutcome::Method::kDirect: return "direct";
    case DecodingOutcome::Method::kTypes: return "types";
    case DecodingOutcome::Method::kPair: return "pair";
  }
  return "direct";
}

inline Json to_json(const DecodingOutcome& o) {
  Json j;
  j["method"] = method_name(o.method);
  j["per_message_error"] = o.per_message_error;
  j["average"] = o.average;
  j["maximal"] = o.maximal;
  j["outside_support_mass"] = o.outside_support_mass;
  return j;
}

inline DecodingOutcome decoding_from_json(const Json& j) {
  DecodingOutcome o;
  std::string m = j.at("method").get<std::string>();
  o.method = m == "types"   ? DecodingOutcome::Method::kTypes
             : m == "pair" ? DecodingOutcome::Method::kPair
                           : DecodingOutcome::Method::kDirect;
  o.per_message_error = j.at("per_message_error").get<std::vector<double>>();
  o.average = j.at("average").get<double>();
  o.maximal = j.at("maximal").get<double>();
  o.outside_support_mass = j.at("outside_support_mass").get<std::vector<double>>();
  return o;
}

inline Json to_json(const BoundReport& r) {
  Json j;
  j["d_min"] = r.d_min;
  j["plotkin_upper"] = r.plotkin_upper;
  j["correction"] = r.correction;
  j["factor"] = r.factor;
  j["constant_c"] = r.constant_c;
  j["max_q_term"] = r.max_q_term;
  j["witness_subset"] = r.witness_subset;
  return j;
}

inline Json to_json(const SionReport& r) {
  Json j;
  j["dual"] = r.dual;
  j["primal"] = r.primal;
  j["gap"] = r.gap;
  j["weak_min"] = r.weak_min;
  j["weak_duality_ok"] = r.weak_duality_ok;
  j["random_types"] = r.random_types;
  return j;
}

inline Json to_json(const LowerBoundReport& r) {
  Json j;
  j["holds"] = r.holds;
  j["p_e_max"] = r.p_e_max;
  j["log_p_e_max"] = r.log_p_e_max;
  j["d_prime"] = r.d_prime;
  j["log_rhs"] = r.log_rhs;
  j["empirical_exponent"] = r.empirical_exponent;
  j["d_min"] = r.d_min;
  j["sandwich_rhs"] = r.sandwich_rhs;
  j["witness_subset"] = r.witness_subset;
  return j;
}

inline Json to_json(const SubcodeReport& r) {
  Json j;
  j["indices"] = r.indices;
  j["m_prime"] = r.m_prime;
  j["t"] = r.t;
  j["pre_trim_size"] = r.pre_trim_size;
  j["epsilon"] = rational_str(r.epsilon);
  j["delta"] = rational_str(r.delta);
  j["delta_bound"] = r.delta_bound_value;
  j["max_deviation"] = rational_str(r.max_deviation);
  j["max_deviation_value"] = to_double(r.max_deviation);
  j["conditions_ok"] = r.conditions_ok;
  j["deviation_within_bound"] = r.deviation_within_bound;
  return j;
}

inline Json to_json(const HalvingTrace& tr) {
  Json j;
  j["total_steps"] = tr.total_steps;
  j["pigeonhole_step"] = tr.pigeonhole_step;
  j["d_min_start"] = rational_str(tr.d_min_start);
  j["d_min_at_pigeonhole"] = rational_str(tr.d_min_at_pigeonhole);
  j["d_min_bound"] = tr.d_min_bound;
  j["bound_holds"] = tr.bound_holds;
  Json steps = Json::array();
  for (const auto& s : tr.steps) {
    Json step;
    step["m"] = s.m_before;
    step["var_before"] = rational_str(s.var_before);
    step["var_after"] = rational_str(s.var_after);
    step["var_diff"] = rational_str(s.var_diff);
    step["var_value"] = to_double(s.var_before);
    step["d_min"] = rational_str(s.d_min_before);
    step["d_min_value"] = to_double(s.d_min_before);
    step["identity_residual"] = rational_str(s.identity_residual);
    step["var_identity_residual"] = rational_str(s.var_identity_residual);
    step["sign_consistent"] = s.sign_consistent;
    steps.push_back(std::move(step));
  }
  j["steps"] = std::move(steps);
  return j;
}

inline HalvingTrace halving_trace_from_json(const Json& j) {
  HalvingTrace tr;
  tr.total_steps = j.at("total_steps").get<int>();
  tr.pigeonhole_step = j.at("pigeonhole_step").get<int>();
  tr.d_min_start = parse_rational(j.at("d_min_start").get<std::string>());
  tr.d_min_at_pigeonhole = parse_rational(j.at("d_min_at_pigeonhole").get<std::string>());
  tr.d_min_bound = j.at("d_min_bound").get<double>();
  tr.bound_holds = j.at("bound_holds").get<bool>();
  for (const auto& s : j.at("steps")) {
    HalvingStep step;
    step.m_before = s.at("m").get<int>();
    step.var_before = parse_rational(s.at("var_before").get<std::string>());
    step.var_after = parse_rational(s.at("var_after").get<std::string>());
    step.var_diff = parse_rational(s.at("var_diff").get<std::string>());
    step.d_min_before = parse_rational(s.at("d_min").get<std::string>());
    step.identity_residual = parse_rational(s.at("identity_residual").get<std::string>());
    step.var_identity_residual =
        parse_rational(s.at("var_identity_residual").get<std::string>());
    step.sign_consistent = s.at("sign_consistent").get<bool>();
    tr.steps.push_back(std::move(step));
  }
  return tr;
}

inline Json to_json(const TheoremReport& r) {
  Json j;
  j["extracted"] = r.extracted;
  j["m_prime"] = r.m_prime;
  j["truncated"] = r.truncated;
  j["steps"] = r.steps;
  j["t"] = r.t;
  j["delta_tilde"] = r.delta_tilde_value;
  j["max_skew_abs"] = r.max_skew_abs;
  j["max_distance"] = r.max_distance;
  j["d_min_extracted"] = r.d_min_extracted;
  j["intermediate_ok"] = r.intermediate_ok;
  j["final_ok"] = r.final_ok;
  j["trace"] = to_json(r.trace);
  return j;
}

// ---------------------------------------------------------------------------
// Report emission.  JSON keeps full round-trip precision; CSV prints
// floating values with 12 significant digits and a header row.
// ---------------------------------------------------------------------------

inline std::string format_sig12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline std::string decoding_to_csv(const DecodingOutcome& o) {
  std::ostringstream out;
  out << "m,P_e_m\n";
  for (std::size_t m = 0; m < o.per_message_error.size(); ++m)
    out << m << "," << format_sig12(o.per_message_error[m]) << "\n";
  return out.str();
}

inline std::string halving_to_csv(const HalvingTrace& tr) {
  std::ostringstream out;
  out << "step,m,var_before,var_after,var_diff,d_min,identity_residual,sign_consistent\n";
  for (std::size_t i = 0; i < tr.steps.size(); ++i) {
    const auto& s = tr.steps[i];
    out << i << "," << s.m_before << "," << format_sig12(to_double(s.var_before)) << ","
        << format_sig12(to_double(s.var_after)) << "," << format_sig12(to_double(s.var_diff))
        << "," << format_sig12(to_double(s.d_min_before)) << ","
        << format_sig12(to_double(s.identity_residual)) << "," << (s.sign_consistent ? 1 : 0)
        << "\n";
  }
  return out.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open output file: " + path);
  out << content;
  if (!out) throw IoError("failed writing: " + path);
}

}  // namespace zerorate
