#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "zerorate/decoder.hpp"
#include "zerorate/exponent.hpp"
#include "zerorate/halving.hpp"
#include "zerorate/instances.hpp"
#include "zerorate/ramsey.hpp"

namespace zerorate {

// The acceptance suite: ten numbered end-to-end checks, each with its
// tolerance pinned in code.  `suite acceptance` on the CLI and the ctest
// acceptance binary both run these.

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

namespace acceptance_detail {

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// independent max-clique oracle (plain recursion on an adjacency matrix)
inline void bk_extend(const std::vector<std::vector<char>>& adj, std::vector<int>& r,
                      std::vector<int>& cand, std::size_t& best) {
  if (r.size() + cand.size() <= best) return;
  if (cand.empty()) {
    best = std::max(best, r.size());
    return;
  }
  for (std::size_t i = 0; i < cand.size(); ++i) {
    if (r.size() + (cand.size() - i) <= best) return;
    int v = cand[i];
    r.push_back(v);
    std::vector<int> next;
    for (std::size_t j = i + 1; j < cand.size(); ++j)
      if (adj[v][cand[j]]) next.push_back(cand[j]);
    best = std::max(best, r.size());
    bk_extend(adj, r, next, best);
    r.pop_back();
  }
}

inline std::size_t oracle_max_mono_pair(const Code& code, std::uint64_t t) {
  const int m = code.message_count();
  std::map<ColorVector, std::vector<std::pair<int, int>>> classes;
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b) classes[color_edge(code, {a, b}, t)].push_back({a, b});
  std::size_t best = 2;
  for (const auto& [c, edges] : classes) {
    if (edges.size() < best * (best + 1) / 2) continue;
    std::vector<std::vector<char>> adj(m, std::vector<char>(m, 0));
    for (auto [a, b] : edges) adj[a][b] = adj[b][a] = 1;
    std::vector<int> r, cand(m);
    for (int v = 0; v < m; ++v) cand[v] = v;
    bk_extend(adj, r, cand, best);
  }
  return best;
}

}  // namespace acceptance_detail

// 1. Tilted-distribution optimality at the single-letter level.
inline CriterionResult criterion_1() {
  CriterionResult res{1, "lemma1-optimality", false, "", 0.0};
  Rng rng(1001);
  double worst_slack = 0.0, worst_eq = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    int nx = 2 + static_cast<int>(rng.next_below(3));
    int ny = 2 + static_cast<int>(rng.next_below(3));
    Channel ch = trial % 4 == 3 ? random_channel_with_zeros(rng, nx, ny)
                                : random_channel(rng, nx, ny);
    int k = 2 + static_cast<int>(rng.next_below(2));
    InputTuple tuple(k);
    SupportSet s;
    for (int attempt = 0; attempt < 64; ++attempt) {
      for (auto& x : tuple) x = static_cast<int>(rng.next_below(nx));
      s = support_set(ch, tuple);
      if (!s.empty()) break;
    }
    if (s.empty()) continue;
    SimplexPoint alpha(rng.next_simplex(k));
    double mu = mu_x(ch, tuple, alpha);
    auto weighted = [&](const std::vector<double>& t) {
      double v = 0.0;
      for (int kk = 0; kk < k; ++kk) {
        double kl = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i)
          if (t[i] > 0.0) kl += t[i] * (std::log(t[i]) - ch.log_prob(tuple[kk], s.outputs[i]));
        v += alpha[kk] * kl;
      }
      return v;
    };
    for (int rep = 0; rep < 1000; ++rep)
      worst_slack = std::max(worst_slack, mu - weighted(rng.next_simplex(s.size())));
    worst_eq = std::max(worst_eq, std::abs(weighted(q_star_x(ch, tuple, alpha)) - mu));
  }
  res.pass = worst_slack <= 1e-9 && worst_eq <= 1e-9;
  res.detail = "max lower-bound slack " + acceptance_detail::fmt(worst_slack) +
               ", max equality gap " + acceptance_detail::fmt(worst_eq);
  return res;
}

// 2. Letter-wise additivity of the exponent kernel.
inline CriterionResult criterion_2() {
  CriterionResult res{2, "mu-additivity", false, "", 0.0};
  Rng rng(1002);
  double worst = 0.0;
  int checked = 0;
  while (checked < 60) {
    int nx = 2 + static_cast<int>(rng.next_below(2));
    int ny = 2 + static_cast<int>(rng.next_below(2));
    Channel ch = checked % 3 == 2 ? random_channel_with_zeros(rng, nx, ny)
                                  : random_channel(rng, nx, ny);
    int k = 2 + static_cast<int>(rng.next_below(2));
    int n = 2 + static_cast<int>(rng.next_below(5));
    Code c = random_code(rng, k, n, nx);
    std::vector<int> subset(k);
    for (int i = 0; i < k; ++i) subset[i] = i;
    bool supported = true;
    for (const auto& [x, w] : joint_type(c, subset).weights)
      if (support_set(ch, x).empty()) supported = false;
    if (!supported) continue;
    SimplexPoint alpha(rng.next_simplex(k));
    worst = std::max(worst, std::abs(mu_code(ch, c, subset, alpha) -
                                     mu_code_sequence_sum(ch, c, subset, alpha)));
    ++checked;
  }
  res.pass = worst <= 1e-10;
  res.detail = "max |letters - sequence| = " + acceptance_detail::fmt(worst) + " over " +
               std::to_string(checked) + " instances";
  return res;
}

// 3 + 5. Decoder oracle equivalence and the finite-n lower bound, on the
// same instance family.
inline void criteria_3_and_5(CriterionResult& c3, CriterionResult& c5) {
  c3 = {3, "decoder-oracle-equivalence", false, "", 0.0};
  c5 = {5, "finite-n-lower-bound", false, "", 0.0};
  Rng rng(1003);
  double worst = 0.0;
  int instances = 0, bound_violations = 0;
  double min_margin = kInf;
  while (instances < 120) {
    int nx = 2 + static_cast<int>(rng.next_below(2));
    int ny = 2 + static_cast<int>(rng.next_below(2));
    int list_size = 1 + static_cast<int>(rng.next_below(2));
    int n = 2 + static_cast<int>(rng.next_below(5));
    Channel ch = random_channel(rng, nx, ny);
    Code c = random_code(rng, list_size + 1, n, nx);
    std::vector<int> subset(list_size + 1);
    for (int i = 0; i <= list_size; ++i) subset[i] = i;

    DecodingOutcome direct = error_probabilities_direct(ch, c, list_size);
    DecodingOutcome types = error_probabilities_via_types(ch, c, subset, list_size);
    for (std::size_t m = 0; m < direct.per_message_error.size(); ++m)
      worst = std::max(worst,
                       std::abs(direct.per_message_error[m] - types.per_message_error[m]));

    try {
      LowerBoundReport rep = verify_lower_bound(ch, c, list_size);
      min_margin = std::min(min_margin, rep.log_p_e_max - rep.log_rhs);
    } catch (const BoundViolationError&) {
      ++bound_violations;
    }
    ++instances;
  }
  c3.pass = worst <= 1e-12;
  c3.detail = "max per-message |direct - types| = " + acceptance_detail::fmt(worst) +
              " over " + std::to_string(instances) + " instances";
  c5.pass = bound_violations == 0;
  c5.detail = std::to_string(bound_violations) + " violations, min log margin " +
              acceptance_detail::fmt(min_margin);
}

// 4. Exponent convergence on the repetition pair.
inline CriterionResult criterion_4() {
  CriterionResult res{4, "exponent-convergence", false, "", 0.0};
  Channel b = bsc(0.1);
  const double target = -std::log(0.6);
  double prev = kInf;
  bool monotone = true;
  double last = kInf;
  std::string seq;
  for (int n : {50, 100, 200, 400}) {
    DecodingOutcome out = error_probabilities_pair(b, pair_code(n));
    double dev = std::abs(-std::log(out.average) / n - target);
    if (dev >= prev) monotone = false;
    prev = dev;
    last = dev;
    seq += (seq.empty() ? "" : ", ") + acceptance_detail::fmt(dev);
  }
  res.pass = monotone && last <= 0.02;
  res.detail = "|empirical - limit| = [" + seq + "]";
  return res;
}

// 6. Saddle-point exchange.
inline CriterionResult criterion_6() {
  CriterionResult res{6, "sion-exchange", false, "", 0.0};
  Rng rng(1006);
  double worst_gap = 0.0;
  int failures = 0;
  for (int trial = 0; trial < 50; ++trial) {
    int nx = 2 + static_cast<int>(rng.next_below(2));
    int ny = 2 + static_cast<int>(rng.next_below(2));
    int list_size = 1 + static_cast<int>(rng.next_below(2));
    int n = 2 + static_cast<int>(rng.next_below(5));
    Channel ch = random_channel(rng, nx, ny);
    Code c = random_code(rng, list_size + 1, n, nx);
    std::vector<int> subset(list_size + 1);
    for (int i = 0; i <= list_size; ++i) subset[i] = i;
    try {
      SionReport rep = sion_exchange_check(ch, c, subset, 1e-6, 100, rng.next_u64());
      worst_gap = std::max(worst_gap, rep.gap);
      if (!rep.weak_duality_ok) ++failures;
    } catch (const Error&) {
      ++failures;
    }
  }
  res.pass = failures == 0 && worst_gap <= 1e-6;
  res.detail = "max |primal - dual| = " + acceptance_detail::fmt(worst_gap) + ", " +
               std::to_string(failures) + " failures";
  return res;
}

// 7. The zero-rate optimizer against closed forms and the grid oracle.
inline CriterionResult criterion_7() {
  CriterionResult res{7, "zero-rate-optimizer", false, "", 0.0};
  bool ok = true;
  double worst_bsc = 0.0, worst_arg = 0.0, worst_grid = 0.0;
  for (double p : {0.05, 0.1, 0.2}) {
    ExponentResult r = zero_rate_exponent(bsc(p), 1);
    double expected = -0.5 * std::log(2.0 * std::sqrt(p * (1.0 - p)));
    worst_bsc = std::max(worst_bsc, std::abs(r.value - expected));
    worst_arg = std::max(worst_arg, std::abs(r.argmax[0] - 0.5));
  }
  ok = ok && worst_bsc <= 1e-6 && worst_arg <= 1e-4;

  Rng rng(1007);
  for (int trial = 0; trial < 20; ++trial) {
    Channel ch = random_channel(rng, 3, 3);
    ExponentResult grid = zero_rate_exponent(ch, 1, ZeroRateMethod::kGrid);
    ExponentResult multi = zero_rate_exponent(ch, 1, ZeroRateMethod::kMultistart);
    worst_grid = std::max(worst_grid, std::abs(grid.value - multi.value));
  }
  ok = ok && worst_grid <= 1e-3;
  res.pass = ok;
  res.detail = "BSC value err " + acceptance_detail::fmt(worst_bsc) + ", argmax err " +
               acceptance_detail::fmt(worst_arg) + ", grid-vs-multistart " +
               acceptance_detail::fmt(worst_grid);
  return res;
}

// 8. Ramsey extraction pipeline.
inline CriterionResult criterion_8() {
  CriterionResult res{8, "ramsey-pipeline", false, "", 0.0};
  Rng rng(1008);
  int violations = 0, size_mismatches = 0;
  for (int trial = 0; trial < 50; ++trial) {
    Code c = random_code(rng, 30, 10, 2);
    std::vector<int> mono = find_monochromatic_subset(c, 2, 2);
    if (!is_monochromatic(mono, 2, [&](const std::vector<int>& e) {
          return color_edge(c, e, 2);
        }))
      ++violations;
    if (mono.size() != acceptance_detail::oracle_max_mono_pair(c, 2)) ++size_mismatches;
    std::vector<int> trimmed = trim_last(mono, 2);
    KomlosConditionReport cond = check_komlos_conditions(c, trimmed, 2, 2);
    if (!cond.delta_ok || !cond.epsilon_ok) ++violations;
    PermutationDeviationReport dev = permutation_deviation(c, trimmed, 2);
    if (to_double(dev.max_deviation) > delta_bound(trimmed.size(), 2, 2, 2)) ++violations;
  }
  for (int trial = 0; trial < 10; ++trial) {
    Code c = random_code(rng, 14, 10, 2);
    std::vector<int> mono = find_monochromatic_subset(c, 3, 2);
    if (!is_monochromatic(mono, 3, [&](const std::vector<int>& e) {
          return color_edge(c, e, 2);
        }))
      ++violations;
    if (static_cast<int>(mono.size()) < 4) {
      ++violations;
      continue;
    }
    std::vector<int> trimmed = trim_last(mono, 3);
    KomlosConditionReport cond = check_komlos_conditions(c, trimmed, 3, 2);
    if (!cond.delta_ok || !cond.epsilon_ok) ++violations;
    PermutationDeviationReport dev = permutation_deviation(c, trimmed, 3);
    if (to_double(dev.max_deviation) > delta_bound(trimmed.size(), 2, 3, 2)) ++violations;
  }
  res.pass = violations == 0 && size_mismatches == 0;
  res.detail = std::to_string(violations) + " violations, " +
               std::to_string(size_mismatches) + " clique-size mismatches";
  return res;
}

// 9. Halving pipeline.
inline CriterionResult criterion_9() {
  CriterionResult res{9, "halving-pipeline", false, "", 0.0};
  Rng rng(1009);
  int violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    int n = 8 + static_cast<int>(rng.next_below(13));  // n <= 20
    Code c = random_code(rng, 64, n, 2);
    try {
      TheoremReport rep = theorem_check(ensemble_from_code(c), 4);
      bool ok = rep.final_ok && rep.intermediate_ok && rep.trace.bound_holds &&
                rep.trace.pigeonhole_step >= 0;
      for (const auto& s : rep.trace.steps)
        ok = ok && s.identity_residual == Rational(0) &&
             s.var_identity_residual == Rational(0) && s.var_diff >= 0;
      if (!ok) ++violations;
    } catch (const Error&) {
      ++violations;
    }
  }
  res.pass = violations == 0;
  res.detail = std::to_string(violations) + " violations over 100 ensembles";
  return res;
}

// 10. The Plotkin bound at scale against the zero-rate value.
inline CriterionResult criterion_10() {
  CriterionResult res{10, "sandwich-at-scale", false, "", 0.0};
  Channel b = bsc(0.1);
  ExponentResult e = zero_rate_exponent(b, 1);
  BoundReport big = plotkin_upper_value(b, 1, 1000, 1'000'000);
  double slack = big.correction + (big.factor - 1.0) * e.value;
  bool ok = big.plotkin_upper >= e.value &&
            std::abs(big.plotkin_upper - e.value - slack) <= 1e-9;

  Rng rng(1010);
  double max_dmin = 0.0;
  for (int trial = 0; trial < 3; ++trial) {
    Code c = random_code(rng, 30, 10, 2);
    std::vector<int> sub = trim_last(find_monochromatic_subset(c, 2, 2), 2);
    Code subcode;
    subcode.alphabet_size = 2;
    for (int m : sub) subcode.rows.push_back(c.rows[m]);
    if (subcode.message_count() < 2) continue;
    DMinResult dm = d_min(b, subcode, 1);
    max_dmin = std::max(max_dmin, dm.best.value);
    if (dm.best.value > big.plotkin_upper) ok = false;
  }
  res.pass = ok;
  res.detail = "bound " + acceptance_detail::fmt(big.plotkin_upper) + " vs E_1(0+) " +
               acceptance_detail::fmt(e.value) + ", max subcode d_min " +
               acceptance_detail::fmt(max_dmin);
  return res;
}

inline std::vector<CriterionResult> run_acceptance() {
  std::vector<CriterionResult> all;
  auto timed = [&](const std::function<CriterionResult()>& fn) {
    auto start = std::chrono::steady_clock::now();
    CriterionResult r = fn();
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    all.push_back(std::move(r));
  };
  timed(criterion_1);
  timed(criterion_2);
  {
    auto start = std::chrono::steady_clock::now();
    CriterionResult c3, c5;
    criteria_3_and_5(c3, c5);
    double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    c3.seconds = secs;
    c5.seconds = 0.0;
    all.push_back(c3);
    timed(criterion_4);
    all.push_back(c5);
  }
  timed(criterion_6);
  timed(criterion_7);
  timed(criterion_8);
  timed(criterion_9);
  timed(criterion_10);
  std::sort(all.begin(), all.end(),
            [](const CriterionResult& a, const CriterionResult& b) { return a.id < b.id; });
  return all;
}

inline bool print_acceptance(std::ostream& out) {
  std::vector<CriterionResult> all = run_acceptance();
  bool ok = true;
  for (const auto& r : all) {
    char line[256];
    std::snprintf(line, sizeof(line), "[%2d/10] %s  %-28s %s (%.1fs)", r.id,
                  r.pass ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str(), r.seconds);
    out << line << "\n";
    ok = ok && r.pass;
  }
  out << (ok ? "acceptance: all criteria passed\n" : "acceptance: FAILURES present\n");
  return ok;
}

}  // namespace zerorate
