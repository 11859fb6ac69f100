#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <vector>

#include "zerorate/code.hpp"
#include "zerorate/common.hpp"
#include "zerorate/ramsey.hpp"

namespace zerorate {

// ---------------------------------------------------------------------------
// FiniteEnsemble: a weighted finite sample space carrying M discrete random
// variables.  Weights are exact rationals with a common denominator, so all
// joint probabilities, skews and variances below are exact.
// ---------------------------------------------------------------------------

struct FiniteEnsemble {
  std::vector<Int> weight_num;           // point weights = weight_num[i] / weight_den
  Int weight_den = 1;
  std::vector<std::vector<int>> values;  // values[m][point]
  int alphabet_size = 0;

  int variable_count() const { return static_cast<int>(values.size()); }
  int point_count() const { return static_cast<int>(weight_num.size()); }

  void check() const {
    if (values.empty()) throw ValidationError("ensemble needs at least one variable");
    Int total = 0;
    for (const Int& w : weight_num) {
      if (w <= 0) throw ValidationError("point weights must be positive");
      total += w;
    }
    if (total != weight_den) throw ValidationError("point weights must sum to 1");
    for (const auto& row : values) {
      if (row.size() != weight_num.size())
        throw ValidationError("variable table size mismatch");
      for (int v : row)
        if (v < 0 || v >= alphabet_size) throw ValidationError("value outside alphabet");
    }
  }
};

// Codewords as random variables: points are the n coordinates with weight
// 1/n, and variable m takes the value x_{m,i} at point i.  Joint
// probabilities reproduce joint types exactly.
inline FiniteEnsemble ensemble_from_code(const Code& code) {
  FiniteEnsemble e;
  const int n = code.blocklength();
  e.weight_num.assign(n, 1);
  e.weight_den = n;
  e.values = code.rows;
  e.alphabet_size = code.alphabet_size;
  e.check();
  return e;
}

inline FiniteEnsemble restrict_ensemble(const FiniteEnsemble& ens,
                                        const std::vector<int>& indices) {
  FiniteEnsemble e;
  e.weight_num = ens.weight_num;
  e.weight_den = ens.weight_den;
  e.alphabet_size = ens.alphabet_size;
  for (int m : indices) {
    if (m < 0 || m >= ens.variable_count()) throw BadIndicesError("variable index out of range");
    e.values.push_back(ens.values[m]);
  }
  return e;
}

// q_{m,m'}(x,x') = P(X_m = x, X_{m'} = x'), exact.
inline Rational joint_prob(const FiniteEnsemble& ens, int m, int mp, int x, int xp) {
  Int num = 0;
  for (int i = 0; i < ens.point_count(); ++i)
    if (ens.values[m][i] == x && ens.values[mp][i] == xp) num += ens.weight_num[i];
  return Rational(num, ens.weight_den);
}

// d_{m,m'}(x,x') = q_{m,m'}(x,x') - q_{m,m'}(x',x).
inline Rational skew(const FiniteEnsemble& ens, int m, int mp, int x, int xp) {
  if (m < 0 || mp <= m || mp >= ens.variable_count())
    throw BadIndicesError("need 0 <= m < m' < M");
  Int num = 0;
  for (int i = 0; i < ens.point_count(); ++i) {
    if (ens.values[m][i] == x && ens.values[mp][i] == xp) num += ens.weight_num[i];
    if (ens.values[m][i] == xp && ens.values[mp][i] == x) num -= ens.weight_num[i];
  }
  return Rational(num, ens.weight_den);
}

// The antisymmetric table for one ordered pair, keyed by (x, x') with x < x'.
struct SkewSlice {
  std::map<std::pair<int, int>, Rational> d;
};

inline SkewSlice pairwise_skew(const FiniteEnsemble& ens, int m, int mp) {
  if (m < 0 || mp <= m || mp >= ens.variable_count())
    throw BadIndicesError("need 0 <= m < m' < M");
  SkewSlice s;
  for (int x = 0; x < ens.alphabet_size; ++x)
    for (int xp = x + 1; xp < ens.alphabet_size; ++xp)
      s.d[{x, xp}] = skew(ens, m, mp, x, xp);
  return s;
}

// Full table over pairs m < m', entries keyed (m, m', x, x').
struct SkewTable {
  std::map<std::array<int, 4>, Rational> d_vals;
};

inline SkewTable skew_table(const FiniteEnsemble& ens) {
  SkewTable t;
  for (int m = 0; m < ens.variable_count(); ++m)
    for (int mp = m + 1; mp < ens.variable_count(); ++mp)
      for (int x = 0; x < ens.alphabet_size; ++x)
        for (int xp = x + 1; xp < ens.alphabet_size; ++xp)
          t.d_vals[{m, mp, x, xp}] = skew(ens, m, mp, x, xp);
  return t;
}

// ---------------------------------------------------------------------------
// Monochromatic extraction on the pairwise-skew coloring: 2t equal cells of
// [-1, 1] per component (x, x'), x < x'.
// ---------------------------------------------------------------------------

namespace detail {

// cell of d in [-1,1] split into 2t cells: floor(t*(d+1)), d = 1 clamped.
inline int quantize_skew(const Rational& d, std::uint64_t t) {
  Rational shifted = Rational(Int(t)) * (d + 1);
  Int cell = numerator(shifted) / denominator(shifted);  // nonnegative
  if (cell >= Int(2) * Int(t)) cell = Int(2) * Int(t) - 1;
  return cell.convert_to<int>();
}

inline ColorVector skew_color(const FiniteEnsemble& ens, int m, int mp, std::uint64_t t) {
  ColorVector c;
  for (int x = 0; x < ens.alphabet_size; ++x)
    for (int xp = x + 1; xp < ens.alphabet_size; ++xp)
      c.push_back(quantize_skew(skew(ens, m, mp, x, xp), t));
  return c;
}

}  // namespace detail

inline std::uint64_t default_rv_extract_guard() { return 128; }

inline std::vector<int> monochromatic_rv_extract(const FiniteEnsemble& ens, std::uint64_t t,
                                                 MonoSearchMode mode = MonoSearchMode::kExact,
                                                 std::uint64_t guard = default_rv_extract_guard()) {
  if (ens.variable_count() < 2) throw ValidationError("need at least 2 variables");
  detail::EdgeColorFn color = [&](const std::vector<int>& pair) {
    return detail::skew_color(ens, pair[0], pair[1], t);
  };
  return detail::mono_search(ens.variable_count(), 2, color, mode, guard);
}

// ---------------------------------------------------------------------------
// The antisymmetric sign function shared by a monochromatic set.
// ---------------------------------------------------------------------------

struct SignFunction {
  std::vector<std::vector<int>> f;  // f[x][x'] in {-1, 0, +1}

  int at(int x, int xp) const { return f[x][xp]; }
  int dim() const { return static_cast<int>(f.size()); }
};

// Builds f from the common color of a monochromatic index set: components in
// a cell whose left endpoint is >= 0 count as positive (so d = 0 lands in a
// positive cell), A = positive components.
inline SignFunction build_f(const FiniteEnsemble& ens, const std::vector<int>& indices,
                            std::uint64_t t) {
  const int nx = ens.alphabet_size;
  SignFunction sf;
  sf.f.assign(nx, std::vector<int>(nx, 0));

  detail::EdgeColorFn color = [&](const std::vector<int>& pair) {
    return detail::skew_color(ens, pair[0], pair[1], t);
  };
  if (!is_monochromatic(indices, 2, color))
    throw NotMonochromaticError("index set is not monochromatic at this quantization");

  ColorVector ref;
  if (indices.size() >= 2) ref = color({indices[0], indices[1]});
  std::size_t comp = 0;
  for (int x = 0; x < nx; ++x) {
    for (int xp = x + 1; xp < nx; ++xp) {
      bool positive = true;  // d = 0 convention when no pair exists
      if (!ref.empty()) positive = ref[comp] >= static_cast<int>(t);
      sf.f[x][xp] = positive ? 1 : -1;
      sf.f[xp][x] = -sf.f[x][xp];
      ++comp;
    }
  }
  return sf;
}

// d(m,m') = sum_{x<x'} |d_{m,m'}(x,x')| = sum_{x,x'} q_{m,m'}(x,x') f(x,x').
// Both routes are computed and their exact equality asserted; they agree on
// sign-consistent (monochromatic) sets.
inline Rational distance(const FiniteEnsemble& ens, int m, int mp, const SignFunction& f) {
  Rational abs_route(0), f_route(0);
  for (int x = 0; x < ens.alphabet_size; ++x) {
    for (int xp = x + 1; xp < ens.alphabet_size; ++xp) {
      Rational d = skew(ens, m, mp, x, xp);
      abs_route += d < 0 ? -d : d;
      f_route += d * f.at(x, xp);
    }
  }
  if (abs_route != f_route)
    throw SignMismatchError("skew signs do not match f for pair (" + std::to_string(m) + "," +
                            std::to_string(mp) + ")");
  return abs_route;
}

// f-free minimum distance min_{m<m'} sum_{x<x'} |d_{m,m'}(x,x')|.
inline Rational d_min_rv(const FiniteEnsemble& ens) {
  Rational best;
  bool first = true;
  for (int m = 0; m < ens.variable_count(); ++m) {
    for (int mp = m + 1; mp < ens.variable_count(); ++mp) {
      Rational total(0);
      for (int x = 0; x < ens.alphabet_size; ++x)
        for (int xp = x + 1; xp < ens.alphabet_size; ++xp) {
          Rational d = skew(ens, m, mp, x, xp);
          total += d < 0 ? -d : d;
        }
      if (first || total < best) {
        best = total;
        first = false;
      }
    }
  }
  return first ? Rational(0) : best;
}

// ---------------------------------------------------------------------------
// The halving step: the sample space is duplicated, each copy's weight is
// halved, and variable m becomes (old m on copy 1, old m + M/2 on copy 2).
// ---------------------------------------------------------------------------

struct HalvingStepResult {
  FiniteEnsemble next;
  Rational identity_residual;  // max |d_hat - (d_top + d_bottom)/2|, exactly 0
  bool sign_consistent = true; // top and bottom skews never strictly oppose
};

inline HalvingStepResult halving_step(const FiniteEnsemble& ens) {
  const int m_count = ens.variable_count();
  if (m_count % 2 != 0) throw OddCountError("halving needs an even variable count");
  const int half = m_count / 2;
  const int pts = ens.point_count();

  FiniteEnsemble next;
  next.alphabet_size = ens.alphabet_size;
  next.weight_den = ens.weight_den * 2;
  next.weight_num.reserve(2 * pts);
  for (const Int& w : ens.weight_num) next.weight_num.push_back(w);
  for (const Int& w : ens.weight_num) next.weight_num.push_back(w);
  next.values.assign(half, std::vector<int>(2 * pts));
  for (int m = 0; m < half; ++m) {
    for (int i = 0; i < pts; ++i) {
      next.values[m][i] = ens.values[m][i];
      next.values[m][pts + i] = ens.values[m + half][i];
    }
  }

  HalvingStepResult res;
  res.next = std::move(next);
  res.identity_residual = 0;
  for (int m = 0; m < half; ++m) {
    for (int mp = m + 1; mp < half; ++mp) {
      for (int x = 0; x < ens.alphabet_size; ++x) {
        for (int xp = x + 1; xp < ens.alphabet_size; ++xp) {
          Rational top = skew(ens, m, mp, x, xp);
          Rational bottom = skew(ens, m + half, mp + half, x, xp);
          Rational mixed = skew(res.next, m, mp, x, xp);
          Rational resid = mixed - (top + bottom) / 2;
          if (resid < 0) resid = -resid;
          if (resid > res.identity_residual) res.identity_residual = resid;
          if ((top > 0 && bottom < 0) || (top < 0 && bottom > 0)) res.sign_consistent = false;
        }
      }
    }
  }
  return res;
}

// Var(q) = sum_x [ int ((chi_1(x)+...+chi_M(x))/M)^2 dP - q_bar(x)^2 ].
inline Rational variance(const FiniteEnsemble& ens) {
  const int m_count = ens.variable_count();
  Rational var(0);
  for (int x = 0; x < ens.alphabet_size; ++x) {
    Int sq_acc = 0;   // sum_i w_num_i * c_i^2
    Int mean_acc = 0; // sum_i w_num_i * c_i
    for (int i = 0; i < ens.point_count(); ++i) {
      Int c = 0;
      for (int m = 0; m < m_count; ++m)
        if (ens.values[m][i] == x) ++c;
      sq_acc += ens.weight_num[i] * c * c;
      mean_acc += ens.weight_num[i] * c;
    }
    Rational second(sq_acc, ens.weight_den * Int(m_count) * m_count);
    Rational mean(mean_acc, ens.weight_den * Int(m_count));
    var += second - mean * mean;
  }
  return var;
}

// (1/4) sum_x int (q^t(x) - q^b(x))^2 dP with q^t, q^b the top/bottom-half
// indicator averages; equals Var(q') - Var(q) exactly.
inline Rational half_split_energy(const FiniteEnsemble& ens) {
  const int m_count = ens.variable_count();
  if (m_count % 2 != 0) throw OddCountError("needs an even variable count");
  const int half = m_count / 2;
  Rational total(0);
  for (int x = 0; x < ens.alphabet_size; ++x) {
    Int acc = 0;
    for (int i = 0; i < ens.point_count(); ++i) {
      Int top = 0, bottom = 0;
      for (int m = 0; m < half; ++m)
        if (ens.values[m][i] == x) ++top;
      for (int m = half; m < m_count; ++m)
        if (ens.values[m][i] == x) ++bottom;
      Int diff = top - bottom;
      acc += ens.weight_num[i] * diff * diff;
    }
    total += Rational(acc, ens.weight_den * Int(half) * half);
  }
  return total / 4;
}

// ---------------------------------------------------------------------------
// The full halving run with its exact ledger.
// ---------------------------------------------------------------------------

struct HalvingStep {
  int m_before = 0;
  Rational var_before;
  Rational var_after;
  Rational var_diff;
  Rational d_min_before;
  Rational identity_residual;      // skew identity, exactly 0
  Rational var_identity_residual;  // var_diff - half_split_energy, exactly 0
  bool sign_consistent = true;
};

struct HalvingTrace {
  std::vector<HalvingStep> steps;
  int total_steps = 0;      // S = log2 of the starting variable count
  int pigeonhole_step = -1; // first step with var_diff <= 1/S
  Rational d_min_start;
  Rational d_min_at_pigeonhole;
  double d_min_bound = 0.0; // 2 sqrt(|X| / S)
  bool bound_holds = false; // exact check d_min^2 <= 4 |X| / S
};

// Runs the halving procedure down to a single variable.  The variable count
// must already be truncated to a power of two.  Asserts the exact identities
// per step, the variance monotonicity, the pigeonhole step, and the
// d_min <= 2 sqrt(|X|/log2 M') bound (checked exactly as d_min^2 <= 4|X|/S).
inline HalvingTrace run_halving(FiniteEnsemble ens) {
  ens.check();
  const int m_start = ens.variable_count();
  if (!is_power_of_two(static_cast<std::uint64_t>(m_start)))
    throw ValidationError("variable count must be a power of two (truncate first)");
  if (m_start < 2) throw ValidationError("need at least 2 variables");

  HalvingTrace trace;
  trace.total_steps = floor_log2(static_cast<std::uint64_t>(m_start));
  trace.d_min_start = d_min_rv(ens);

  Rational var_prev = variance(ens);
  if (var_prev < 0 || var_prev > 1) throw BoundViolationError("Var(q) outside [0,1]");
  Rational prev_d_min = trace.d_min_start;
  bool first_step = true;

  while (ens.variable_count() > 1) {
    HalvingStep step;
    step.m_before = ens.variable_count();
    step.var_before = var_prev;
    step.d_min_before = d_min_rv(ens);
    Rational split = half_split_energy(ens);

    HalvingStepResult hs = halving_step(ens);
    step.identity_residual = hs.identity_residual;
    step.sign_consistent = hs.sign_consistent;
    if (!hs.sign_consistent)
      throw SignMismatchError("halving input is not sign consistent; extract first");

    step.var_after = variance(hs.next);
    step.var_diff = step.var_after - step.var_before;
    step.var_identity_residual = step.var_diff - split;
    if (step.var_identity_residual != 0)
      throw BoundViolationError("variance difference identity violated");
    if (step.var_diff < 0) throw BoundViolationError("Var(q) decreased across a step");
    if (step.var_after > 1) throw BoundViolationError("Var(q) exceeded 1");
    if (!first_step && step.d_min_before < prev_d_min)
      throw BoundViolationError("d_min decreased across a halving step");
    prev_d_min = step.d_min_before;
    first_step = false;

    trace.steps.push_back(step);
    ens = std::move(hs.next);
    var_prev = trace.steps.back().var_after;
  }

  const int s = trace.total_steps;
  const Rational threshold(1, s);
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    if (trace.steps[i].var_diff <= threshold) {
      trace.pigeonhole_step = static_cast<int>(i);
      break;
    }
  }
  if (trace.pigeonhole_step < 0)
    throw BoundViolationError("no step with Var difference <= 1/log2 M' (impossible)");

  trace.d_min_at_pigeonhole = trace.steps[trace.pigeonhole_step].d_min_before;
  trace.d_min_bound = 2.0 * std::sqrt(static_cast<double>(ens.alphabet_size) / s);
  // exact form of d_min <= 2 sqrt(|X| * var_diff) <= 2 sqrt(|X|/S)
  const Rational& dmin = trace.d_min_at_pigeonhole;
  trace.bound_holds = dmin * dmin <= Rational(4 * Int(ens.alphabet_size), s);
  if (!trace.bound_holds)
    throw BoundViolationError("halving d_min bound violated at the pigeonhole step");
  if (trace.d_min_start > dmin)
    throw BoundViolationError("d_min propagation violated (start exceeds pigeonhole step)");
  return trace;
}

// ---------------------------------------------------------------------------
// End-to-end theorem check: extract, halve, and verify the pairwise
// permutation-asymmetry bound with Delta~.
// ---------------------------------------------------------------------------

// Delta~(M', t) = 2 sqrt(|X| / log2 M') + |X|^2 / (2t)
inline double delta_tilde(std::uint64_t m_prime, std::uint64_t t, int alphabet_size) {
  if (m_prime < 2) throw ValidationError("need M' >= 2");
  return 2.0 * std::sqrt(static_cast<double>(alphabet_size) /
                         std::log2(static_cast<double>(m_prime))) +
         static_cast<double>(alphabet_size) * alphabet_size / (2.0 * static_cast<double>(t));
}

struct TheoremReport {
  std::vector<int> extracted;   // monochromatic variable indices
  int m_prime = 0;              // extracted size
  int truncated = 0;            // 2^floor(log2 M')
  int steps = 0;                // S, the number of halving steps
  std::uint64_t t = 0;
  double delta_tilde_value = 0.0;   // at S steps: 2 sqrt(|X|/S) + |X|^2/(2t)
  double max_skew_abs = 0.0;        // max |q(x,x') - q(x',x)| over extracted pairs
  double max_distance = 0.0;        // max d(m,m') over extracted pairs
  double d_min_extracted = 0.0;
  bool intermediate_ok = false;     // d(m,m') <= d_min + |X|^2/(2t) for all pairs
  bool final_ok = false;            // max skew <= Delta~
  HalvingTrace trace;
};

inline TheoremReport theorem_check(const FiniteEnsemble& ens, std::uint64_t t,
                                   MonoSearchMode mode = MonoSearchMode::kExact,
                                   std::uint64_t guard = default_rv_extract_guard()) {
  ens.check();
  TheoremReport rep;
  rep.t = t;
  rep.extracted = monochromatic_rv_extract(ens, t, mode, guard);
  rep.m_prime = static_cast<int>(rep.extracted.size());
  if (rep.m_prime < 2) throw CheckError("extraction produced fewer than 2 variables");

  SignFunction f = build_f(ens, rep.extracted, t);

  const int nx = ens.alphabet_size;
  rep.steps = floor_log2(static_cast<std::uint64_t>(rep.m_prime));
  rep.truncated = 1 << rep.steps;
  std::vector<int> trunc(rep.extracted.begin(), rep.extracted.begin() + rep.truncated);
  rep.trace = run_halving(restrict_ensemble(ens, trunc));

  const int s = rep.steps;
  rep.delta_tilde_value = 2.0 * std::sqrt(static_cast<double>(nx) / s) +
                          static_cast<double>(nx) * nx / (2.0 * static_cast<double>(t));

  // d_min over the whole extracted set (>= pairs of the truncated subset)
  FiniteEnsemble sub = restrict_ensemble(ens, rep.extracted);
  Rational dmin = d_min_rv(sub);
  rep.d_min_extracted = to_double(dmin);

  const Rational cell_slack(Int(nx) * nx, 2 * Int(t));
  const Rational bound_sq(4 * Int(nx), s);
  Rational max_skew(0), max_dist(0);
  rep.intermediate_ok = true;
  rep.final_ok = true;
  for (int i = 0; i < sub.variable_count(); ++i) {
    for (int j = i + 1; j < sub.variable_count(); ++j) {
      Rational dist = distance(sub, i, j, f);
      if (dist > max_dist) max_dist = dist;
      if (dist > dmin + cell_slack) rep.intermediate_ok = false;
      for (int x = 0; x < nx; ++x) {
        for (int xp = x + 1; xp < nx; ++xp) {
          Rational d = skew(sub, i, j, x, xp);
          if (d < 0) d = -d;
          if (d > max_skew) max_skew = d;
          // exact check of d <= 2 sqrt(|X|/S) + |X|^2/(2t)
          Rational excess = d - cell_slack;
          if (excess > 0 && excess * excess > bound_sq) rep.final_ok = false;
        }
      }
    }
  }
  rep.max_skew_abs = to_double(max_skew);
  rep.max_distance = to_double(max_dist);

  // d_min over the extracted set is a min over more pairs than the truncated
  // subset, so the halving bound propagates to it
  if (dmin > rep.trace.d_min_at_pigeonhole)
    throw BoundViolationError("extracted d_min exceeds the propagated halving bound");
  if (!rep.intermediate_ok)
    throw BoundViolationError("pair distance exceeds d_min + |X|^2/(2t)");
  if (!rep.final_ok)
    throw BoundViolationError("pairwise skew exceeds Delta~");
  return rep;
}

}  // namespace zerorate
