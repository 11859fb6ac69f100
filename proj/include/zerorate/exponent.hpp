#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "zerorate/channel.hpp"
#include "zerorate/code.hpp"
#include "zerorate/common.hpp"
#include "zerorate/ramsey.hpp"
#include "zerorate/simplex_opt.hpp"

namespace zerorate {

struct ExponentResult {
  double value = 0.0;
  SimplexPoint argmax;
  int iterations = 0;
  double gap = 0.0;
};

struct BoundReport {
  double d_min = 0.0;
  double plotkin_upper = 0.0;
  double correction = 0.0;  // C * Delta(M', t)
  double factor = 1.0;      // (M' / (M' - L))^(L+1)
  double constant_c = 0.0;  // max_alpha sum_x (mu_x(alpha) + mu_x(uniform))
  double max_q_term = 0.0;  // max_Q sum_x Q(x_1)...Q(x_{L+1}) mu_x(uniform)
  std::vector<int> witness_subset;
};

namespace detail {

// Precomputed per-subset data: distinct column tuples with their joint-type
// weights, supports, and log-probability tables.  Evaluates the concave dual
// objective f(alpha) = sum_x q(x) mu_x(alpha) and its simplex gradient
// grad_k = sum_x q(x) D(Q*_x(alpha) || P(.|x_k)), for which
// <alpha, grad> = f(alpha) holds exactly at every alpha.
class SubsetKernel {
 public:
  SubsetKernel(const Channel& ch, const Code& code, const std::vector<int>& subset)
      : dim_(subset.size()) {
    check_code_for_channel(code, ch);
    JointType q = joint_type(code, subset);
    for (const auto& [x, w] : q.weights) {
      Tuple t;
      t.weight = to_double(w);
      SupportSet s = support_set(ch, x);
      if (s.empty())
        throw EmptySupportError("subset column tuple has empty common support");
      t.logp.assign(dim_, std::vector<double>(s.size()));
      for (std::size_t k = 0; k < dim_; ++k)
        for (std::size_t i = 0; i < s.size(); ++i)
          t.logp[k][i] = ch.log_prob(x[k], s.outputs[i]);
      tuples_.push_back(std::move(t));
    }
  }

  std::size_t dim() const { return dim_; }

  double value(const std::vector<double>& alpha) const {
    double total = 0.0;
    for (const auto& t : tuples_) total += t.weight * mu(t, alpha);
    return total;
  }

  std::vector<double> gradient(const std::vector<double>& alpha) const {
    std::vector<double> g(dim_, 0.0);
    std::vector<double> qstar;
    for (const auto& t : tuples_) {
      tilt(t, alpha, qstar);
      for (std::size_t k = 0; k < dim_; ++k) {
        double kl = 0.0;
        for (std::size_t i = 0; i < qstar.size(); ++i)
          if (qstar[i] > 0.0) kl += qstar[i] * (std::log(qstar[i]) - t.logp[k][i]);
        g[k] += t.weight * kl;
      }
    }
    return g;
  }

  // max_k sum_x q(x) D(T_x || P(.|x_k)) for externally supplied product
  // types T (one distribution per tuple, indexed like the supports).
  double primal_value(const std::vector<std::vector<double>>& types) const {
    double best = -kInf;
    for (std::size_t k = 0; k < dim_; ++k) {
      double v = 0.0;
      for (std::size_t ti = 0; ti < tuples_.size(); ++ti) {
        const auto& t = tuples_[ti];
        const auto& T = types[ti];
        double kl = 0.0;
        for (std::size_t i = 0; i < T.size(); ++i)
          if (T[i] > 0.0) kl += T[i] * (std::log(T[i]) - t.logp[k][i]);
        v += t.weight * kl;
      }
      best = std::max(best, v);
    }
    return best;
  }

  std::vector<std::vector<double>> tilted_types(const std::vector<double>& alpha) const {
    std::vector<std::vector<double>> types;
    std::vector<double> qstar;
    for (const auto& t : tuples_) {
      tilt(t, alpha, qstar);
      types.push_back(qstar);
    }
    return types;
  }

  std::vector<std::size_t> support_sizes() const {
    std::vector<std::size_t> s;
    for (const auto& t : tuples_) s.push_back(t.logp.front().size());
    return s;
  }

 private:
  struct Tuple {
    double weight = 0.0;
    std::vector<std::vector<double>> logp;  // [k][support index]
  };

  double mu(const Tuple& t, const std::vector<double>& alpha) const {
    KahanSum sum;
    const std::size_t ny = t.logp.front().size();
    for (std::size_t i = 0; i < ny; ++i) {
      double lg = 0.0;
      for (std::size_t k = 0; k < dim_; ++k) lg += alpha[k] * t.logp[k][i];
      sum.add(std::exp(lg));
    }
    double v = -std::log(sum.value());
    return v < 0.0 && v > -kSumTol ? 0.0 : v;
  }

  void tilt(const Tuple& t, const std::vector<double>& alpha, std::vector<double>& q) const {
    const std::size_t ny = t.logp.front().size();
    q.assign(ny, 0.0);
    double max_lg = -kInf;
    for (std::size_t i = 0; i < ny; ++i) {
      double lg = 0.0;
      for (std::size_t k = 0; k < dim_; ++k) lg += alpha[k] * t.logp[k][i];
      q[i] = lg;
      max_lg = std::max(max_lg, lg);
    }
    double total = 0.0;
    for (auto& v : q) {
      v = std::exp(v - max_lg);
      total += v;
    }
    for (auto& v : q) v /= total;
  }

  std::size_t dim_;
  std::vector<Tuple> tuples_;
};

}  // namespace detail

// mu_M(alpha)/1, the per-block exponent kernel of a codeword group:
// n * sum_x q(x) mu_x(alpha), grouping equal columns together.
inline double mu_code(const Channel& ch, const Code& code, const std::vector<int>& subset,
                      const SimplexPoint& alpha) {
  check_code_for_channel(code, ch);
  check_subset(code, subset);
  if (alpha.dim() != subset.size())
    throw DimensionMismatchError("alpha dimension does not match subset size");
  JointType q = joint_type(code, subset);
  double total = 0.0;
  for (const auto& [x, w] : q.weights) total += to_double(w) * mu_x(ch, x, alpha);
  return static_cast<double>(code.blocklength()) * total;
}

// Direct sequence-sum route for mu_M(alpha):
// -log sum_{y in Y_hat^n} P_1(y)^a1 ... P_K(y)^aK.  Exponential in n; kept
// as the independent cross-check of mu_code.
inline double mu_code_sequence_sum(const Channel& ch, const Code& code,
                                   const std::vector<int>& subset, const SimplexPoint& alpha,
                                   std::uint64_t guard = 10'000'000ULL) {
  check_code_for_channel(code, ch);
  check_subset(code, subset);
  const int n = code.blocklength();
  const int ny = ch.output_size();
  double total_seq = std::pow(static_cast<double>(ny), n);
  if (!(total_seq <= static_cast<double>(guard)))
    throw SizeGuardExceededError("|Y|^n exceeds guard");

  LogSumExp acc;
  std::vector<int> y(n, 0);
  while (true) {
    double lg = 0.0;
    bool in_support = true;
    for (int i = 0; i < n && in_support; ++i) {
      for (std::size_t k = 0; k < subset.size(); ++k) {
        double lp = ch.log_prob(code.rows[subset[k]][i], y[i]);
        if (lp == -kInf) {
          in_support = false;
          break;
        }
        lg += alpha[k] * lp;
      }
    }
    if (in_support) acc.add(lg);
    int i = n - 1;
    while (i >= 0 && y[i] == ny - 1) y[i--] = 0;
    if (i < 0) break;
    ++y[i];
  }
  return -acc.log_value();
}

// D_m for one (L+1)-subset: maximizes the concave dual over the simplex.
// The subset is treated as unordered; indices are sorted internally.
inline ExponentResult d_subset(const Channel& ch, const Code& code, std::vector<int> subset,
                               SimplexMaxOptions opt = {}) {
  check_subset(code, subset);
  std::sort(subset.begin(), subset.end());
  detail::SubsetKernel kernel(ch, code, subset);
  SimplexMaxResult r = maximize_over_simplex(
      kernel.dim(), [&](const std::vector<double>& a) { return kernel.value(a); },
      [&](const std::vector<double>& a) { return kernel.gradient(a); }, {}, opt);
  ExponentResult res;
  res.value = r.value;
  res.argmax = SimplexPoint(r.argmax);
  res.iterations = r.iterations;
  res.gap = r.gap;
  return res;
}

struct DMinResult {
  ExponentResult best;
  std::vector<int> witness_subset;
};

inline std::uint64_t default_subset_guard() { return 1'000'000ULL; }

// Exhaustive minimum of d_subset over all unordered (L+1)-subsets.
inline DMinResult d_min(const Channel& ch, const Code& code, int list_size,
                        std::uint64_t guard = default_subset_guard()) {
  const int m = code.message_count();
  const int k = list_size + 1;
  if (k > m) throw BadSubsetError("code has fewer than L+1 codewords");
  Int count = binomial(static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(k));
  if (count > guard)
    throw SizeGuardExceededError("d_min over " + count.str() + " subsets (guard " +
                                 std::to_string(guard) + ")");

  DMinResult res;
  bool first = true;
  std::vector<int> subset(k);
  for (int i = 0; i < k; ++i) subset[i] = i;
  while (true) {
    ExponentResult r = d_subset(ch, code, subset);
    if (first || r.value < res.best.value) {
      res.best = r;
      res.witness_subset = subset;
      first = false;
    }
    int i = k - 1;
    while (i >= 0 && subset[i] == m - k + i) --i;
    if (i < 0) break;
    ++subset[i];
    for (int j = i + 1; j < k; ++j) subset[j] = subset[j - 1] + 1;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Zero-rate exponent E_L(0+).
// ---------------------------------------------------------------------------

enum class ZeroRateMethod { kMultistart, kGrid };

struct ZeroRateOptions {
  std::uint64_t seed = 0;
  int starts = 64;
  int grid_steps = 1000;  // grid resolution 1e-3
  int polish_iters = 5000;
};

namespace detail {

// mu_x at the uniform weight vector for every tuple in X^(L+1), flattened in
// row-major tuple order.  Values are cached per sorted multiset.
class ProductObjective {
 public:
  ProductObjective(const Channel& ch, int list_size) : nx_(ch.input_size()), k_(list_size + 1) {
    SimplexPoint uni = SimplexPoint::uniform(k_);
    std::map<InputTuple, double> cache;
    InputTuple t(k_, 0);
    std::size_t count = 1;
    for (int i = 0; i < k_; ++i) count *= static_cast<std::size_t>(nx_);
    mu_.resize(count);
    for (std::size_t idx = 0; idx < count; ++idx) {
      std::size_t rem = idx;
      for (int i = k_ - 1; i >= 0; --i) {
        t[i] = static_cast<int>(rem % nx_);
        rem /= nx_;
      }
      InputTuple sorted_t = t;
      std::sort(sorted_t.begin(), sorted_t.end());
      auto it = cache.find(sorted_t);
      if (it == cache.end()) it = cache.emplace(sorted_t, mu_x(ch, sorted_t, uni)).first;
      mu_[idx] = it->second;
    }
  }

  // F(Q) = sum_x Q(x_1)...Q(x_K) mu_x(uniform)
  double value(const std::vector<double>& q) const {
    double total = 0.0;
    std::size_t count = mu_.size();
    for (std::size_t idx = 0; idx < count; ++idx) {
      double w = 1.0;
      std::size_t rem = idx;
      for (int i = 0; i < k_; ++i) {
        w *= q[rem % nx_];
        rem /= nx_;
      }
      total += w * mu_[idx];
    }
    return total;
  }

  // dF/dQ(a) = K * sum_{x: x_1 = a} Q(x_2)...Q(x_K) mu_x (mu is symmetric).
  std::vector<double> gradient(const std::vector<double>& q) const {
    std::vector<double> g(nx_, 0.0);
    std::size_t count = mu_.size();
    std::size_t stride = count / nx_;  // index = x_1 * stride + rest
    for (std::size_t idx = 0; idx < count; ++idx) {
      std::size_t rem = idx;
      int x1 = static_cast<int>(idx / stride);
      double w = 1.0;
      rem = idx % stride;
      for (int i = 1; i < k_; ++i) {
        w *= q[rem % nx_];
        rem /= nx_;
      }
      g[x1] += static_cast<double>(k_) * w * mu_[idx];
    }
    return g;
  }

 private:
  int nx_;
  int k_;
  std::vector<double> mu_;
};

}  // namespace detail

inline ExponentResult zero_rate_exponent(const Channel& ch, int list_size,
                                         ZeroRateMethod method = ZeroRateMethod::kMultistart,
                                         ZeroRateOptions opt = {}) {
  if (!check_list_zero_error_vanishes(ch, list_size))
    throw ZeroErrorPositiveError("zero-error list capacity is positive; E_L(0+) is infinite");
  const int nx = ch.input_size();
  detail::ProductObjective obj(ch, list_size);
  auto value_fn = [&](const std::vector<double>& q) { return obj.value(q); };
  auto grad_fn = [&](const std::vector<double>& q) { return obj.gradient(q); };

  ExponentResult res;
  if (nx == 1) {
    res.value = value_fn({1.0});
    res.argmax = SimplexPoint(std::vector<double>{1.0});
    return res;
  }

  if (method == ZeroRateMethod::kGrid) {
    if (nx > 3)
      throw SizeGuardExceededError("grid method supports |X| <= 3; use multistart");
    double best = -kInf;
    std::vector<double> best_q;
    for_each_grid_point(static_cast<std::size_t>(nx), opt.grid_steps,
                        [&](const std::vector<double>& q) {
                          double v = value_fn(q);
                          if (v > best + 1e-15 || (std::abs(v - best) <= 1e-15 &&
                                                   (best_q.empty() || lex_less(q, best_q)))) {
                            best = v;
                            best_q = q;
                          }
                        });
    ProjGradResult polished = projected_gradient_ascent(best_q, value_fn, grad_fn,
                                                        opt.polish_iters);
    res.value = polished.value;
    res.argmax = SimplexPoint(polished.argmax);
    res.iterations = polished.iterations;
    res.gap = std::abs(polished.value - best);
    return res;
  }

  // Multistart projected gradient: uniform start plus seeded Dirichlet draws.
  Rng rng(opt.seed * 0x9e3779b97f4a7c15ULL + 1);
  ProjGradResult best;
  bool first = true;
  int total_iters = 0;
  for (int s = 0; s < opt.starts; ++s) {
    std::vector<double> q0 = s == 0 ? std::vector<double>(nx, 1.0 / nx)
                                    : rng.next_simplex(static_cast<std::size_t>(nx));
    ProjGradResult r = projected_gradient_ascent(std::move(q0), value_fn, grad_fn,
                                                 opt.polish_iters);
    total_iters += r.iterations;
    if (first || r.value > best.value + 1e-15 ||
        (std::abs(r.value - best.value) <= 1e-15 && lex_less(r.argmax, best.argmax))) {
      best = std::move(r);
      first = false;
    }
  }
  res.value = best.value;
  res.argmax = SimplexPoint(best.argmax);
  res.iterations = total_iters;
  res.gap = best.stationarity;
  return res;
}

// ---------------------------------------------------------------------------
// Plotkin column-averaging upper bound with the extraction correction term.
// ---------------------------------------------------------------------------

// C = max_alpha sum_{x in X^(L+1)} (mu_x(alpha) + mu_x(uniform)), finite
// under the standing assumption that the zero-error list capacity vanishes.
inline double plotkin_constant_c(const Channel& ch, int list_size) {
  if (!check_list_zero_error_vanishes(ch, list_size))
    throw ZeroErrorPositiveError("C is infinite: some tuple has empty common support");
  const int k = list_size + 1;
  const int nx = ch.input_size();
  std::vector<InputTuple> tuples;
  InputTuple t(k, 0);
  while (true) {
    tuples.push_back(t);
    int i = k - 1;
    while (i >= 0 && t[i] == nx - 1) t[i--] = 0;
    if (i < 0) break;
    ++t[i];
  }
  SimplexPoint uni = SimplexPoint::uniform(k);
  double const_term = 0.0;
  for (const auto& x : tuples) const_term += mu_x(ch, x, uni);

  auto value_fn = [&](const std::vector<double>& a) {
    SimplexPoint alpha(a);
    double v = 0.0;
    for (const auto& x : tuples) v += mu_x(ch, x, alpha);
    return v;
  };
  auto grad_fn = [&](const std::vector<double>& a) {
    SimplexPoint alpha(a);
    std::vector<double> g(k, 0.0);
    for (const auto& x : tuples) {
      std::vector<double> qs = q_star_x(ch, x, alpha);
      SupportSet s = support_set(ch, x);
      for (int kk = 0; kk < k; ++kk) {
        double kl = 0.0;
        for (std::size_t i = 0; i < qs.size(); ++i)
          if (qs[i] > 0.0)
            kl += qs[i] * (std::log(qs[i]) - ch.log_prob(x[kk], s.outputs[i]));
        g[kk] += kl;
      }
    }
    return g;
  };
  SimplexMaxResult r = maximize_over_simplex(static_cast<std::size_t>(k), value_fn, grad_fn);
  return r.value + const_term;
}

// Bound value at given extraction parameters (no subcode required):
// C * Delta(M', t) + (M'/(M'-L))^(L+1) * max_Q sum_x Q(x_1)...Q(x_{L+1}) mu_x.
inline BoundReport plotkin_upper_value(const Channel& ch, int list_size, std::uint64_t m_prime,
                                       std::uint64_t t, ZeroRateOptions opt = {}) {
  if (m_prime <= static_cast<std::uint64_t>(list_size))
    throw TooFewCodewordsError("need M' > L");
  const int k = list_size + 1;
  BoundReport rep;
  rep.constant_c = plotkin_constant_c(ch, list_size);
  double delta = delta_bound(m_prime, t, k, ch.input_size());
  rep.correction = rep.constant_c * delta;
  rep.factor = std::pow(static_cast<double>(m_prime) / static_cast<double>(m_prime - list_size),
                        k);
  rep.max_q_term = zero_rate_exponent(ch, list_size, ZeroRateMethod::kMultistart, opt).value;
  rep.plotkin_upper = rep.correction + rep.factor * rep.max_q_term;
  return rep;
}

// Full bound for an extracted subcode: computes d_min exhaustively and
// asserts the Plotkin-averaging inequality d_min <= bound.
inline BoundReport plotkin_upper_bound(const Channel& ch, const Code& subcode, int list_size,
                                       std::uint64_t t, ZeroRateOptions opt = {},
                                       std::uint64_t guard = default_subset_guard()) {
  const int m_prime = subcode.message_count();
  if (m_prime <= list_size) throw TooFewCodewordsError("need M' > L");
  BoundReport rep = plotkin_upper_value(ch, list_size, static_cast<std::uint64_t>(m_prime), t,
                                        opt);
  DMinResult dm = d_min(ch, subcode, list_size, guard);
  rep.d_min = dm.best.value;
  rep.witness_subset = dm.witness_subset;
  if (rep.d_min > rep.plotkin_upper + 1e-9)
    throw BoundViolationError("d_min exceeds the Plotkin upper bound");
  return rep;
}

// ---------------------------------------------------------------------------
// Sion exchange check: primal (min over product types of the max weighted
// divergence) against the dual (max over alpha) at the dual optimizer.
// ---------------------------------------------------------------------------

struct SionReport {
  double dual = 0.0;        // D_m from d_subset
  double primal = 0.0;      // max_k sum_x q(x) D(Q*_x(alpha*) || P(.|x_k))
  double gap = 0.0;         // |primal - dual|
  double weak_min = kInf;   // min over random product types of the primal value
  bool weak_duality_ok = true;
  int random_types = 0;
};

inline SionReport sion_exchange_check(const Channel& ch, const Code& code,
                                      std::vector<int> subset, double tol = 1e-6,
                                      int random_types = 100, std::uint64_t seed = 0) {
  check_subset(code, subset);
  std::sort(subset.begin(), subset.end());
  ExponentResult dual = d_subset(ch, code, subset);
  detail::SubsetKernel kernel(ch, code, subset);

  SionReport rep;
  rep.dual = dual.value;
  rep.primal = kernel.primal_value(kernel.tilted_types(dual.argmax.weights));
  rep.gap = std::abs(rep.primal - rep.dual);
  rep.random_types = random_types;

  Rng rng(seed * 0x2545f4914f6cdd1dULL + 7);
  auto sizes = kernel.support_sizes();
  for (int i = 0; i < random_types; ++i) {
    std::vector<std::vector<double>> types;
    types.reserve(sizes.size());
    for (std::size_t s : sizes) types.push_back(rng.next_simplex(s));
    double v = kernel.primal_value(types);
    rep.weak_min = std::min(rep.weak_min, v);
    if (v < rep.dual - tol) rep.weak_duality_ok = false;
  }
  if (rep.gap > tol)
    throw BoundViolationError("Sion exchange: |primal - dual| = " + std::to_string(rep.gap));
  if (!rep.weak_duality_ok)
    throw BoundViolationError("weak duality violated by a random product type");
  return rep;
}

}  // namespace zerorate
