#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <vector>

#include "zerorate/channel.hpp"
#include "zerorate/code.hpp"
#include "zerorate/common.hpp"
#include "zerorate/exponent.hpp"

namespace zerorate {

struct DecodingOutcome {
  enum class Method { kDirect, kTypes, kPair };

  std::vector<double> per_message_error;  // P_{e,m}
  double average = 0.0;
  double maximal = 0.0;
  Method method = Method::kDirect;
  // mass of output sequences outside Y_hat^n, reported separately; such
  // sequences never contribute to the error of a positive-probability
  // message when M = L+1
  std::vector<double> outside_support_mass;
};

inline std::uint64_t default_sequence_guard() { return 10'000'000ULL; }

// P_m(y) = prod_i P(y_i | x_{m,i}); log-domain product, exponentiated.
inline double likelihood(const Channel& ch, const Code& code, int m, const std::vector<int>& y) {
  check_code_for_channel(code, ch);
  if (m < 0 || m >= code.message_count()) throw BadIndicesError("message index out of range");
  if (static_cast<int>(y.size()) != code.blocklength())
    throw LengthMismatchError("output sequence length differs from blocklength");
  double lg = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    double lp = ch.log_prob(code.rows[m][i], y[i]);
    if (lp == -kInf) return 0.0;
    lg += lp;
  }
  return std::exp(lg);
}

namespace detail {

// Canonical per-message log-likelihood evaluation through the histogram of
// (column tuple, output symbol) pairs.  Sequences with the same conditional
// type produce bit-identical log-likelihoods, which makes maximum-likelihood
// ties exact and keeps the direct and type-class computations consistent.
class CodeLikelihood {
 public:
  CodeLikelihood(const Channel& ch, const Code& code) : ch_(ch), ny_(ch.output_size()) {
    check_code_for_channel(code, ch);
    std::vector<int> all(code.message_count());
    std::iota(all.begin(), all.end(), 0);
    RegionPartition part = region_partition(code, all);
    for (const auto& [x, coords] : part.regions) regions_.push_back({x, coords});
    counts_.assign(regions_.size(), std::vector<int>(ny_, 0));
  }

  std::size_t region_count() const { return regions_.size(); }

  // log-likelihood of every message for the sequence y
  void evaluate(const std::vector<int>& y, std::vector<double>& ll, int message_count) {
    for (std::size_t r = 0; r < regions_.size(); ++r) {
      std::fill(counts_[r].begin(), counts_[r].end(), 0);
      for (int c : regions_[r].coords) counts_[r][y[c]]++;
    }
    ll.assign(message_count, 0.0);
    for (std::size_t r = 0; r < regions_.size(); ++r) {
      const InputTuple& x = regions_[r].tuple;
      for (int out = 0; out < ny_; ++out) {
        int c = counts_[r][out];
        if (c == 0) continue;
        for (int m = 0; m < message_count; ++m)
          ll[m] += static_cast<double>(c) * ch_.log_prob(x[m], out);
      }
    }
  }

 private:
  struct Region {
    InputTuple tuple;
    std::vector<int> coords;
  };
  const Channel& ch_;
  int ny_;
  std::vector<Region> regions_;
  std::vector<std::vector<int>> counts_;
};

// Indices of the L messages with the largest log-likelihood, ties broken by
// smallest message index.  Returned sorted ascending.
inline std::vector<int> keep_list(const std::vector<double>& ll, int list_size) {
  std::vector<int> order(ll.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return ll[a] > ll[b]; });
  order.resize(list_size);
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace detail

// Maximum-likelihood list decoding: the L messages of largest P_m(y).
inline std::vector<int> ml_list_decode(const Channel& ch, const Code& code,
                                       const std::vector<int>& y, int list_size) {
  if (list_size < 1 || list_size > code.message_count())
    throw ValidationError("need 1 <= L <= M");
  if (static_cast<int>(y.size()) != code.blocklength())
    throw LengthMismatchError("output sequence length differs from blocklength");
  for (int s : y)
    if (s < 0 || s >= ch.output_size()) throw ValidationError("output symbol out of range");
  detail::CodeLikelihood eval(ch, code);
  std::vector<double> ll;
  eval.evaluate(y, ll, code.message_count());
  return detail::keep_list(ll, list_size);
}

// Exact error probabilities by enumeration of all |Y|^n output sequences.
inline DecodingOutcome error_probabilities_direct(const Channel& ch, const Code& code,
                                                  int list_size,
                                                  std::uint64_t guard = default_sequence_guard()) {
  if (list_size < 1 || list_size > code.message_count())
    throw ValidationError("need 1 <= L <= M");
  const int n = code.blocklength();
  const int ny = ch.output_size();
  const int m_count = code.message_count();
  if (std::pow(static_cast<double>(ny), n) > static_cast<double>(guard))
    throw SizeGuardExceededError("|Y|^n exceeds the sequence guard");

  detail::CodeLikelihood eval(ch, code);
  std::vector<LogSumExp> err(m_count);
  std::vector<LogSumExp> outside(m_count);
  std::vector<double> ll;
  std::vector<int> y(n, 0);
  std::vector<char> kept(m_count);
  while (true) {
    eval.evaluate(y, ll, m_count);
    bool in_support = true;
    for (int m = 0; m < m_count; ++m)
      if (ll[m] == -kInf) {
        in_support = false;
        break;
      }
    std::vector<int> list = detail::keep_list(ll, list_size);
    std::fill(kept.begin(), kept.end(), 0);
    for (int m : list) kept[m] = 1;
    for (int m = 0; m < m_count; ++m) {
      if (!kept[m] && ll[m] != -kInf) err[m].add(ll[m]);
      if (!in_support && ll[m] != -kInf) outside[m].add(ll[m]);
    }
    int i = n - 1;
    while (i >= 0 && y[i] == ny - 1) y[i--] = 0;
    if (i < 0) break;
    ++y[i];
  }

  DecodingOutcome out;
  out.method = DecodingOutcome::Method::kDirect;
  out.per_message_error.resize(m_count);
  out.outside_support_mass.resize(m_count);
  double sum = 0.0, mx = 0.0;
  for (int m = 0; m < m_count; ++m) {
    out.per_message_error[m] = err[m].value();
    out.outside_support_mass[m] = outside[m].value();
    sum += out.per_message_error[m];
    mx = std::max(mx, out.per_message_error[m]);
  }
  out.average = sum / m_count;
  out.maximal = mx;
  return out;
}

// Exact error probabilities for a subset of L+1 messages by iterating
// conditional-type classes within Y_hat^n.  Classes are assigned to the
// message of largest weighted divergence, i.e. the message of smallest
// log-likelihood (the two orderings are identical up to an additive entropy
// constant); accumulation is class size times per-sequence probability.
// Sequences outside Y_hat^n are decoded correctly for every message of
// positive probability; their mass is reported separately.
inline DecodingOutcome error_probabilities_via_types(
    const Channel& ch, const Code& code, const std::vector<int>& subset, int list_size,
    std::uint64_t guard = default_type_enum_guard()) {
  check_subset(code, subset);
  if (static_cast<int>(subset.size()) != list_size + 1)
    throw BadSubsetError("types method needs a subset of exactly L+1 messages");

  Code sub;
  sub.alphabet_size = code.alphabet_size;
  for (int m : subset) sub.rows.push_back(code.rows[m]);
  const int m_count = list_size + 1;
  std::vector<int> all(m_count);
  std::iota(all.begin(), all.end(), 0);

  std::vector<LogSumExp> err(m_count);
  std::vector<LogSumExp> in_support(m_count);
  std::vector<double> ll(m_count);
  std::vector<char> kept(m_count);
  for_each_conditional_type(
      ch, sub, all,
      [&](const TypeClass& tc) {
        // canonical log-likelihoods: identical float operations to the
        // per-sequence histogram evaluation used by the direct method
        std::fill(ll.begin(), ll.end(), 0.0);
        for (const auto& [x, comp] : tc.type.components) {
          for (std::size_t i = 0; i < comp.support.size(); ++i) {
            int c = comp.counts[i];
            if (c == 0) continue;
            for (int m = 0; m < m_count; ++m)
              ll[m] += static_cast<double>(c) * ch.log_prob(x[m], comp.support.outputs[i]);
          }
        }
        double log_size = std::log(tc.class_size.convert_to<double>());
        std::vector<int> list = detail::keep_list(ll, list_size);
        std::fill(kept.begin(), kept.end(), 0);
        for (int m : list) kept[m] = 1;
        for (int m = 0; m < m_count; ++m) {
          in_support[m].add(log_size + ll[m]);
          if (!kept[m]) err[m].add(log_size + ll[m]);
        }
      },
      guard);

  DecodingOutcome out;
  out.method = DecodingOutcome::Method::kTypes;
  out.per_message_error.resize(m_count);
  out.outside_support_mass.resize(m_count);
  double sum = 0.0, mx = 0.0;
  for (int m = 0; m < m_count; ++m) {
    out.per_message_error[m] = err[m].value();
    out.outside_support_mass[m] = std::max(0.0, 1.0 - in_support[m].value());
    sum += out.per_message_error[m];
    mx = std::max(mx, out.per_message_error[m]);
  }
  out.average = sum / m_count;
  out.maximal = mx;
  return out;
}

// ---------------------------------------------------------------------------
// Fast path for M = 2, L = 1: the log-likelihood ratio is a sum of
// independent per-coordinate steps, so its exact distribution factors over
// groups of equal column pairs.  Enables blocklengths around 10^3.
// ---------------------------------------------------------------------------

inline DecodingOutcome error_probabilities_pair(const Channel& ch, const Code& code,
                                                std::uint64_t guard = default_sequence_guard()) {
  check_code_for_channel(code, ch);
  if (code.message_count() != 2) throw BadSubsetError("pair fast path needs exactly M = 2");

  struct Group {
    int a, b, n;
    std::vector<int> support;  // Y_hat(a,b)
  };
  // groups in the same lexicographic column-tuple order as the region
  // partition, so per-profile log-likelihoods are accumulated with exactly
  // the same float operations as the per-sequence histogram evaluation
  // (ties then resolve identically)
  std::map<std::pair<int, int>, int> group_count;
  for (int i = 0; i < code.blocklength(); ++i)
    group_count[{code.rows[0][i], code.rows[1][i]}]++;

  std::vector<Group> groups;
  for (const auto& [ab, cnt] : group_count) {
    auto [a, b] = ab;
    SupportSet s = support_set(ch, InputTuple{a, b});
    if (s.empty()) {
      // no sequence is jointly reachable: every received sequence rules one
      // message out with certainty, so no error mass at all
      DecodingOutcome out;
      out.method = DecodingOutcome::Method::kPair;
      out.per_message_error = {0.0, 0.0};
      out.outside_support_mass = {1.0, 1.0};
      out.average = 0.0;
      out.maximal = 0.0;
      return out;
    }
    groups.push_back({a, b, cnt, s.outputs});
  }

  double combos = 1.0;
  for (const auto& g : groups)
    combos *= composition_count(g.n, static_cast<int>(g.support.size())).convert_to<double>();
  if (combos > static_cast<double>(guard))
    throw SizeGuardExceededError("pair fast path: too many composition profiles");

  LogSumExp err0, err1;
  // depth-first over the product of per-group compositions; l0/l1 carry the
  // canonical per-sequence log-likelihoods, lmult the log profile count
  std::vector<std::vector<int>> comp(groups.size());
  std::function<void(std::size_t, double, double, double)> rec =
      [&](std::size_t gi, double l0, double l1, double lmult) {
        if (gi == groups.size()) {
          if (l0 >= l1) {
            // message 0 kept (ties keep the lower index), message 1 dropped
            if (l1 != -kInf) err1.add(lmult + l1);
          } else {
            if (l0 != -kInf) err0.add(lmult + l0);
          }
          return;
        }
        const Group& g = groups[gi];
        const int parts = static_cast<int>(g.support.size());
        std::vector<int>& c = comp[gi];
        c.assign(parts, 0);
        std::function<void(int, int)> fill = [&](int idx, int remaining) {
          if (idx == parts - 1) {
            c[idx] = remaining;
            double n0 = l0, n1 = l1;
            for (int i = 0; i < parts; ++i) {
              if (c[i] == 0) continue;
              n0 += static_cast<double>(c[i]) * ch.log_prob(g.a, g.support[i]);
              n1 += static_cast<double>(c[i]) * ch.log_prob(g.b, g.support[i]);
            }
            rec(gi + 1, n0, n1,
                lmult + std::log(multinomial(c).convert_to<double>()));
            return;
          }
          for (int v = 0; v <= remaining; ++v) {
            c[idx] = v;
            fill(idx + 1, remaining - v);
          }
        };
        fill(0, g.n);
      };
  rec(0, 0.0, 0.0, 0.0);

  DecodingOutcome out;
  out.method = DecodingOutcome::Method::kPair;
  out.per_message_error = {err0.value(), err1.value()};
  out.average = 0.5 * (out.per_message_error[0] + out.per_message_error[1]);
  out.maximal = std::max(out.per_message_error[0], out.per_message_error[1]);
  out.outside_support_mass = {0.0, 0.0};
  return out;
}

// ---------------------------------------------------------------------------
// Finite-blocklength lower bound
// P_e_max >= (L+1)^{-1} (n+1)^{-|X|^{L+1}|Y|} exp(-n D')
// with D' the minimum over the conditional-type lattice of the witness
// subset of the maximum weighted divergence.
// ---------------------------------------------------------------------------

struct LowerBoundReport {
  double p_e_max = 0.0;
  double log_p_e_max = -kInf;
  double d_prime = 0.0;        // lattice min-max divergence
  double log_rhs = -kInf;      // log of the lower bound
  double empirical_exponent = 0.0;  // -ln(P_e_max)/n
  double d_min = 0.0;          // D_min(C), for comparison
  double sandwich_rhs = 0.0;   // D' + (|X|^{L+1}|Y| ln(n+1) + ln(L+1))/n
  std::vector<int> witness_subset;
  bool holds = false;
};

inline LowerBoundReport verify_lower_bound(const Channel& ch, const Code& code, int list_size,
                                           std::uint64_t subset_guard = default_subset_guard(),
                                           std::uint64_t seq_guard = default_sequence_guard(),
                                           std::uint64_t type_guard = default_type_enum_guard()) {
  const int n = code.blocklength();
  LowerBoundReport rep;

  DMinResult dm = d_min(ch, code, list_size, subset_guard);
  rep.d_min = dm.best.value;
  rep.witness_subset = dm.witness_subset;

  // D' over the finite type lattice of the witness subset
  Code sub;
  sub.alphabet_size = code.alphabet_size;
  for (int m : rep.witness_subset) sub.rows.push_back(code.rows[m]);
  std::vector<int> all(sub.message_count());
  std::iota(all.begin(), all.end(), 0);
  JointType q = joint_type(sub, all);

  double d_prime = kInf;
  for_each_conditional_type(
      ch, sub, all,
      [&](const TypeClass& tc) {
        double worst = -kInf;
        for (int k = 0; k < sub.message_count(); ++k) {
          double v = 0.0;
          for (const auto& [x, comp] : tc.type.components) {
            double w = to_double(q.at(x));
            double kl = 0.0;
            for (std::size_t i = 0; i < comp.support.size(); ++i) {
              if (comp.counts[i] == 0) continue;
              double t = static_cast<double>(comp.counts[i]) / comp.region_size;
              kl += t * (std::log(t) - ch.log_prob(x[k], comp.support.outputs[i]));
            }
            v += w * kl;
          }
          worst = std::max(worst, v);
        }
        d_prime = std::min(d_prime, worst);
      },
      type_guard);
  rep.d_prime = d_prime;

  DecodingOutcome exact = error_probabilities_direct(ch, code, list_size, seq_guard);
  rep.p_e_max = exact.maximal;
  rep.log_p_e_max = std::log(exact.maximal);

  const double exps = std::pow(static_cast<double>(ch.input_size()), list_size + 1) *
                      static_cast<double>(ch.output_size());
  rep.log_rhs = -static_cast<double>(n) * d_prime - exps * std::log(n + 1.0) -
                std::log(list_size + 1.0);
  rep.empirical_exponent = -rep.log_p_e_max / n;
  rep.sandwich_rhs =
      d_prime + (exps * std::log(n + 1.0) + std::log(list_size + 1.0)) / n;
  rep.holds = rep.log_p_e_max >= rep.log_rhs - 1e-9;
  if (!rep.holds)
    throw BoundViolationError("finite-n lower bound violated: log P_e_max = " +
                              std::to_string(rep.log_p_e_max) + " < " +
                              std::to_string(rep.log_rhs));
  return rep;
}

}  // namespace zerorate
