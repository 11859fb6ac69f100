#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "zerorate/common.hpp"

namespace zerorate {

// A sequence of input symbols (x_1,...,x_K), 0-based.  For list decoding
// with list size L the natural length is K = L+1.
using InputTuple = std::vector<int>;

// Output symbols on which every row P(.|x_k) of a tuple is positive.
struct SupportSet {
  std::vector<int> outputs;  // sorted ascending

  bool empty() const { return outputs.empty(); }
  std::size_t size() const { return outputs.size(); }
};

// ---------------------------------------------------------------------------
// Channel: a row-stochastic |X| x |Y| transition matrix.
// ---------------------------------------------------------------------------

class Channel {
 public:
  Channel(int input_size, int output_size, std::vector<double> probs)
      : nx_(input_size), ny_(output_size), p_(std::move(probs)) {
    log_p_.resize(p_.size());
    for (std::size_t i = 0; i < p_.size(); ++i)
      log_p_[i] = p_[i] < kProbZero ? -kInf : std::log(p_[i]);
  }

  int input_size() const { return nx_; }
  int output_size() const { return ny_; }

  double prob(int x, int y) const { return p_[static_cast<std::size_t>(x) * ny_ + y]; }
  double log_prob(int x, int y) const { return log_p_[static_cast<std::size_t>(x) * ny_ + y]; }
  bool positive(int x, int y) const { return prob(x, y) >= kProbZero; }

  std::vector<std::vector<double>> matrix() const {
    std::vector<std::vector<double>> m(nx_, std::vector<double>(ny_));
    for (int x = 0; x < nx_; ++x)
      for (int y = 0; y < ny_; ++y) m[x][y] = prob(x, y);
    return m;
  }

 private:
  int nx_ = 0;
  int ny_ = 0;
  std::vector<double> p_;      // row-major
  std::vector<double> log_p_;  // -inf where the entry is a support zero
};

// Validates a raw matrix as a channel.  Rows whose sums deviate from 1 by
// more than the tolerance are rejected, otherwise renormalized.
inline Channel validate_channel(const std::vector<std::vector<double>>& matrix) {
  if (matrix.empty() || matrix.front().empty())
    throw EmptyAlphabetError("channel matrix is empty");
  const std::size_t ny = matrix.front().size();
  std::vector<double> flat;
  flat.reserve(matrix.size() * ny);
  for (const auto& row : matrix) {
    if (row.size() != ny) throw NonStochasticError("channel matrix is ragged");
    double sum = 0.0;
    for (double v : row) {
      if (!std::isfinite(v) || v < 0.0)
        throw NonStochasticError("negative or non-finite transition probability");
      sum += v;
    }
    if (std::abs(sum - 1.0) > kSumTol)
      throw NonStochasticError("row sums to " + std::to_string(sum));
    for (double v : row) flat.push_back(v / sum);
  }
  return Channel(static_cast<int>(matrix.size()), static_cast<int>(ny), std::move(flat));
}

inline void check_tuple(const Channel& ch, const InputTuple& tuple) {
  if (tuple.size() < 2) throw ValidationError("input tuple needs at least 2 symbols");
  for (int x : tuple)
    if (x < 0 || x >= ch.input_size()) throw ValidationError("tuple symbol out of range");
}

// Y_hat(x): outputs y with P(y|x_1)...P(y|x_K) > 0.  Empty is a legal result.
inline SupportSet support_set(const Channel& ch, const InputTuple& tuple) {
  check_tuple(ch, tuple);
  SupportSet s;
  for (int y = 0; y < ch.output_size(); ++y) {
    bool all = true;
    for (int x : tuple) {
      if (!ch.positive(x, y)) {
        all = false;
        break;
      }
    }
    if (all) s.outputs.push_back(y);
  }
  return s;
}

namespace detail {

// Enumerates multisets of size k from {0,...,nx-1} (non-decreasing tuples).
// Product supports are permutation invariant, so multisets suffice.
template <typename Fn>
bool for_each_multiset(int nx, int k, Fn&& fn) {
  std::vector<int> t(k, 0);
  while (true) {
    if (!fn(t)) return false;
    int i = k - 1;
    while (i >= 0 && t[i] == nx - 1) --i;
    if (i < 0) return true;
    int v = t[i] + 1;
    for (int j = i; j < k; ++j) t[j] = v;
  }
}

}  // namespace detail

// True iff the L-list zero-error capacity is zero, i.e. every set of L+1
// inputs shares at least one positive output.
inline bool check_list_zero_error_vanishes(const Channel& ch, int list_size) {
  if (list_size < 1) throw ValidationError("list size must be >= 1");
  const int k = list_size + 1;
  return detail::for_each_multiset(ch.input_size(), k, [&](const InputTuple& t) {
    return !support_set(ch, t).empty();
  });
}

namespace detail {

// Canonical (symbol, alpha) pairing: sorting makes mu_x bit-for-bit invariant
// under simultaneous permutations of the tuple and alpha.
inline std::vector<std::pair<int, double>> canonical_pairs(const InputTuple& tuple,
                                                           const SimplexPoint& alpha) {
  std::vector<std::pair<int, double>> pairs(tuple.size());
  for (std::size_t k = 0; k < tuple.size(); ++k) pairs[k] = {tuple[k], alpha[k]};
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

}  // namespace detail

// mu_x(alpha) = -log sum_{y in Y_hat} prod_k P(y|x_k)^{alpha_k}, in nats.
inline double mu_x(const Channel& ch, const InputTuple& tuple, const SimplexPoint& alpha) {
  if (alpha.dim() != tuple.size())
    throw DimensionMismatchError("alpha dimension does not match tuple length");
  SupportSet s = support_set(ch, tuple);
  if (s.empty()) throw EmptySupportError("tuple has empty common support");
  auto pairs = detail::canonical_pairs(tuple, alpha);
  KahanSum sum;
  for (int y : s.outputs) {
    double lg = 0.0;
    for (const auto& [x, a] : pairs) lg += a * ch.log_prob(x, y);
    sum.add(std::exp(lg));
  }
  double v = -std::log(sum.value());
  if (v < 0.0 && v > -kSumTol) v = 0.0;  // Hoelder guarantees v >= 0
  return v;
}

// The minimizing tilted distribution Q*_x(y) on Y_hat(x): the normalized
// geometric mixture of the rows with exponents alpha.
inline std::vector<double> q_star_x(const Channel& ch, const InputTuple& tuple,
                                    const SimplexPoint& alpha) {
  if (alpha.dim() != tuple.size())
    throw DimensionMismatchError("alpha dimension does not match tuple length");
  SupportSet s = support_set(ch, tuple);
  if (s.empty()) throw EmptySupportError("tuple has empty common support");
  auto pairs = detail::canonical_pairs(tuple, alpha);
  std::vector<double> q(s.size());
  double max_lg = -kInf;
  for (std::size_t i = 0; i < s.size(); ++i) {
    double lg = 0.0;
    for (const auto& [x, a] : pairs) lg += a * ch.log_prob(x, s.outputs[i]);
    q[i] = lg;
    max_lg = std::max(max_lg, lg);
  }
  double total = 0.0;
  for (auto& v : q) {
    v = std::exp(v - max_lg);
    total += v;
  }
  for (auto& v : q) v /= total;
  return q;  // indexed like s.outputs
}

// KL divergence sum p log(p/q) in nats; +inf when p puts mass where q = 0.
inline double kl_divergence(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw DimensionMismatchError("KL over different alphabets");
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return kInf;
    d += p[i] * std::log(p[i] / q[i]);
  }
  return d < 0.0 && d > -kSumTol ? 0.0 : d;
}

}  // namespace zerorate
