#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace zerorate {

using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

// Transition probabilities smaller than this are treated as exact zeros
// when building support sets.
inline constexpr double kProbZero = 1e-15;

// Tolerance for validating that probability vectors / matrix rows sum to 1.
inline constexpr double kSumTol = 1e-12;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Errors.  Three families, matching the CLI exit codes: input validation (1),
// size guards (2), violated assertions or failed searches (3).
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ValidationError : Error {
  using Error::Error;
};
struct GuardError : Error {
  using Error::Error;
};
struct CheckError : Error {
  using Error::Error;
};

struct NonStochasticError : ValidationError {
  using ValidationError::ValidationError;
};
struct EmptyAlphabetError : ValidationError {
  using ValidationError::ValidationError;
};
struct DimensionMismatchError : ValidationError {
  using ValidationError::ValidationError;
};
struct EmptySupportError : ValidationError {
  using ValidationError::ValidationError;
};
struct ZeroErrorPositiveError : ValidationError {
  using ValidationError::ValidationError;
};
struct BadSubsetError : ValidationError {
  using ValidationError::ValidationError;
};
struct BadIndicesError : ValidationError {
  using ValidationError::ValidationError;
};
struct LengthMismatchError : ValidationError {
  using ValidationError::ValidationError;
};
struct OutOfSupportError : ValidationError {
  using ValidationError::ValidationError;
};
struct TooSmallError : ValidationError {
  using ValidationError::ValidationError;
};
struct TooFewCodewordsError : ValidationError {
  using ValidationError::ValidationError;
};
struct OddCountError : ValidationError {
  using ValidationError::ValidationError;
};
struct NotMonochromaticError : ValidationError {
  using ValidationError::ValidationError;
};
struct IoError : ValidationError {
  using ValidationError::ValidationError;
};

struct SizeGuardExceededError : GuardError {
  using GuardError::GuardError;
};

struct NonConvergenceError : CheckError {
  using CheckError::CheckError;
};
struct NoSubsetOfTargetSizeError : CheckError {
  using CheckError::CheckError;
};
struct HypothesisFailsError : CheckError {
  using CheckError::CheckError;
};
struct SignMismatchError : CheckError {
  using CheckError::CheckError;
};
struct BoundViolationError : CheckError {
  using CheckError::CheckError;
};

// ---------------------------------------------------------------------------
// Simplex points.  Used both for the weight vector over L+1 messages and for
// input distributions Q over the channel alphabet.
// ---------------------------------------------------------------------------

struct SimplexPoint {
  std::vector<double> weights;

  SimplexPoint() = default;

  explicit SimplexPoint(std::vector<double> w) : weights(std::move(w)) {
    if (weights.empty()) throw ValidationError("SimplexPoint: empty vector");
    double sum = 0.0;
    for (double v : weights) {
      if (v < 0.0 || !std::isfinite(v))
        throw ValidationError("SimplexPoint: negative or non-finite entry");
      sum += v;
    }
    if (std::abs(sum - 1.0) > kSumTol)
      throw ValidationError("SimplexPoint: entries sum to " + std::to_string(sum));
  }

  static SimplexPoint uniform(std::size_t d) {
    return SimplexPoint(std::vector<double>(d, 1.0 / static_cast<double>(d)));
  }

  std::size_t dim() const { return weights.size(); }
  double operator[](std::size_t k) const { return weights[k]; }
};

// Lexicographic order, used for deterministic tie-breaking among optimizers
// of equal value.
inline bool lex_less(const std::vector<double>& a, const std::vector<double>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// ---------------------------------------------------------------------------
// Compensated accumulation.  Error probabilities span many orders of
// magnitude at large blocklength, so all probability mass is accumulated in
// the log domain with Kahan compensation.
// ---------------------------------------------------------------------------

class KahanSum {
 public:
  void add(double v) {
    double y = v - comp_;
    double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

class LogSumExp {
 public:
  // Adds exp(log_term) to the running total.  -inf terms are ignored.
  void add(double log_term) {
    if (log_term == -kInf) return;
    if (log_term <= max_log_) {
      kahan_add(std::exp(log_term - max_log_));
    } else {
      double scale = (max_log_ == -kInf) ? 0.0 : std::exp(max_log_ - log_term);
      sum_ *= scale;
      comp_ *= scale;
      max_log_ = log_term;
      kahan_add(1.0);
    }
  }

  // log of the accumulated total; -inf when nothing was added.
  double log_value() const {
    if (max_log_ == -kInf) return -kInf;
    return max_log_ + std::log(sum_);
  }

  double value() const {
    double lv = log_value();
    return lv == -kInf ? 0.0 : std::exp(lv);
  }

 private:
  void kahan_add(double v) {
    double y = v - comp_;
    double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }

  double max_log_ = -kInf;
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// ---------------------------------------------------------------------------
// Deterministic random generation.  std::mt19937_64 provides the stream; the
// double conversion is done by hand so that results do not depend on the
// standard library's distribution implementations.
// ---------------------------------------------------------------------------

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

  std::uint64_t next_u64() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

  // Dirichlet(1,...,1) sample of dimension d.
  std::vector<double> next_simplex(std::size_t d) {
    std::vector<double> v(d);
    double sum = 0.0;
    for (auto& x : v) {
      double u = next_double();
      x = -std::log1p(-u);
      sum += x;
    }
    for (auto& x : v) x /= sum;
    // repair rounding so the sum is 1 within tolerance
    double s2 = std::accumulate(v.begin(), v.end(), 0.0);
    for (auto& x : v) x /= s2;
    return v;
  }

 private:
  std::uint64_t state_;
};

// ---------------------------------------------------------------------------
// Small combinatorics helpers (exact).
// ---------------------------------------------------------------------------

inline Int binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  Int r = 1;
  for (std::uint64_t i = 0; i < k; ++i) {
    r *= static_cast<std::uint64_t>(n - i);
    r /= static_cast<std::uint64_t>(i + 1);
  }
  return r;
}

// Multinomial coefficient n! / (c_1! ... c_k!) for counts summing to n.
inline Int multinomial(const std::vector<int>& counts) {
  Int r = 1;
  std::uint64_t seen = 0;
  for (int c : counts) {
    for (int i = 1; i <= c; ++i) {
      r *= static_cast<std::uint64_t>(++seen);
      r /= static_cast<std::uint64_t>(i);
    }
  }
  return r;
}

inline bool is_power_of_two(std::uint64_t m) { return m != 0 && (m & (m - 1)) == 0; }

inline int floor_log2(std::uint64_t m) {
  int s = -1;
  while (m) {
    m >>= 1;
    ++s;
  }
  return s;
}

}  // namespace zerorate
