#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "zerorate/common.hpp"

namespace zerorate {

// ---------------------------------------------------------------------------
// Maximization of a smooth concave function over the probability simplex by
// conditional gradient (Frank-Wolfe) with away steps and exact line search
// on the 1-D restriction.  The duality gap max_k grad_k - <alpha, grad> is a
// valid optimality certificate for concave objectives.
// ---------------------------------------------------------------------------

struct SimplexMaxResult {
  double value = 0.0;
  std::vector<double> argmax;
  int iterations = 0;
  double gap = 0.0;
};

struct SimplexMaxOptions {
  double gap_tol = 1e-9;
  int max_iterations = 100'000;
  int line_search_iters = 100;  // slope bisections per step
};

namespace detail {

inline void clamp_simplex(std::vector<double>& v) {
  double sum = 0.0;
  for (auto& x : v) {
    if (x < 0.0) x = 0.0;
    sum += x;
  }
  for (auto& x : v) x /= sum;
}

// Exact line search on a concave 1-D restriction by bisecting the slope
// g(gamma) = <dir, grad(alpha + gamma dir)>, which is nonincreasing.
// Assumes g(0) > 0.
inline double slope_bisection(const std::function<double(double)>& slope, double hi,
                              int iters) {
  if (slope(hi) >= 0.0) return hi;
  double lo = 0.0, up = hi;
  for (int i = 0; i < iters && up - lo > 1e-18; ++i) {
    double mid = 0.5 * (lo + up);
    if (slope(mid) > 0.0)
      lo = mid;
    else
      up = mid;
  }
  return 0.5 * (lo + up);
}

}  // namespace detail

// value_fn(alpha) and grad_fn(alpha) must describe the same concave function.
inline SimplexMaxResult maximize_over_simplex(
    std::size_t dim, const std::function<double(const std::vector<double>&)>& value_fn,
    const std::function<std::vector<double>(const std::vector<double>&)>& grad_fn,
    std::vector<double> start = {}, SimplexMaxOptions opt = {}) {
  std::vector<double> alpha =
      start.empty() ? std::vector<double>(dim, 1.0 / static_cast<double>(dim)) : std::move(start);

  SimplexMaxResult res;
  for (int it = 0;; ++it) {
    std::vector<double> grad = grad_fn(alpha);
    double inner = 0.0;
    for (std::size_t k = 0; k < dim; ++k) inner += alpha[k] * grad[k];

    std::size_t fw = 0, away = 0;
    bool have_away = false;
    for (std::size_t k = 0; k < dim; ++k) {
      if (grad[k] > grad[fw]) fw = k;
      if (alpha[k] > 1e-16 && (!have_away || grad[k] < grad[away])) {
        away = k;
        have_away = true;
      }
    }

    double gap = grad[fw] - inner;
    if (gap <= opt.gap_tol || it >= opt.max_iterations) {
      res.value = value_fn(alpha);
      res.argmax = alpha;
      res.iterations = it;
      res.gap = std::max(gap, 0.0);
      if (gap > opt.gap_tol)
        throw NonConvergenceError("simplex maximizer: duality gap " + std::to_string(gap) +
                                  " after " + std::to_string(it) + " iterations");
      return res;
    }

    // Choose between the forward direction (toward vertex fw) and the away
    // direction (off vertex `away`), whichever has the larger slope.
    double away_slope = have_away ? inner - grad[away] : -kInf;
    bool use_fw = gap >= away_slope;

    std::vector<double> dir(dim, 0.0);
    double gamma_max = 1.0;
    if (use_fw) {
      for (std::size_t k = 0; k < dim; ++k) dir[k] = (k == fw ? 1.0 : 0.0) - alpha[k];
    } else {
      double lam = alpha[away];
      if (lam >= 1.0 - 1e-16) {
        // single active vertex; away step impossible, fall back to forward
        for (std::size_t k = 0; k < dim; ++k) dir[k] = (k == fw ? 1.0 : 0.0) - alpha[k];
      } else {
        for (std::size_t k = 0; k < dim; ++k) dir[k] = alpha[k] - (k == away ? 1.0 : 0.0);
        gamma_max = lam / (1.0 - lam);
      }
    }

    auto slope = [&](double g) {
      std::vector<double> p(dim);
      for (std::size_t k = 0; k < dim; ++k) p[k] = alpha[k] + g * dir[k];
      detail::clamp_simplex(p);
      std::vector<double> gr = grad_fn(p);
      double s = 0.0;
      for (std::size_t k = 0; k < dim; ++k) s += dir[k] * gr[k];
      return s;
    };
    double gamma = detail::slope_bisection(slope, gamma_max, opt.line_search_iters);
    if (gamma <= 0.0) {
      res.value = value_fn(alpha);
      res.argmax = alpha;
      res.iterations = it;
      res.gap = gap;
      if (gap > opt.gap_tol)
        throw NonConvergenceError("simplex maximizer stalled with gap " + std::to_string(gap));
      return res;
    }
    for (std::size_t k = 0; k < dim; ++k) alpha[k] += gamma * dir[k];
    detail::clamp_simplex(alpha);
  }
}

// ---------------------------------------------------------------------------
// Euclidean projection onto the simplex (Duchi et al.)
// ---------------------------------------------------------------------------

inline std::vector<double> project_to_simplex(std::vector<double> v) {
  std::vector<double> u = v;
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0, theta = 0.0;
  int rho = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    css += u[i];
    double t = (css - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) {
      rho = static_cast<int>(i + 1);
      theta = t;
    }
  }
  (void)rho;
  for (auto& x : v) x = std::max(x - theta, 0.0);
  detail::clamp_simplex(v);
  return v;
}

// ---------------------------------------------------------------------------
// Projected gradient ascent over the simplex (for the non-concave product
// objective of the zero-rate optimizer; returns a stationary point).
// ---------------------------------------------------------------------------

struct ProjGradResult {
  double value = 0.0;
  std::vector<double> argmax;
  int iterations = 0;
  double stationarity = 0.0;  // ||P(x + grad) - x||_inf
};

inline ProjGradResult projected_gradient_ascent(
    std::vector<double> q, const std::function<double(const std::vector<double>&)>& value_fn,
    const std::function<std::vector<double>(const std::vector<double>&)>& grad_fn,
    int max_iters = 5000) {
  double fq = value_fn(q);
  int it = 0;
  for (; it < max_iters; ++it) {
    std::vector<double> grad = grad_fn(q);
    double step = 1.0;
    bool improved = false;
    for (int bt = 0; bt < 60; ++bt) {
      std::vector<double> cand(q.size());
      for (std::size_t k = 0; k < q.size(); ++k) cand[k] = q[k] + step * grad[k];
      cand = project_to_simplex(std::move(cand));
      double fc = value_fn(cand);
      if (fc > fq + 1e-16) {
        q = std::move(cand);
        fq = fc;
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  ProjGradResult res;
  res.value = fq;
  res.iterations = it;
  std::vector<double> grad = grad_fn(q);
  std::vector<double> probe(q.size());
  for (std::size_t k = 0; k < q.size(); ++k) probe[k] = q[k] + grad[k];
  probe = project_to_simplex(std::move(probe));
  double st = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k) st = std::max(st, std::abs(probe[k] - q[k]));
  res.stationarity = st;
  res.argmax = std::move(q);
  return res;
}

// ---------------------------------------------------------------------------
// Simplex grid enumeration: all points with entries j/steps.
// ---------------------------------------------------------------------------

inline void for_each_grid_point(std::size_t dim, int steps,
                                const std::function<void(const std::vector<double>&)>& fn) {
  std::vector<int> c(dim, 0);
  std::vector<double> p(dim, 0.0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t idx, int remaining) {
    if (idx == dim - 1) {
      c[idx] = remaining;
      for (std::size_t k = 0; k < dim; ++k) p[k] = static_cast<double>(c[k]) / steps;
      fn(p);
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      c[idx] = v;
      rec(idx + 1, remaining - v);
    }
  };
  rec(0, steps);
}

}  // namespace zerorate
