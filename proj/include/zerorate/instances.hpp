#pragma once

#include <vector>

#include "zerorate/channel.hpp"
#include "zerorate/code.hpp"
#include "zerorate/common.hpp"

namespace zerorate {

// Random channels and codes for verification suites.  All draws come from
// the explicit splitmix-based generator, so instances are reproducible
// across platforms for a fixed seed.

// Full-support channel: every entry at least floor/(1 + floor*|Y|) > 0.
inline Channel random_channel(Rng& rng, int nx, int ny, double floor_mass = 0.05) {
  std::vector<std::vector<double>> m(nx, std::vector<double>(ny));
  for (auto& row : m) {
    double sum = 0.0;
    for (auto& v : row) {
      v = floor_mass + rng.next_double();
      sum += v;
    }
    for (auto& v : row) v /= sum;
  }
  return validate_channel(m);
}

// Channel with structural zeros: each entry is zeroed with the given
// probability, keeping at least one positive entry per row.
inline Channel random_channel_with_zeros(Rng& rng, int nx, int ny, double zero_prob = 0.25) {
  std::vector<std::vector<double>> m(nx, std::vector<double>(ny));
  for (auto& row : m) {
    double sum = 0.0;
    while (sum == 0.0) {
      sum = 0.0;
      for (auto& v : row) {
        v = rng.next_double() < zero_prob ? 0.0 : 0.05 + rng.next_double();
        sum += v;
      }
    }
    for (auto& v : row) v /= sum;
  }
  return validate_channel(m);
}

inline Code random_code(Rng& rng, int m_count, int n, int alphabet) {
  std::vector<std::vector<int>> rows(m_count, std::vector<int>(n));
  for (auto& row : rows)
    for (auto& s : row) s = static_cast<int>(rng.next_below(alphabet));
  return make_code(std::move(rows), alphabet);
}

inline Channel bsc(double p) {
  return validate_channel({{1.0 - p, p}, {p, 1.0 - p}});
}

// Two-codeword repetition pair (0^n, 1^n).
inline Code pair_code(int n) {
  return make_code({std::vector<int>(n, 0), std::vector<int>(n, 1)}, 2);
}

}  // namespace zerorate
