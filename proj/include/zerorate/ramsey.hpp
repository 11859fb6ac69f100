#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "zerorate/code.hpp"
#include "zerorate/common.hpp"

namespace zerorate {

// ---------------------------------------------------------------------------
// Edge coloring by quantized joint types.
// ---------------------------------------------------------------------------

// One cell index in {0,...,t-1} per tuple x in X^K, flattened in row-major
// tuple order.  Cell = floor(t*q) with q = 1 clamped to the last cell, so a
// boundary value q = j/t goes to the upper cell.
using ColorVector = std::vector<int>;

namespace detail {

inline int quantize_unit(const Rational& q, std::uint64_t t) {
  Int cell = (Int(t) * numerator(q)) / denominator(q);
  if (cell >= Int(t)) cell = Int(t) - 1;
  return cell.convert_to<int>();
}

inline std::size_t tuple_index(const InputTuple& x, int nx) {
  std::size_t idx = 0;
  for (int s : x) idx = idx * static_cast<std::size_t>(nx) + static_cast<std::size_t>(s);
  return idx;
}

}  // namespace detail

inline ColorVector color_edge(const Code& code, const std::vector<int>& ordered_subset,
                              std::uint64_t t) {
  if (t < 1) throw ValidationError("quantization t must be >= 1");
  check_subset(code, ordered_subset);
  const int nx = code.alphabet_size;
  std::size_t count = 1;
  for (std::size_t i = 0; i < ordered_subset.size(); ++i)
    count *= static_cast<std::size_t>(nx);
  ColorVector color(count, 0);
  JointType q = joint_type(code, ordered_subset);
  for (const auto& [x, w] : q.weights)
    color[detail::tuple_index(x, nx)] = detail::quantize_unit(w, t);
  return color;
}

// ---------------------------------------------------------------------------
// Monochromatic subset search on a complete K-uniform hypergraph whose edges
// (K-subsets in increasing vertex order) are colored by an arbitrary
// callback.  Shared by the joint-type coloring here and by the pairwise-skew
// coloring of the halving module.
// ---------------------------------------------------------------------------

enum class MonoSearchMode { kExact, kGreedy };

namespace detail {

using EdgeColorFn = std::function<ColorVector(const std::vector<int>&)>;

template <typename Fn>
void for_each_combination(const std::vector<int>& items, int k, Fn&& fn) {
  const int m = static_cast<int>(items.size());
  if (k > m) return;
  std::vector<int> pos(k);
  for (int i = 0; i < k; ++i) pos[i] = i;
  std::vector<int> subset(k);
  while (true) {
    for (int i = 0; i < k; ++i) subset[i] = items[pos[i]];
    fn(subset);
    int i = k - 1;
    while (i >= 0 && pos[i] == m - k + i) --i;
    if (i < 0) return;
    ++pos[i];
    for (int j = i + 1; j < k; ++j) pos[j] = pos[j - 1] + 1;
  }
}

// All K-subset colors computed once; searches below only do lookups.
class EdgeColorCache {
 public:
  EdgeColorCache(int vertex_count, int k, const EdgeColorFn& color) {
    std::vector<int> vertices(vertex_count);
    for (int i = 0; i < vertex_count; ++i) vertices[i] = i;
    for_each_combination(vertices, k,
                         [&](const std::vector<int>& e) { colors_[e] = color(e); });
  }

  const ColorVector& at(const std::vector<int>& edge) const { return colors_.at(edge); }
  const std::map<std::vector<int>, ColorVector>& all() const { return colors_; }

 private:
  std::map<std::vector<int>, ColorVector> colors_;
};

// Maximum clique on a bitset graph with a greedy-coloring bound; used for
// K = 2, where a monochromatic set is a clique in one color class.
class MaxClique {
 public:
  explicit MaxClique(int n) : n_(n), words_((n + 63) / 64), adj_(n, Row(words_, 0)) {}

  void add_edge(int a, int b) {
    adj_[a][b >> 6] |= 1ULL << (b & 63);
    adj_[b][a >> 6] |= 1ULL << (a & 63);
  }

  std::vector<int> run(std::size_t floor_size) {
    best_.clear();
    best_floor_ = floor_size;
    Row all(words_, 0);
    for (int v = 0; v < n_; ++v) all[v >> 6] |= 1ULL << (v & 63);
    std::vector<int> r;
    expand(r, all);
    return best_;
  }

 private:
  using Row = std::vector<std::uint64_t>;

  static int count(const Row& row) {
    int c = 0;
    for (std::uint64_t w : row) c += std::popcount(w);
    return c;
  }

  std::size_t bound() const { return std::max(best_.size(), best_floor_); }

  // greedy coloring upper bound on the clique number of the candidate set
  int color_bound(const Row& cand) const {
    Row rest = cand;
    int classes = 0;
    while (count(rest) > 0) {
      ++classes;
      Row cls = rest;
      for (int v = 0; v < n_; ++v) {
        if (!(cls[v >> 6] & (1ULL << (v & 63)))) continue;
        // v joins this class; exclude its neighbours from the class
        for (int w = 0; w < words_; ++w) cls[w] &= ~adj_[v][w];
        cls[v >> 6] |= 1ULL << (v & 63);
        rest[v >> 6] &= ~(1ULL << (v & 63));
      }
    }
    return classes;
  }

  void expand(std::vector<int>& r, Row cand) {
    int cnt = count(cand);
    if (r.size() + cnt <= bound()) return;
    if (r.size() + color_bound(cand) <= bound()) return;
    for (int v = 0; v < n_; ++v) {
      if (!(cand[v >> 6] & (1ULL << (v & 63)))) continue;
      cnt = count(cand);
      if (r.size() + cnt <= bound()) return;
      cand[v >> 6] &= ~(1ULL << (v & 63));
      r.push_back(v);
      Row next(words_);
      bool any = false;
      for (int w = 0; w < words_; ++w) {
        next[w] = cand[w] & adj_[v][w];
        any |= next[w] != 0;
      }
      if (r.size() > best_.size()) best_ = r;
      if (any) expand(r, next);
      r.pop_back();
    }
  }

  int n_;
  int words_;
  std::vector<Row> adj_;
  std::vector<int> best_;
  std::size_t best_floor_ = 0;
};

// Branch and bound for the maximum subset whose K-subsets all carry color
// `target` (K >= 3).  Vertices are explored in increasing order.
class ExactMonoSearch {
 public:
  ExactMonoSearch(int vertex_count, int k, const EdgeColorCache& cache)
      : verts_(vertex_count), k_(k), cache_(cache) {
    for (int i = 0; i < vertex_count; ++i) verts_[i] = i;
  }

  std::vector<int> run(const std::vector<ColorVector>& palette) {
    best_.clear();
    for (const auto& c : palette) {
      target_ = &c;
      std::vector<int> chosen;
      grow(chosen, verts_);
    }
    if (static_cast<int>(best_.size()) < std::min<int>(k_ - 1, static_cast<int>(verts_.size()))) {
      // sets smaller than K are vacuously monochromatic
      best_.assign(verts_.begin(),
                   verts_.begin() + std::min<std::size_t>(verts_.size(), k_ - 1));
    }
    return best_;
  }

 private:
  void grow(std::vector<int>& chosen, const std::vector<int>& cands) {
    if (chosen.size() + cands.size() <= best_.size()) return;
    if (cands.empty()) {
      if (chosen.size() > best_.size()) best_ = chosen;
      return;
    }
    for (std::size_t i = 0; i < cands.size(); ++i) {
      if (chosen.size() + (cands.size() - i) <= best_.size()) return;
      int v = cands[i];
      chosen.push_back(v);
      std::vector<int> next;
      for (std::size_t j = i + 1; j < cands.size(); ++j)
        if (compatible(chosen, cands[j])) next.push_back(cands[j]);
      if (chosen.size() > best_.size()) best_ = chosen;
      grow(chosen, next);
      chosen.pop_back();
    }
  }

  // All new K-subsets formed by appending u (as the largest element) must
  // carry the target color.
  bool compatible(const std::vector<int>& chosen, int u) {
    if (static_cast<int>(chosen.size()) < k_ - 1) return true;
    bool ok = true;
    for_each_combination(chosen, k_ - 1, [&](const std::vector<int>& head) {
      if (!ok) return;
      std::vector<int> edge = head;
      edge.push_back(u);
      if (cache_.at(edge) != *target_) ok = false;
    });
    return ok;
  }

  std::vector<int> verts_;
  int k_;
  const EdgeColorCache& cache_;
  const ColorVector* target_ = nullptr;
  std::vector<int> best_;
};

// The Ramsey-proof recursion: pin the first vertex, recursively extract a
// monochromatic set for the induced (K-1)-uniform coloring, keep the pinned
// vertex's tag, and finish with the majority tag class.
inline std::vector<int> greedy_mono(const std::vector<int>& vertices, int k,
                                    const EdgeColorFn& color) {
  if (k == 1) {
    std::map<ColorVector, std::vector<int>> classes;
    for (int v : vertices) classes[color({v})].push_back(v);
    const std::vector<int>* best = nullptr;
    for (const auto& [c, members] : classes)
      if (!best || members.size() > best->size()) best = &members;
    return best ? *best : std::vector<int>{};
  }

  struct Pinned {
    int v;
    std::optional<ColorVector> tag;
  };
  std::vector<Pinned> pinned;
  std::vector<int> pool = vertices;
  while (!pool.empty()) {
    int v = pool.front();
    std::vector<int> rest(pool.begin() + 1, pool.end());
    if (static_cast<int>(rest.size()) < k - 1) {
      pinned.push_back({v, std::nullopt});
      for (int u : rest) pinned.push_back({u, std::nullopt});
      break;
    }
    EdgeColorFn induced = [&](const std::vector<int>& tail) {
      std::vector<int> edge;
      edge.reserve(tail.size() + 1);
      edge.push_back(v);
      edge.insert(edge.end(), tail.begin(), tail.end());
      return color(edge);
    };
    std::vector<int> kept = greedy_mono(rest, k - 1, induced);
    if (static_cast<int>(kept.size()) < k - 1) {
      pinned.push_back({v, std::nullopt});
      for (int u : kept) pinned.push_back({u, std::nullopt});
      break;
    }
    std::vector<int> first_edge(kept.begin(), kept.begin() + (k - 1));
    pinned.push_back({v, induced(first_edge)});
    pool = std::move(kept);
  }

  std::map<ColorVector, std::vector<int>> groups;
  for (const auto& p : pinned)
    if (p.tag) groups[*p.tag].push_back(p.v);
  const std::vector<int>* best = nullptr;
  ColorVector best_tag;
  for (const auto& [tag, members] : groups) {
    if (!best || members.size() > best->size()) {
      best = &members;
      best_tag = tag;
    }
  }
  std::vector<int> result;
  if (best) result = *best;
  for (const auto& p : pinned)
    if (!p.tag) result.push_back(p.v);
  std::sort(result.begin(), result.end());
  return result;
}

inline std::vector<int> mono_search(int vertex_count, int k, const EdgeColorFn& color,
                                    MonoSearchMode mode, std::uint64_t exact_guard) {
  std::vector<int> vertices(vertex_count);
  for (int i = 0; i < vertex_count; ++i) vertices[i] = i;
  if (vertex_count < k) return vertices;  // vacuously monochromatic

  if (mode == MonoSearchMode::kGreedy) {
    EdgeColorCache cache(vertex_count, k, color);
    EdgeColorFn cached = [&cache](const std::vector<int>& e) { return cache.at(e); };
    return greedy_mono(vertices, k, cached);
  }

  if (static_cast<std::uint64_t>(vertex_count) > exact_guard)
    throw SizeGuardExceededError("exact monochromatic search guard: " +
                                 std::to_string(vertex_count) + " vertices (guard " +
                                 std::to_string(exact_guard) + ")");
  EdgeColorCache cache(vertex_count, k, color);

  // distinct edge colors, largest class first (helps pruning)
  std::map<ColorVector, int> class_sizes;
  for (const auto& [e, c] : cache.all()) class_sizes[c]++;
  std::vector<std::pair<int, ColorVector>> ordered;
  for (auto& [c, sz] : class_sizes) ordered.push_back({-sz, c});
  std::sort(ordered.begin(), ordered.end());

  if (k == 2) {
    std::vector<int> best;
    for (auto& [neg_size, target] : ordered) {
      // a monochromatic set of size s needs s(s-1)/2 same-color edges
      std::size_t edges = static_cast<std::size_t>(-neg_size);
      if (best.size() >= 2 && edges < best.size() * (best.size() + 1) / 2) continue;
      MaxClique mc(vertex_count);
      for (const auto& [e, c] : cache.all())
        if (c == target) mc.add_edge(e[0], e[1]);
      std::vector<int> got = mc.run(best.size());
      if (got.size() > best.size()) best = got;
    }
    return best;
  }

  std::vector<ColorVector> palette;
  for (auto& [neg, c] : ordered) palette.push_back(c);
  ExactMonoSearch search(vertex_count, k, cache);
  return search.run(palette);
}

}  // namespace detail

inline bool is_monochromatic(const std::vector<int>& indices, int k,
                             const detail::EdgeColorFn& color) {
  if (static_cast<int>(indices.size()) < k) return true;
  std::optional<ColorVector> ref;
  bool ok = true;
  detail::for_each_combination(indices, k, [&](const std::vector<int>& e) {
    if (!ok) return;
    ColorVector c = color(e);
    if (!ref)
      ref = std::move(c);
    else if (c != *ref)
      ok = false;
  });
  return ok;
}

inline std::uint64_t default_exact_mono_guard(int k) { return k == 2 ? 40 : 16; }

// Extracts a subset of messages whose ordered K-subsets all share one
// quantized joint-type color.  Exact mode returns a maximum such subset;
// greedy mode follows the Ramsey-proof recursion.
inline std::vector<int> find_monochromatic_subset(const Code& code, int k, std::uint64_t t,
                                                  MonoSearchMode mode = MonoSearchMode::kExact,
                                                  int target_size = 0,
                                                  std::uint64_t exact_guard = 0) {
  if (k < 2) throw ValidationError("K must be >= 2");
  if (exact_guard == 0) exact_guard = default_exact_mono_guard(k);
  detail::EdgeColorFn color = [&](const std::vector<int>& subset) {
    return color_edge(code, subset, t);
  };
  std::vector<int> res =
      detail::mono_search(code.message_count(), k, color, mode, exact_guard);
  if (mode == MonoSearchMode::kExact && target_size > 0 &&
      static_cast<int>(res.size()) < target_size)
    throw NoSubsetOfTargetSizeError("largest monochromatic subset has " +
                                    std::to_string(res.size()) + " < " +
                                    std::to_string(target_size) + " members");
  return res;
}

// Removes the last K-2 codewords, which upgrades the extracted subcode to
// satisfy the diagonal (epsilon) condition as well.
inline std::vector<int> trim_last(const std::vector<int>& subcode_indices, int k) {
  const int drop = k - 2;
  if (static_cast<int>(subcode_indices.size()) < k + drop)
    throw TooSmallError("need at least K + (K-2) codewords before trimming");
  return std::vector<int>(subcode_indices.begin(), subcode_indices.end() - drop);
}

// ---------------------------------------------------------------------------
// Verification of the two deviation hypotheses with the cell-midpoint
// reference values r_x.
// ---------------------------------------------------------------------------

struct KomlosConditionReport {
  bool epsilon_ok = true;
  bool delta_ok = true;
  Rational epsilon;  // |X|^(K-2) / (2t)
  Rational delta;    // 1 / (2t)
  // first violations, when any
  std::vector<int> epsilon_witness_pair;
  std::vector<int> delta_witness_subset;
  InputTuple delta_witness_tuple;
};

inline KomlosConditionReport check_komlos_conditions(const Code& code,
                                                     const std::vector<int>& indices, int k,
                                                     std::uint64_t t) {
  if (static_cast<int>(indices.size()) < k)
    throw TooSmallError("need at least K codewords to check the conditions");
  const int nx = code.alphabet_size;

  KomlosConditionReport rep;
  rep.delta = Rational(1, 2 * Int(t));
  Int x_pow = 1;
  for (int i = 0; i < k - 2; ++i) x_pow *= nx;
  rep.epsilon = Rational(x_pow, 2 * Int(t));

  // reference cells from the first ordered K-subset
  std::vector<int> first_edge(indices.begin(), indices.begin() + k);
  ColorVector ref = color_edge(code, first_edge, t);
  auto midpoint = [&](std::size_t flat) {
    return Rational(2 * ref[flat] + 1, 2 * Int(t));  // (2c+1)/(2t)
  };

  // delta condition: every ordered K-subset within delta of the midpoints
  detail::for_each_combination(indices, k, [&](const std::vector<int>& subset) {
    if (!rep.delta_ok) return;
    JointType q = joint_type(code, subset);
    InputTuple x(k, 0);
    std::size_t count = 1;
    for (int i = 0; i < k; ++i) count *= static_cast<std::size_t>(nx);
    for (std::size_t flat = 0; flat < count; ++flat) {
      std::size_t rem = flat;
      for (int i = k - 1; i >= 0; --i) {
        x[i] = static_cast<int>(rem % nx);
        rem /= nx;
      }
      Rational diff = q.at(x) - midpoint(flat);
      if (diff < 0) diff = -diff;
      if (diff > rep.delta) {
        rep.delta_ok = false;
        rep.delta_witness_subset = subset;
        rep.delta_witness_tuple = x;
        return;
      }
    }
  });

  // epsilon condition: pair diagonals within epsilon of r = sum of midpoints
  // over the diagonal extensions (x, x, *, ..., *)
  for (int x = 0; x < nx && rep.epsilon_ok; ++x) {
    Rational r(0);
    std::size_t ext_count = 1;
    for (int i = 0; i < k - 2; ++i) ext_count *= static_cast<std::size_t>(nx);
    for (std::size_t e = 0; e < ext_count; ++e) {
      InputTuple full(k);
      full[0] = full[1] = x;
      std::size_t rem = e;
      for (int i = k - 1; i >= 2; --i) {
        full[i] = static_cast<int>(rem % nx);
        rem /= nx;
      }
      r += midpoint(detail::tuple_index(full, nx));
    }
    for (std::size_t i = 0; i < indices.size() && rep.epsilon_ok; ++i) {
      for (std::size_t j = i + 1; j < indices.size(); ++j) {
        std::vector<int> pair{indices[i], indices[j]};
        JointType q = joint_type(code, pair);
        Rational diff = q.at(InputTuple{x, x}) - r;
        if (diff < 0) diff = -diff;
        if (diff > rep.epsilon) {
          rep.epsilon_ok = false;
          rep.epsilon_witness_pair = pair;
          break;
        }
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Exact permutation deviation max |q_m(x) - q_m(x')| over ordered subsets,
// tuples, and permutations.
// ---------------------------------------------------------------------------

struct PermutationDeviationReport {
  Rational max_deviation;
  std::vector<int> witness_subset;
  InputTuple witness_tuple;
  InputTuple witness_permutation;
};

inline Int factorial(int k) {
  Int f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

inline PermutationDeviationReport permutation_deviation(const Code& code,
                                                        const std::vector<int>& indices, int k,
                                                        std::uint64_t guard = 10'000'000ULL) {
  if (static_cast<int>(indices.size()) < k)
    throw TooSmallError("need at least K codewords");
  Int x_pow = 1;
  for (int i = 0; i < k; ++i) x_pow *= code.alphabet_size;
  Int work = binomial(indices.size(), static_cast<std::uint64_t>(k)) * x_pow * factorial(k);
  if (work > guard)
    throw SizeGuardExceededError("permutation deviation work " + work.str() + " (guard " +
                                 std::to_string(guard) + ")");

  PermutationDeviationReport rep;
  rep.max_deviation = 0;
  detail::for_each_combination(indices, k, [&](const std::vector<int>& subset) {
    JointType q = joint_type(code, subset);
    // group occurring tuples by multiset and scan the full permutation orbit
    std::map<InputTuple, bool> seen;
    for (const auto& [x, w] : q.weights) {
      InputTuple sorted_x = x;
      std::sort(sorted_x.begin(), sorted_x.end());
      if (seen.count(sorted_x)) continue;
      seen[sorted_x] = true;
      Rational lo, hi;
      InputTuple lo_t, hi_t;
      bool first = true;
      InputTuple perm = sorted_x;
      do {
        Rational v = q.at(perm);
        if (first || v > hi) {
          hi = v;
          hi_t = perm;
        }
        if (first || v < lo) {
          lo = v;
          lo_t = perm;
        }
        first = false;
      } while (std::next_permutation(perm.begin(), perm.end()));
      Rational dev = hi - lo;
      if (dev > rep.max_deviation) {
        rep.max_deviation = dev;
        rep.witness_subset = subset;
        rep.witness_tuple = hi_t;
        rep.witness_permutation = lo_t;
      }
    }
  });
  return rep;
}

// ---------------------------------------------------------------------------
// Deviation bound formulas.
// ---------------------------------------------------------------------------

// Delta(M', t) = 2K^3 sqrt(2K/M') + 4K^3 sqrt(|X|^(K-2)/(2t)) + (K^2+2)/(2t)
inline double delta_bound(std::uint64_t m_prime, std::uint64_t t, int k, int alphabet_size) {
  if (m_prime < 1 || t < 1) throw ValidationError("need M' >= 1 and t >= 1");
  double k3 = static_cast<double>(k) * k * k;
  double eps = std::pow(static_cast<double>(alphabet_size), k - 2) / (2.0 * t);
  return 2.0 * k3 * std::sqrt(2.0 * k / static_cast<double>(m_prime)) +
         4.0 * k3 * std::sqrt(eps) +
         (static_cast<double>(k) * k + 2.0) / (2.0 * static_cast<double>(t));
}

// The K=2 constants of the original probabilistic statement, recorded for
// comparison only: 6/sqrt(M') + 4/sqrt(2t) + 1/t.
inline double komlos_reference_delta(std::uint64_t m_prime, std::uint64_t t) {
  return 6.0 / std::sqrt(static_cast<double>(m_prime)) +
         4.0 / std::sqrt(2.0 * static_cast<double>(t)) + 1.0 / static_cast<double>(t);
}

// ---------------------------------------------------------------------------
// Full extraction pipeline: monochromatic search, trim, condition checks,
// and the deviation bound.
// ---------------------------------------------------------------------------

struct SubcodeReport {
  std::vector<int> indices;   // trimmed subcode, increasing message indices
  int m_prime = 0;            // its size
  std::uint64_t t = 0;
  Rational epsilon;           // |X|^(K-2) / (2t)
  Rational delta;             // 1 / (2t)
  double delta_bound_value = 0.0;  // Delta(M', t)
  Rational max_deviation;          // observed max |q_m(x) - q_m(x')|
  bool conditions_ok = false;
  bool deviation_within_bound = false;
  int pre_trim_size = 0;
};

inline SubcodeReport extract_subcode(const Code& code, int k, std::uint64_t t,
                                     MonoSearchMode mode = MonoSearchMode::kExact,
                                     int target_size = 0, std::uint64_t exact_guard = 0,
                                     std::uint64_t deviation_guard = 10'000'000ULL) {
  SubcodeReport rep;
  rep.t = t;
  std::vector<int> mono = find_monochromatic_subset(code, k, t, mode, target_size, exact_guard);
  rep.pre_trim_size = static_cast<int>(mono.size());
  rep.indices = trim_last(mono, k);
  rep.m_prime = static_cast<int>(rep.indices.size());

  KomlosConditionReport cond = check_komlos_conditions(code, rep.indices, k, t);
  rep.epsilon = cond.epsilon;
  rep.delta = cond.delta;
  rep.conditions_ok = cond.epsilon_ok && cond.delta_ok;

  PermutationDeviationReport dev =
      permutation_deviation(code, rep.indices, k, deviation_guard);
  rep.max_deviation = dev.max_deviation;
  rep.delta_bound_value = delta_bound(static_cast<std::uint64_t>(rep.m_prime), t, k,
                                      code.alphabet_size);
  rep.deviation_within_bound = to_double(rep.max_deviation) <= rep.delta_bound_value;
  return rep;
}

// ---------------------------------------------------------------------------
// Averaged-indicator inequality check: if all pair diagonals q_{m,m'}(x,x)
// are within epsilon of r_x, then for all m < m',
// int (chi_bar_m - chi_bar_m')^2 dP <= (2/m)(1 - m/m') + 4 eps (1 - m/m')^2,
// under the uniform-coordinate measure of the code.
// ---------------------------------------------------------------------------

struct Lemma1Report {
  bool conclusion_ok = true;
  int pairs_checked = 0;
  Rational max_lhs;          // largest left-hand side seen
  std::vector<int> worst_pair;
};

inline Lemma1Report komlos_lemma1_check(const Code& code, int x, const Rational& r_x,
                                        const Rational& epsilon) {
  const int m_total = code.message_count();
  const int n = code.blocklength();
  if (x < 0 || x >= code.alphabet_size) throw ValidationError("symbol out of range");

  // hypothesis first
  for (int a = 0; a < m_total; ++a) {
    for (int b = a + 1; b < m_total; ++b) {
      Int cnt = 0;
      for (int i = 0; i < n; ++i)
        if (code.rows[a][i] == x && code.rows[b][i] == x) ++cnt;
      Rational diff = Rational(cnt, n) - r_x;
      if (diff < 0) diff = -diff;
      if (diff > epsilon)
        throw HypothesisFailsError("pair (" + std::to_string(a) + "," + std::to_string(b) +
                                   ") violates the epsilon hypothesis");
    }
  }

  // prefix counts c_m(i) = #{j <= m : x_{j,i} = x}, 1-based prefixes
  std::vector<std::vector<Int>> prefix(m_total + 1, std::vector<Int>(n, 0));
  for (int m = 1; m <= m_total; ++m)
    for (int i = 0; i < n; ++i)
      prefix[m][i] = prefix[m - 1][i] + (code.rows[m - 1][i] == x ? 1 : 0);

  Lemma1Report rep;
  rep.max_lhs = 0;
  for (int m = 1; m < m_total; ++m) {
    for (int mp = m + 1; mp <= m_total; ++mp) {
      Rational lhs(0);
      for (int i = 0; i < n; ++i) {
        Rational d = Rational(prefix[m][i], m) - Rational(prefix[mp][i], mp);
        lhs += d * d;
      }
      lhs /= n;
      Rational beta = Rational(mp - m, mp);  // 1 - m/m'
      Rational rhs = Rational(2, m) * beta + Rational(4) * epsilon * beta * beta;
      ++rep.pairs_checked;
      if (lhs > rep.max_lhs) {
        rep.max_lhs = lhs;
        rep.worst_pair = {m, mp};
      }
      if (lhs > rhs) {
        rep.conclusion_ok = false;
        rep.worst_pair = {m, mp};
        throw BoundViolationError("averaged-indicator bound violated at pair (" +
                                  std::to_string(m) + "," + std::to_string(mp) + ")");
      }
    }
  }
  return rep;
}

}  // namespace zerorate
