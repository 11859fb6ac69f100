#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "zerorate/channel.hpp"
#include "zerorate/common.hpp"

namespace zerorate {

// ---------------------------------------------------------------------------
// Code: M codewords of length n over the input alphabet, 0-based symbols.
// ---------------------------------------------------------------------------

struct Code {
  std::vector<std::vector<int>> rows;  // rows[m][i]
  int alphabet_size = 0;

  int message_count() const { return static_cast<int>(rows.size()); }
  int blocklength() const { return rows.empty() ? 0 : static_cast<int>(rows.front().size()); }
  const std::vector<int>& codeword(int m) const { return rows[m]; }
};

inline Code make_code(std::vector<std::vector<int>> rows, int alphabet_size = 0) {
  if (rows.empty() || rows.front().empty())
    throw ValidationError("code needs at least one codeword of length >= 1");
  const std::size_t n = rows.front().size();
  int max_sym = 0;
  for (const auto& r : rows) {
    if (r.size() != n) throw LengthMismatchError("codewords have unequal length");
    for (int s : r) {
      if (s < 0) throw ValidationError("negative code symbol");
      max_sym = std::max(max_sym, s);
    }
  }
  Code c;
  c.rows = std::move(rows);
  c.alphabet_size = alphabet_size > 0 ? alphabet_size : max_sym + 1;
  if (c.alphabet_size <= max_sym) throw ValidationError("symbol exceeds declared alphabet");
  return c;
}

inline void check_code_for_channel(const Code& code, const Channel& ch) {
  for (const auto& r : code.rows)
    for (int s : r)
      if (s >= ch.input_size()) throw ValidationError("code symbol outside channel alphabet");
}

inline void check_subset(const Code& code, const std::vector<int>& subset) {
  if (subset.empty()) throw BadSubsetError("empty message subset");
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (subset[i] < 0 || subset[i] >= code.message_count())
      throw BadSubsetError("message index out of range");
    for (std::size_t j = i + 1; j < subset.size(); ++j)
      if (subset[i] == subset[j]) throw BadSubsetError("repeated message index");
  }
}

// ---------------------------------------------------------------------------
// Joint types and coordinate regions.
// ---------------------------------------------------------------------------

// Joint type of an ordered group of codewords: exact fraction of columns
// equal to each tuple.  Only tuples with positive weight are stored.
struct JointType {
  std::map<InputTuple, Rational> weights;

  Rational at(const InputTuple& x) const {
    auto it = weights.find(x);
    return it == weights.end() ? Rational(0) : it->second;
  }
};

// Coordinate regions I_x: the columns where the group shows tuple x.
struct RegionPartition {
  std::map<InputTuple, std::vector<int>> regions;  // 0-based coordinates
};

inline InputTuple column_tuple(const Code& code, const std::vector<int>& subset, int col) {
  InputTuple x(subset.size());
  for (std::size_t k = 0; k < subset.size(); ++k) x[k] = code.rows[subset[k]][col];
  return x;
}

inline RegionPartition region_partition(const Code& code, const std::vector<int>& subset) {
  check_subset(code, subset);
  RegionPartition part;
  for (int c = 0; c < code.blocklength(); ++c)
    part.regions[column_tuple(code, subset, c)].push_back(c);
  return part;
}

inline JointType joint_type(const Code& code, const std::vector<int>& subset) {
  check_subset(code, subset);
  JointType q;
  const Rational unit(1, code.blocklength());
  for (int c = 0; c < code.blocklength(); ++c) q.weights[column_tuple(code, subset, c)] += unit;
  return q;
}

// ---------------------------------------------------------------------------
// Conditional types.
// ---------------------------------------------------------------------------

// For each region I_x, the histogram of output symbols restricted to I_x,
// normalized by |I_x|.  Distributions are over Y_hat(x); counts are exact.
struct ConditionalType {
  struct Component {
    SupportSet support;           // Y_hat(x)
    std::vector<int> counts;      // indexed like support.outputs, sums to region_size
    int region_size = 0;          // |I_x|

    Rational weight(std::size_t i) const { return Rational(counts[i], region_size); }
  };
  std::map<InputTuple, Component> components;
};

inline ConditionalType conditional_type(const Channel& ch, const Code& code,
                                        const std::vector<int>& subset,
                                        const std::vector<int>& y) {
  check_code_for_channel(code, ch);
  if (static_cast<int>(y.size()) != code.blocklength())
    throw LengthMismatchError("output sequence length differs from blocklength");
  for (int s : y)
    if (s < 0 || s >= ch.output_size()) throw ValidationError("output symbol out of range");
  RegionPartition part = region_partition(code, subset);
  ConditionalType t;
  for (const auto& [x, coords] : part.regions) {
    ConditionalType::Component comp;
    comp.support = support_set(ch, x);
    comp.region_size = static_cast<int>(coords.size());
    comp.counts.assign(comp.support.size(), 0);
    for (int c : coords) {
      auto it = std::lower_bound(comp.support.outputs.begin(), comp.support.outputs.end(), y[c]);
      if (it == comp.support.outputs.end() || *it != y[c])
        throw OutOfSupportError("output symbol outside Y_hat for its region");
      comp.counts[static_cast<std::size_t>(it - comp.support.outputs.begin())]++;
    }
    t.components[x] = std::move(comp);
  }
  return t;
}

// ---------------------------------------------------------------------------
// Conditional type class enumeration.
// ---------------------------------------------------------------------------

struct TypeClass {
  ConditionalType type;
  Int class_size;  // number of sequences y in Y_hat^n with this type
};

inline std::uint64_t default_type_enum_guard() { return 10'000'000ULL; }

// Number of compositions of n into k nonnegative parts.
inline Int composition_count(int n, int k) {
  if (k == 0) return n == 0 ? 1 : 0;
  return binomial(static_cast<std::uint64_t>(n + k - 1), static_cast<std::uint64_t>(k - 1));
}

// Calls fn for every conditional type realizable within the supports
// Y_hat(x), exactly once, with its exact class size
// prod_x multinomial(|I_x|; counts).  Single consumer per call; independent
// calls may run concurrently.
inline void for_each_conditional_type(const Channel& ch, const Code& code,
                                      const std::vector<int>& subset,
                                      const std::function<void(const TypeClass&)>& fn,
                                      std::uint64_t guard = default_type_enum_guard()) {
  check_code_for_channel(code, ch);
  RegionPartition part = region_partition(code, subset);

  struct Region {
    InputTuple x;
    SupportSet support;
    int size;
  };
  std::vector<Region> regions;
  Int total = 1;
  for (const auto& [x, coords] : part.regions) {
    Region r{x, support_set(ch, x), static_cast<int>(coords.size())};
    total *= composition_count(r.size, static_cast<int>(r.support.size()));
    regions.push_back(std::move(r));
  }
  if (total > guard)
    throw SizeGuardExceededError("conditional type lattice has " + total.str() +
                                 " classes (guard " + std::to_string(guard) + ")");

  TypeClass tc;
  tc.class_size = 1;
  std::vector<Int> sizes(regions.size(), 1);

  // Depth-first over regions; within a region, over compositions of |I_x|
  // into |Y_hat(x)| parts.
  std::function<void(std::size_t)> rec = [&](std::size_t ri) {
    if (ri == regions.size()) {
      tc.class_size = 1;
      for (const Int& s : sizes) tc.class_size *= s;
      fn(tc);
      return;
    }
    const Region& r = regions[ri];
    const int parts = static_cast<int>(r.support.size());
    if (parts == 0) {
      if (r.size == 0) {
        rec(ri + 1);
        return;
      }
      return;  // no realizable y for this region
    }
    std::vector<int> counts(parts, 0);
    std::function<void(int, int)> comp = [&](int idx, int remaining) {
      if (idx == parts - 1) {
        counts[idx] = remaining;
        ConditionalType::Component c;
        c.support = r.support;
        c.counts = counts;
        c.region_size = r.size;
        tc.type.components[r.x] = std::move(c);
        sizes[ri] = multinomial(counts);
        rec(ri + 1);
        return;
      }
      for (int v = 0; v <= remaining; ++v) {
        counts[idx] = v;
        comp(idx + 1, remaining - v);
      }
    };
    comp(0, r.size);
    tc.type.components.erase(r.x);
  };
  rec(0);
}

// ---------------------------------------------------------------------------
// Column compositions (Plotkin-style counting).
// ---------------------------------------------------------------------------

// Per-column counts M_c(x): how many codewords show symbol x in column c.
struct ColumnComposition {
  std::vector<std::vector<int>> counts;  // counts[c][x]
};

inline ColumnComposition column_composition(const Code& code) {
  ColumnComposition cc;
  cc.counts.assign(code.blocklength(), std::vector<int>(code.alphabet_size, 0));
  for (const auto& row : code.rows)
    for (int c = 0; c < code.blocklength(); ++c) cc.counts[c][row[c]]++;
  return cc;
}

}  // namespace zerorate
