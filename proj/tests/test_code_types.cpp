#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>

#include "zerorate/code.hpp"
#include "zerorate/decoder.hpp"
#include "zerorate/instances.hpp"

using namespace zerorate;

TEST_CASE("joint_type hand counts") {
  Code c = make_code({{0, 0, 1, 1}, {0, 1, 0, 1}});
  JointType q = joint_type(c, {0, 1});
  CHECK(q.at({0, 0}) == Rational(1, 4));
  CHECK(q.at({0, 1}) == Rational(1, 4));
  CHECK(q.at({1, 0}) == Rational(1, 4));
  CHECK(q.at({1, 1}) == Rational(1, 4));

  Code same = make_code({{0, 1, 0}, {0, 1, 0}});
  JointType qd = joint_type(same, {0, 1});
  CHECK(qd.at({0, 0}) == Rational(2, 3));
  CHECK(qd.at({1, 1}) == Rational(1, 3));
  CHECK(qd.at({0, 1}) == Rational(0));

  CHECK_THROWS_AS(joint_type(c, {0, 0}), BadSubsetError);
}

TEST_CASE("region_partition hand counts") {
  Code c = make_code({{0, 0, 1, 1}, {0, 1, 0, 1}});
  RegionPartition p = region_partition(c, {0, 1});
  CHECK(p.regions.at({0, 0}) == std::vector<int>{0});
  CHECK(p.regions.at({0, 1}) == std::vector<int>{1});
  CHECK(p.regions.at({1, 0}) == std::vector<int>{2});
  CHECK(p.regions.at({1, 1}) == std::vector<int>{3});

  Code constant = make_code({{0, 0, 0}, {1, 1, 1}});
  RegionPartition pc = region_partition(constant, {0, 1});
  REQUIRE(pc.regions.size() == 1);
  CHECK(pc.regions.at({0, 1}) == std::vector<int>{0, 1, 2});

  Code single = make_code({{0}, {1}});
  CHECK(region_partition(single, {0, 1}).regions.size() == 1);
}

TEST_CASE("joint type weights equal region sizes over n") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Code c = random_code(rng, 4, 6, 2);
    std::vector<int> subset = {0, 2, 3};
    JointType q = joint_type(c, subset);
    RegionPartition p = region_partition(c, subset);
    for (const auto& [x, coords] : p.regions)
      CHECK(q.at(x) == Rational(coords.size(), 6));
  }
}

TEST_CASE("conditional_type hand counts") {
  Channel b = bsc(0.1);
  Code c = make_code({{0, 0}, {1, 1}});
  ConditionalType t = conditional_type(b, c, {0, 1}, {0, 1});
  const auto& comp = t.components.at({0, 1});
  REQUIRE(comp.region_size == 2);
  CHECK(comp.weight(0) == Rational(1, 2));
  CHECK(comp.weight(1) == Rational(1, 2));

  // identical codewords: y equal to the codeword gives a point mass
  Code same = make_code({{0, 0}, {0, 0}});
  ConditionalType tp = conditional_type(b, same, {0, 1}, {0, 0});
  const auto& diag = tp.components.at({0, 0});
  CHECK(diag.weight(0) == Rational(1));
  CHECK(diag.weight(1) == Rational(0));

  CHECK_THROWS_AS(conditional_type(b, c, {0, 1}, {0}), LengthMismatchError);

  Channel z = validate_channel({{1.0, 0.0}, {0.3, 0.7}});
  Code zc = make_code({{0}, {1}});
  // Y_hat(0,1) = {0}, so y = 1 falls outside its region's support
  CHECK_THROWS_AS(conditional_type(z, zc, {0, 1}, {1}), OutOfSupportError);
}

TEST_CASE("type class counts for one region") {
  Channel b = bsc(0.1);

  Code c2 = make_code({{0, 0}, {1, 1}});  // one region (0,1), |I| = 2
  std::vector<Int> sizes;
  for_each_conditional_type(b, c2, {0, 1},
                            [&](const TypeClass& tc) { sizes.push_back(tc.class_size); });
  CHECK(sizes == std::vector<Int>{1, 2, 1});

  Code c4 = make_code({{0, 0, 0, 0}, {1, 1, 1, 1}});
  sizes.clear();
  for_each_conditional_type(b, c4, {0, 1},
                            [&](const TypeClass& tc) { sizes.push_back(tc.class_size); });
  CHECK(sizes == std::vector<Int>{1, 4, 6, 4, 1});
}

TEST_CASE("type class sizes cover Y_hat^n exactly") {
  Rng rng(5);
  for (int trial = 0; trial < 12; ++trial) {
    int ny = 2 + static_cast<int>(rng.next_below(2));
    Channel ch = trial % 2 == 0 ? random_channel(rng, 2, ny)
                                : random_channel_with_zeros(rng, 2, ny);
    Code c = random_code(rng, 2, 4 + static_cast<int>(rng.next_below(3)), 2);
    const int n = c.blocklength();

    // brute force: count sequences inside Y_hat^n and group them by type
    Int inside = 0;
    std::vector<int> y(n, 0);
    std::map<std::vector<std::pair<InputTuple, std::vector<int>>>, Int> classes;
    while (true) {
      bool ok = true;
      try {
        ConditionalType t = conditional_type(ch, c, {0, 1}, y);
        std::vector<std::pair<InputTuple, std::vector<int>>> key;
        for (const auto& [x, comp] : t.components) key.push_back({x, comp.counts});
        classes[key] += 1;
        ++inside;
      } catch (const OutOfSupportError&) {
        ok = false;
      }
      (void)ok;
      int i = n - 1;
      while (i >= 0 && y[i] == ny - 1) y[i--] = 0;
      if (i < 0) break;
      ++y[i];
    }

    Int total = 0;
    Int class_count = 0;
    for_each_conditional_type(ch, c, {0, 1}, [&](const TypeClass& tc) {
      total += tc.class_size;
      ++class_count;
      std::vector<std::pair<InputTuple, std::vector<int>>> key;
      for (const auto& [x, comp] : tc.type.components) key.push_back({x, comp.counts});
      auto it = classes.find(key);
      REQUIRE(it != classes.end());
      CHECK(it->second == tc.class_size);
    });
    CHECK(total == inside);
    CHECK(class_count == Int(classes.size()));
  }
}

TEST_CASE("per-class sequence probability is constant") {
  Rng rng(9);
  Channel ch = random_channel(rng, 2, 3);
  Code c = random_code(rng, 2, 5, 2);
  const int n = 5, ny = 3;
  std::map<std::vector<std::pair<InputTuple, std::vector<int>>>, std::vector<double>> probs;
  std::vector<int> y(n, 0);
  while (true) {
    ConditionalType t = conditional_type(ch, c, {0, 1}, y);
    std::vector<std::pair<InputTuple, std::vector<int>>> key;
    for (const auto& [x, comp] : t.components) key.push_back({x, comp.counts});
    double p = likelihood(ch, c, 0, y);
    probs[key].push_back(p);
    int i = n - 1;
    while (i >= 0 && y[i] == ny - 1) y[i--] = 0;
    if (i < 0) break;
    ++y[i];
  }
  for (const auto& [key, vals] : probs)
    for (double p : vals) CHECK_THAT(p, Catch::Matchers::WithinRel(vals.front(), 1e-12));
}

TEST_CASE("size guard on type enumeration") {
  Channel b = bsc(0.1);
  Code big = make_code({std::vector<int>(40, 0), std::vector<int>(40, 1)});
  CHECK_THROWS_AS(
      for_each_conditional_type(b, big, {0, 1}, [](const TypeClass&) {}, 10),
      SizeGuardExceededError);
}

TEST_CASE("column_composition hand counts") {
  Code c = make_code({{0, 0}, {0, 1}});
  ColumnComposition cc = column_composition(c);
  CHECK(cc.counts[0] == std::vector<int>{2, 0});
  CHECK(cc.counts[1] == std::vector<int>{1, 1});

  Code single = make_code({{0, 1, 0}}, 2);
  ColumnComposition cs = column_composition(single);
  CHECK(cs.counts[0] == std::vector<int>{1, 0});
  CHECK(cs.counts[1] == std::vector<int>{0, 1});

  Rng rng(13);
  Code r = random_code(rng, 6, 4, 3);
  ColumnComposition cr = column_composition(r);
  for (const auto& col : cr.counts) {
    int sum = 0;
    for (int v : col) sum += v;
    CHECK(sum == 6);
  }
}

namespace {

// joint type generalized to ordered message tuples with repetition, used as
// the independent oracle for the column-averaging identity
Rational repeated_tuple_weight(const Code& code, const std::vector<int>& messages,
                               const InputTuple& x) {
  Int hits = 0;
  for (int c = 0; c < code.blocklength(); ++c) {
    bool match = true;
    for (std::size_t k = 0; k < messages.size(); ++k)
      if (code.rows[messages[k]][c] != x[k]) {
        match = false;
        break;
      }
    if (match) ++hits;
  }
  return Rational(hits, code.blocklength());
}

}  // namespace

TEST_CASE("column averaging identity over ordered tuples with repetition") {
  // sum over all ordered message tuples (with repetition) of q_m(x) equals
  // (1/n) sum_c prod_k M_c(x_k), exactly
  Rng rng(21);
  for (int trial = 0; trial < 6; ++trial) {
    int m_count = 3 + static_cast<int>(rng.next_below(3));
    int n = 3 + static_cast<int>(rng.next_below(4));
    int k = 2 + static_cast<int>(rng.next_below(2));
    Code c = random_code(rng, m_count, n, 2);
    ColumnComposition cc = column_composition(c);

    std::size_t tuple_count = 1;
    for (int i = 0; i < k; ++i) tuple_count *= 2;
    std::size_t msg_count = 1;
    for (int i = 0; i < k; ++i) msg_count *= static_cast<std::size_t>(m_count);

    for (std::size_t ti = 0; ti < tuple_count; ++ti) {
      InputTuple x(k);
      std::size_t rem = ti;
      for (int i = k - 1; i >= 0; --i) {
        x[i] = static_cast<int>(rem % 2);
        rem /= 2;
      }
      Rational lhs(0);
      for (std::size_t mi = 0; mi < msg_count; ++mi) {
        std::vector<int> messages(k);
        std::size_t mr = mi;
        for (int i = k - 1; i >= 0; --i) {
          messages[i] = static_cast<int>(mr % m_count);
          mr /= m_count;
        }
        lhs += repeated_tuple_weight(c, messages, x);
      }
      Rational rhs(0);
      for (int col = 0; col < n; ++col) {
        Int prod = 1;
        for (int i = 0; i < k; ++i) prod *= cc.counts[col][x[i]];
        rhs += Rational(prod, n);
      }
      CHECK(lhs == rhs);
    }
  }
}
