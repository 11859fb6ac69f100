#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "zerorate/channel.hpp"
#include "zerorate/instances.hpp"

using namespace zerorate;
using Catch::Matchers::WithinAbs;

TEST_CASE("validate_channel accepts stochastic matrices") {
  Channel ch = validate_channel({{0.9, 0.1}, {0.1, 0.9}});
  CHECK(ch.input_size() == 2);
  CHECK(ch.output_size() == 2);
  CHECK_THAT(ch.prob(0, 0), WithinAbs(0.9, 1e-15));

  Channel one = validate_channel({{1.0}});
  CHECK(one.input_size() == 1);
  CHECK(one.output_size() == 1);
}

TEST_CASE("validate_channel rejects bad input") {
  CHECK_THROWS_AS(validate_channel({{0.5, 0.4}}), NonStochasticError);
  CHECK_THROWS_AS(validate_channel({{0.5, 0.6}, {0.5, 0.5, 0.0}}), NonStochasticError);
  CHECK_THROWS_AS(validate_channel({{1.1, -0.1}}), NonStochasticError);
  CHECK_THROWS_AS(validate_channel({}), EmptyAlphabetError);
}

TEST_CASE("support sets") {
  Channel b = bsc(0.1);
  CHECK(support_set(b, {0, 1}).outputs == std::vector<int>{0, 1});

  Channel z = validate_channel({{1.0, 0.0}, {0.3, 0.7}});
  // direct evaluation: y=0 has 1.0*0.3 > 0, y=1 has 0.0*0.7 = 0
  CHECK(support_set(z, {0, 1}).outputs == std::vector<int>{0});

  Channel id = validate_channel({{1.0, 0.0}, {0.0, 1.0}});
  CHECK(support_set(id, {0, 1}).empty());
}

TEST_CASE("zero-error capacity check") {
  CHECK(check_list_zero_error_vanishes(bsc(0.1), 1));
  Channel id = validate_channel({{1.0, 0.0}, {0.0, 1.0}});
  CHECK_FALSE(check_list_zero_error_vanishes(id, 1));
  // tuple (0,1,2) has empty common support even though pairs overlap row 2
  Channel three = validate_channel({{1.0, 0.0}, {0.0, 1.0}, {0.5, 0.5}});
  CHECK_FALSE(check_list_zero_error_vanishes(three, 2));
  CHECK(check_list_zero_error_vanishes(three, 1) ==
        false);  // pair (0,1) already fails at L=1
}

TEST_CASE("mu_x hand values on the BSC") {
  Channel b = bsc(0.1);
  SimplexPoint half = SimplexPoint::uniform(2);
  CHECK_THAT(mu_x(b, {0, 0}, half), WithinAbs(0.0, 1e-12));
  // -ln(2 sqrt(0.9*0.1)) = -ln 0.6
  CHECK_THAT(mu_x(b, {0, 1}, half), WithinAbs(-std::log(0.6), 1e-12));
  CHECK_THAT(mu_x(b, {0, 1}, SimplexPoint({1.0, 0.0})), WithinAbs(0.0, 1e-12));

  Channel id = validate_channel({{1.0, 0.0}, {0.0, 1.0}});
  CHECK_THROWS_AS(mu_x(id, {0, 1}, half), EmptySupportError);
}

TEST_CASE("q_star_x hand values") {
  Channel b = bsc(0.1);
  SimplexPoint half = SimplexPoint::uniform(2);
  auto diag = q_star_x(b, {0, 0}, half);
  REQUIRE(diag.size() == 2);
  CHECK_THAT(diag[0], WithinAbs(0.9, 1e-12));
  CHECK_THAT(diag[1], WithinAbs(0.1, 1e-12));

  auto sym = q_star_x(b, {0, 1}, half);
  CHECK_THAT(sym[0], WithinAbs(0.5, 1e-12));
  CHECK_THAT(sym[1], WithinAbs(0.5, 1e-12));

  auto vertex = q_star_x(b, {0, 1}, SimplexPoint({1.0, 0.0}));
  CHECK_THAT(vertex[0], WithinAbs(0.9, 1e-12));
  CHECK_THAT(vertex[1], WithinAbs(0.1, 1e-12));
}

TEST_CASE("kl_divergence basics") {
  CHECK_THAT(kl_divergence({0.3, 0.7}, {0.3, 0.7}), WithinAbs(0.0, 1e-15));
  CHECK_THAT(kl_divergence({1.0, 0.0}, {0.5, 0.5}), WithinAbs(std::log(2.0), 1e-15));
  CHECK(kl_divergence({0.5, 0.5}, {1.0, 0.0}) == kInf);
  CHECK_THROWS_AS(kl_divergence({1.0}, {0.5, 0.5}), DimensionMismatchError);
}

TEST_CASE("mu_x is concave and bounded") {
  Rng rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    int nx = 2 + static_cast<int>(rng.next_below(3));
    int ny = 2 + static_cast<int>(rng.next_below(3));
    Channel ch = random_channel(rng, nx, ny);
    int k = 2 + static_cast<int>(rng.next_below(2));
    InputTuple tuple(k);
    for (auto& x : tuple) x = static_cast<int>(rng.next_below(nx));

    // bound: mu_x <= -log(max_y min_k P(y|x_k))
    double best = 0.0;
    for (int y = 0; y < ny; ++y) {
      double mn = 1.0;
      for (int x : tuple) mn = std::min(mn, ch.prob(x, y));
      best = std::max(best, mn);
    }
    for (int rep = 0; rep < 20; ++rep) {
      SimplexPoint a(rng.next_simplex(k)), b(rng.next_simplex(k));
      double fa = mu_x(ch, tuple, a), fb = mu_x(ch, tuple, b);
      CHECK(fa >= 0.0);
      CHECK(fa <= -std::log(best) + 1e-12);
      std::vector<double> mid(k);
      for (int i = 0; i < k; ++i) mid[i] = 0.5 * (a[i] + b[i]);
      double fm = mu_x(ch, tuple, SimplexPoint(mid));
      CHECK(fm >= 0.5 * (fa + fb) - 1e-10);
    }
  }
}

TEST_CASE("single-letter optimality of the tilted distribution") {
  // sum_k alpha_k KL(T || P(.|x_k)) >= mu_x(alpha), equality at Q*_x
  Rng rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    int nx = 2 + static_cast<int>(rng.next_below(3));
    int ny = 2 + static_cast<int>(rng.next_below(3));
    Channel ch = random_channel(rng, nx, ny);
    int k = 2 + static_cast<int>(rng.next_below(2));
    InputTuple tuple(k);
    for (auto& x : tuple) x = static_cast<int>(rng.next_below(nx));
    SimplexPoint alpha(rng.next_simplex(k));

    SupportSet s = support_set(ch, tuple);
    double mu = mu_x(ch, tuple, alpha);
    auto weighted = [&](const std::vector<double>& t) {
      double v = 0.0;
      for (int kk = 0; kk < k; ++kk) {
        double kl = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i)
          if (t[i] > 0.0) kl += t[i] * (std::log(t[i]) - ch.log_prob(tuple[kk], s.outputs[i]));
        v += alpha[kk] * kl;
      }
      return v;
    };
    for (int rep = 0; rep < 25; ++rep)
      CHECK(weighted(rng.next_simplex(s.size())) >= mu - 1e-10);
    CHECK_THAT(weighted(q_star_x(ch, tuple, alpha)), WithinAbs(mu, 1e-9));
  }
}

TEST_CASE("mu_x permutation invariance is exact") {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    int nx = 3, ny = 3;
    Channel ch = random_channel(rng, nx, ny);
    InputTuple tuple = {0, 1, 2};
    std::vector<double> a = rng.next_simplex(3);
    double base = mu_x(ch, tuple, SimplexPoint(a));
    std::vector<int> perm = {2, 0, 1};
    InputTuple tp(3);
    std::vector<double> ap(3);
    for (int i = 0; i < 3; ++i) {
      tp[i] = tuple[perm[i]];
      ap[i] = a[perm[i]];
    }
    CHECK(mu_x(ch, tp, SimplexPoint(ap)) == base);  // bit-exact
  }
}
