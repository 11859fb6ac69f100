#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "zerorate/halving.hpp"
#include "zerorate/instances.hpp"

using namespace zerorate;
using Catch::Matchers::WithinAbs;

namespace {

int brute_force_max_mono_pairs(const FiniteEnsemble& ens, std::uint64_t t) {
  const int m = ens.variable_count();
  detail::EdgeColorFn color = [&](const std::vector<int>& pair) {
    return detail::skew_color(ens, pair[0], pair[1], t);
  };
  int best = 1;
  for (std::uint64_t mask = 1; mask < (1ULL << m); ++mask) {
    std::vector<int> subset;
    for (int v = 0; v < m; ++v)
      if (mask & (1ULL << v)) subset.push_back(v);
    if (static_cast<int>(subset.size()) <= best) continue;
    if (is_monochromatic(subset, 2, color)) best = static_cast<int>(subset.size());
  }
  return best;
}

}  // namespace

TEST_CASE("ensemble_from_code reproduces joint types") {
  Code c = make_code({{0, 0}, {0, 1}});
  FiniteEnsemble e = ensemble_from_code(c);
  CHECK(e.point_count() == 2);
  CHECK(joint_prob(e, 0, 1, 0, 1) == Rational(1, 2));
  CHECK(joint_prob(e, 0, 1, 0, 0) == Rational(1, 2));
  CHECK(joint_prob(e, 0, 1, 1, 1) == Rational(0));

  Code single = make_code({{0}, {1}});
  CHECK(ensemble_from_code(single).point_count() == 1);

  Rng rng(127);
  Code r = random_code(rng, 5, 7, 3);
  FiniteEnsemble er = ensemble_from_code(r);
  for (int m = 0; m < 5; ++m) {
    for (int mp = m + 1; mp < 5; ++mp) {
      JointType q = joint_type(r, {m, mp});
      for (int x = 0; x < 3; ++x)
        for (int xp = 0; xp < 3; ++xp)
          CHECK(joint_prob(er, m, mp, x, xp) == q.at({x, xp}));
    }
  }
}

TEST_CASE("pairwise skews") {
  Code twins = make_code({{0, 1, 0}, {0, 1, 0}});
  FiniteEnsemble e1 = ensemble_from_code(twins);
  CHECK(skew(e1, 0, 1, 0, 1) == Rational(0));

  Code swap = make_code({{0, 1}, {1, 0}});
  CHECK(skew(ensemble_from_code(swap), 0, 1, 0, 1) == Rational(0));

  Code lop = make_code({{0, 0}, {0, 1}});
  FiniteEnsemble e3 = ensemble_from_code(lop);
  CHECK(skew(e3, 0, 1, 0, 1) == Rational(1, 2));
  SkewSlice slice = pairwise_skew(e3, 0, 1);
  CHECK(slice.d.at({0, 1}) == Rational(1, 2));
  CHECK_THROWS_AS(pairwise_skew(e3, 1, 0), BadIndicesError);

  // cross-module consistency: skews equal joint-type differences
  Rng rng(131);
  Code r = random_code(rng, 6, 5, 2);
  FiniteEnsemble er = ensemble_from_code(r);
  for (int m = 0; m < 6; ++m)
    for (int mp = m + 1; mp < 6; ++mp) {
      JointType q = joint_type(r, {m, mp});
      CHECK(skew(er, m, mp, 0, 1) == q.at({0, 1}) - q.at({1, 0}));
    }
}

TEST_CASE("monochromatic extraction on random variables") {
  std::vector<std::vector<int>> same(7, {0, 1, 1, 0});
  FiniteEnsemble ex = ensemble_from_code(make_code(same, 2));
  CHECK(monochromatic_rv_extract(ex, 5).size() == 7);

  Rng rng(137);
  for (int trial = 0; trial < 6; ++trial) {
    Code c = random_code(rng, 12, 8, 2);
    FiniteEnsemble e = ensemble_from_code(c);
    std::vector<int> got = monochromatic_rv_extract(e, 1);
    detail::EdgeColorFn color = [&](const std::vector<int>& pair) {
      return detail::skew_color(e, pair[0], pair[1], 1);
    };
    CHECK(is_monochromatic(got, 2, color));
    CHECK(static_cast<int>(got.size()) == brute_force_max_mono_pairs(e, 1));
  }
}

TEST_CASE("sign function construction") {
  // all skews zero at t = 1: the zero cell counts as positive
  std::vector<std::vector<int>> same(4, {0, 1, 2});
  FiniteEnsemble ex = ensemble_from_code(make_code(same, 3));
  SignFunction f = build_f(ex, {0, 1, 2, 3}, 1);
  for (int x = 0; x < 3; ++x) {
    CHECK(f.at(x, x) == 0);
    for (int xp = x + 1; xp < 3; ++xp) {
      CHECK(f.at(x, xp) == 1);
      CHECK(f.at(xp, x) == -1);
    }
  }

  Code lop = make_code({{0, 0}, {0, 1}, {1, 1}});
  FiniteEnsemble e = ensemble_from_code(lop);
  // skews: (0,1): 1/2, (0,2): 1, (1,2): 1/2 -- at t = 2 both values share
  // the top cell [1/2, 1], at t = 4 the cells [1/2, 3/4) and [3/4, 1] split
  SignFunction f1 = build_f(e, {0, 1, 2}, 1);
  CHECK(f1.at(0, 1) == 1);
  CHECK_THROWS_AS(build_f(e, {0, 1, 2}, 4), NotMonochromaticError);

  Code unary = make_code({{0, 0}, {0, 0}}, 1);
  SignFunction f0 = build_f(ensemble_from_code(unary), {0, 1}, 3);
  CHECK(f0.at(0, 0) == 0);
}

TEST_CASE("distance via both routes") {
  Code twins = make_code({{0, 1}, {0, 1}});
  FiniteEnsemble e0 = ensemble_from_code(twins);
  SignFunction f = build_f(e0, {0, 1}, 1);
  CHECK(distance(e0, 0, 1, f) == Rational(0));

  Code lop = make_code({{0, 0}, {0, 1}});
  FiniteEnsemble e1 = ensemble_from_code(lop);
  SignFunction f1 = build_f(e1, {0, 1}, 1);
  CHECK(distance(e1, 0, 1, f1) == Rational(1, 2));

  // an f with the wrong sign pattern trips the equality assertion
  SignFunction wrong = f1;
  wrong.f[0][1] = -1;
  wrong.f[1][0] = 1;
  CHECK_THROWS_AS(distance(e1, 0, 1, wrong), SignMismatchError);

  // d is within [0, 1]
  Rng rng(139);
  Code r = random_code(rng, 8, 6, 2);
  FiniteEnsemble er = ensemble_from_code(r);
  std::vector<int> mono = monochromatic_rv_extract(er, 1);
  SignFunction fr = build_f(er, mono, 1);
  FiniteEnsemble sub = restrict_ensemble(er, mono);
  for (int m = 0; m < sub.variable_count(); ++m)
    for (int mp = m + 1; mp < sub.variable_count(); ++mp) {
      Rational d = distance(sub, m, mp, fr);
      CHECK(d >= 0);
      CHECK(d <= 1);
    }
}

TEST_CASE("halving step identity on a hand ensemble") {
  // M = 4 over 2 points
  FiniteEnsemble e;
  e.weight_num = {1, 1};
  e.weight_den = 2;
  e.values = {{0, 1}, {1, 0}, {0, 0}, {1, 1}};
  e.alphabet_size = 2;
  e.check();

  HalvingStepResult step = halving_step(e);
  CHECK(step.next.variable_count() == 2);
  CHECK(step.next.point_count() == 4);
  CHECK(step.identity_residual == Rational(0));

  // hand check: d_hat(0,1) = (d(0,1) + d(2,3)) / 2
  Rational top = skew(e, 0, 1, 0, 1);
  Rational bottom = skew(e, 2, 3, 0, 1);
  CHECK(skew(step.next, 0, 1, 0, 1) == (top + bottom) / 2);

  // the halved distance cannot be smaller than both parent distances
  Rational dh = skew(step.next, 0, 1, 0, 1);
  CHECK(dh == Rational(1, 2));
  Rational abs_top = top < 0 ? -top : top;
  Rational abs_bottom = bottom < 0 ? -bottom : bottom;
  CHECK((dh < 0 ? -dh : dh) >= std::min(abs_top, abs_bottom));

  CHECK_THROWS_AS(halving_step(restrict_ensemble(e, {0, 1, 2})), OddCountError);
}

TEST_CASE("variance hand values and ledger identity") {
  // identical constants
  std::vector<std::vector<int>> rows(4, {0, 0, 0});
  FiniteEnsemble c = ensemble_from_code(make_code(rows, 2));
  CHECK(variance(c) == Rational(0));

  // M = 2 disagreeing everywhere: the average indicator is 1/2 everywhere
  Code dis = make_code({{0, 1, 0}, {1, 0, 1}});
  CHECK(variance(ensemble_from_code(dis)) == Rational(0));

  // exact step identity Var(q') - Var(q) = (1/4) sum_x int (q^t - q^b)^2
  Rng rng(149);
  for (int trial = 0; trial < 8; ++trial) {
    Code r = random_code(rng, 8, 6, 2);
    FiniteEnsemble e = ensemble_from_code(r);
    Rational before = variance(e);
    CHECK(before >= 0);
    CHECK(before <= 1);
    HalvingStepResult step = halving_step(e);
    CHECK(variance(step.next) - before == half_split_energy(e));
  }
}

TEST_CASE("run_halving traces") {
  // M' = 2: a single step, trivially bounded
  Code two = make_code({{0, 1}, {1, 0}});
  HalvingTrace t2 = run_halving(ensemble_from_code(two));
  CHECK(t2.total_steps == 1);
  CHECK(t2.steps.size() == 1);
  CHECK(t2.bound_holds);

  // exchangeable ensemble: d_min = 0 at every step
  std::vector<std::vector<int>> same(8, {0, 1, 1});
  HalvingTrace te = run_halving(ensemble_from_code(make_code(same, 2)));
  for (const auto& s : te.steps) CHECK(s.d_min_before == Rational(0));
  CHECK(te.bound_holds);

  // random monochromatic ensembles through the extraction front end
  Rng rng(151);
  for (int m_target : {8, 16, 32}) {
    for (int trial = 0; trial < 3; ++trial) {
      Code r = random_code(rng, m_target * 2, 10, 2);
      FiniteEnsemble e = ensemble_from_code(r);
      std::vector<int> mono =
          monochromatic_rv_extract(e, 1, MonoSearchMode::kGreedy);
      if (mono.size() < 4) continue;
      int pow2 = 1 << floor_log2(mono.size());
      mono.resize(pow2);
      HalvingTrace tr = run_halving(restrict_ensemble(e, mono));
      CHECK(tr.bound_holds);
      CHECK(tr.pigeonhole_step >= 0);
      for (const auto& s : tr.steps) {
        CHECK(s.identity_residual == Rational(0));
        CHECK(s.var_identity_residual == Rational(0));
        CHECK(s.var_diff >= 0);
        CHECK(s.var_after <= 1);
      }
      // exact pigeonhole: some step has var_diff <= 1/S
      CHECK(tr.steps[tr.pigeonhole_step].var_diff <= Rational(1, tr.total_steps));
      // d_min at the pigeonhole step obeys d_min^2 <= 4|X|/S
      const Rational& dm = tr.d_min_at_pigeonhole;
      CHECK(dm * dm <= Rational(8, tr.total_steps));
    }
  }

  Code odd = make_code({{0, 1}, {1, 0}, {0, 0}});
  CHECK_THROWS_AS(run_halving(ensemble_from_code(odd)), ValidationError);
}

TEST_CASE("theorem check end to end") {
  // exchangeable: zero deviations
  std::vector<std::vector<int>> same(8, {0, 1});
  TheoremReport rep = theorem_check(ensemble_from_code(make_code(same, 2)), 4);
  CHECK(rep.final_ok);
  CHECK(rep.intermediate_ok);
  CHECK_THAT(rep.max_skew_abs, WithinAbs(0.0, 1e-15));

  // spot value of the Delta~ formula
  CHECK_THAT(delta_tilde(16, 4, 2), WithinAbs(std::sqrt(2.0) + 0.5, 1e-12));

  Rng rng(157);
  for (int trial = 0; trial < 2; ++trial) {
    Code r = random_code(rng, 64, 16, 2);
    TheoremReport tr = theorem_check(ensemble_from_code(r), 4);
    CHECK(tr.final_ok);
    CHECK(tr.intermediate_ok);
    CHECK(tr.max_skew_abs <= tr.delta_tilde_value + 1e-15);
    CHECK(tr.m_prime >= 2);
  }
}
