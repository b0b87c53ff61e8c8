#include "hjmot/certify.hpp"

#include "test_support.hpp"

#include <doctest.h>

using namespace hjmot;
using namespace hjmot::testing;

TEST_CASE("splitting potentials on the fixtures") {
  ProblemInstance inst = tiny1();
  HJMOTSolution sol = solve_hjmot(inst);
  SplittingPotentials pot = splitting_potentials(inst, sol);
  CHECK(pot.v[0][0] + pot.v[2][0] == doctest::Approx(0.52));
  CHECK(pot.v[1][0] == 0.0);
  CHECK(pot.v[1][1] == 0.0);
  CHECK(pot.v[1][2] == 0.0);  // skip slot

  ProblemInstance t2 = tiny2();
  sol = solve_hjmot(t2);
  pot = splitting_potentials(t2, sol);
  CHECK(pot.v[0][0] + pot.v[2][0] == doctest::Approx(1.0));

  // strong duality: sum_k integral of v_k against the optimal marginals is M
  ProblemInstance m1 = mix1();
  sol = solve_hjmot(m1);
  pot = splitting_potentials(m1, sol);
  Real dual_value = 0;
  dual_value += pot.v[0].dot(stage_pushforward(sol.path_atoms, m1, 0));
  dual_value += pot.v[1].dot(stage_pushforward(sol.path_atoms, m1, 1));
  dual_value += pot.v[2].dot(stage_pushforward(sol.path_atoms, m1, 2));
  CHECK(dual_value == doctest::Approx(0.76));
}

TEST_CASE("splitting potentials refuse entropic solutions") {
  SolveOptions opts;
  opts.method = SolveOptions::Method::Entropic;
  ProblemInstance inst = tiny1();
  HJMOTSolution sol = solve_hjmot(inst, opts);
  CHECK_THROWS_AS(splitting_potentials(inst, sol), InputError);
}

TEST_CASE("check_splitting validates and detects violations") {
  ProblemInstance inst = tiny1();
  HJMOTSolution sol = solve_hjmot(inst);
  SplittingPotentials pot = splitting_potentials(inst, sol);
  CheckResult ok = check_splitting(inst, pot, sol);
  CHECK(ok.pass);
  CHECK(ok.slack <= 1e-12);

  SplittingPotentials bumped = pot;
  bumped.v[0][0] += 0.1;  // breaks the global inequality on the support atom
  CheckResult bad = check_splitting(inst, bumped, sol);
  CHECK_FALSE(bad.pass);
  REQUIRE_FALSE(bad.witness_paths.empty());
  CHECK(bad.witness_paths[0].choices == std::vector<int>{0, 0, 0});

  SplittingPotentials zero;
  zero.v.assign(3, Vec());
  for (int k = 0; k <= 2; ++k) zero.v[k] = Vec::Zero(inst.aug_size(k));
  CheckResult zres = check_splitting(inst, zero, sol);
  CHECK_FALSE(zres.pass);  // inequality fine, support equality 0 != 0.52
  CHECK(zres.slack == doctest::Approx(0.52));
}

TEST_CASE("cyclical monotonicity passes on real solutions") {
  ProblemInstance inst = mix1();
  HJMOTSolution sol = solve_hjmot(inst);
  CheckResult res = check_cyclical_monotonicity(inst, sol, 2, 50);
  CHECK(res.pass);

  // single-atom support: identity permutation only
  res = check_cyclical_monotonicity(tiny1(), solve_hjmot(tiny1()), 1, 10);
  CHECK(res.pass);
}

TEST_CASE("cyclical monotonicity catches the swapped pairing") {
  ProblemInstance inst = mix1();
  HJMOTSolution sol = solve_hjmot(inst);
  // adversarial fake: send 0 -> 11 and 10 -> 1
  HJMOTSolution fake = sol;
  fake.path_atoms.clear();
  ReducedCostTable table = reduced_cost_table(inst);
  fake.path_atoms.emplace_back(table.argmin_paths[0][1], 0.5);
  fake.path_atoms.emplace_back(table.argmin_paths[1][0], 0.5);
  CheckResult res = check_cyclical_monotonicity(inst, fake, 2, 50);
  CHECK_FALSE(res.pass);
  CHECK_FALSE(res.witness_paths.empty());
}

TEST_CASE("gluing product couplings gives the product measure") {
  ProblemInstance inst = line_instance({{0.0, 1.0}, {0.25, 0.75}, {0.4, 0.6}});
  // uniform product couplings over the augmented sets (skip slots carry 0)
  std::vector<Vec> margs = {Vec::Constant(2, 0.5), Vec::Zero(3), Vec::Constant(2, 0.5)};
  margs[1] << 0.5, 0.5, 0.0;
  std::vector<Mat> plans(2);
  plans[0] = margs[0] * margs[1].transpose();
  plans[1] = margs[1] * margs[2].transpose();

  PathMeasure glued = glue_pairwise(inst, plans, margs);
  CHECK(glued.size() == 8);  // 2*2*2 tuples of positive mass
  for (const auto& [p, mass] : glued) CHECK(mass == doctest::Approx(0.125));
  CHECK(check_glued_marginals(inst, glued, plans, margs).pass);
}

TEST_CASE("gluing diagonal couplings composes deterministically") {
  ProblemInstance inst = line_instance({{0.0, 1.0}, {0.25, 0.75}, {0.4, 0.6}});
  std::vector<Vec> margs = {Vec::Constant(2, 0.5), Vec::Zero(3), Vec::Constant(2, 0.5)};
  margs[1] << 0.5, 0.5, 0.0;
  std::vector<Mat> plans(2);
  plans[0] = Mat::Zero(2, 3);
  plans[0](0, 0) = 0.5;
  plans[0](1, 1) = 0.5;
  plans[1] = Mat::Zero(3, 2);
  plans[1](0, 0) = 0.5;
  plans[1](1, 1) = 0.5;

  PathMeasure glued = glue_pairwise(inst, plans, margs);
  REQUIRE(glued.size() == 2);
  CHECK(glued[0].first.choices == std::vector<int>{0, 0, 0});
  CHECK(glued[0].second == doctest::Approx(0.5));
  CHECK(glued[1].first.choices == std::vector<int>{1, 1, 1});
  CHECK(check_glued_marginals(inst, glued, plans, margs).pass);
}

TEST_CASE("gluing a solution's own projections reproduces them") {
  ProblemInstance inst = mix1();
  HJMOTSolution sol = solve_hjmot(inst);
  std::vector<Vec> margs;
  std::vector<Mat> plans;
  for (int k = 0; k <= inst.K; ++k) margs.push_back(stage_pushforward(sol.path_atoms, inst, k));
  for (int k = 0; k < inst.K; ++k) plans.push_back(pairwise_projection(inst, sol.path_atoms, k));
  PathMeasure glued = glue_pairwise(inst, plans, margs);
  CheckResult res = check_glued_marginals(inst, glued, plans, margs);
  CHECK(res.pass);
  CHECK(res.slack <= 1e-12);

  // the glued plan is feasible, so it cannot undercut M
  const CostFamily realized = realize_costs(inst);
  Real glued_value = 0;
  for (const auto& [p, mass] : glued) glued_value += mass * path_cost(p, inst, realized);
  CHECK(glued_value >= sol.M - 1e-9);
}

TEST_CASE("glue refuses mismatched marginals") {
  ProblemInstance inst = line_instance({{0.0, 1.0}, {0.25, 0.75}, {0.4, 0.6}});
  std::vector<Vec> margs = {Vec::Constant(2, 0.5), Vec::Zero(3), Vec::Constant(2, 0.5)};
  margs[1] << 0.5, 0.5, 0.0;
  std::vector<Mat> plans(2);
  plans[0] = margs[0] * margs[1].transpose();
  plans[1] = margs[1] * margs[2].transpose();
  plans[1](0, 0) += 0.05;  // break the left marginal of plan 1
  plans[1](0, 1) -= 0.05;
  CHECK_THROWS_AS(glue_pairwise(inst, plans, margs), InputError);
}

TEST_CASE("tilde upper bound on the fixtures") {
  // two-stage line fixture with mu1 = delta at 0.4
  {
    Vec mu1(3);
    mu1 << 1.0, 0.0, 0.0;
    TildeBound tb = upper_bound_via_tilde(tiny1(), {mu1});
    CHECK(tb.per_stage[0] == doctest::Approx(0.16));
    CHECK(tb.per_stage[1] == doctest::Approx(0.36));
    CHECK(tb.bound == doctest::Approx(0.52));
    CHECK(tb.M == doctest::Approx(0.52));
    CHECK(tb.holds);
  }
  // skip-favoring fixture with mu1 = delta at the skip state
  {
    Vec mu1(2);
    mu1 << 0.0, 1.0;
    TildeBound tb = upper_bound_via_tilde(tiny2(), {mu1});
    CHECK(tb.per_stage[0] == doctest::Approx(1.0));
    CHECK(tb.per_stage[1] == doctest::Approx(0.0));
    CHECK(tb.bound == doctest::Approx(1.0));
    CHECK(tb.holds);
  }
  // line fixture with mu1 = delta at 10: loose but valid
  {
    Vec mu1(3);
    mu1 << 0.0, 1.0, 0.0;
    TildeBound tb = upper_bound_via_tilde(tiny1(), {mu1});
    CHECK(tb.bound == doctest::Approx(181.0));
    CHECK(tb.holds);
  }
}

TEST_CASE("decomposition identity on the fixtures") {
  {
    DecompositionResult dc = decomposition_check(tiny1(), solve_hjmot(tiny1()));
    CHECK(dc.per_stage[0] == doctest::Approx(0.16));
    CHECK(dc.per_stage[1] == doctest::Approx(0.36));
    CHECK(dc.gap <= 1e-12);
  }
  {
    DecompositionResult dc = decomposition_check(tiny2(), solve_hjmot(tiny2()));
    CHECK(dc.per_stage[0] == doctest::Approx(1.0));
    CHECK(dc.per_stage[1] == doctest::Approx(0.0));
    CHECK(dc.sum == doctest::Approx(1.0));
    CHECK(dc.gap <= 1e-12);
  }
  {
    DecompositionResult dc = decomposition_check(mix1(), solve_hjmot(mix1()));
    CHECK(dc.per_stage[0] == doctest::Approx(0.58));
    CHECK(dc.per_stage[1] == doctest::Approx(0.18));
    CHECK(dc.sum == doctest::Approx(0.76));
    CHECK(dc.gap <= 1e-9);
  }
}

TEST_CASE("decomposition refuses ambiguous jump continuations") {
  // two support paths jump from the same stage-1 point over stage 2 but
  // land on different terminals: the skip-branch charge is ill-defined
  ProblemInstance inst = line_instance({{0.0, 10.0}, {5.0}, {4.9, 5.1}, {0.5, 9.5}});
  HJMOTSolution fake;
  fake.path_atoms.emplace_back(Path({0, 0, kSkip, 0}), 0.5);
  fake.path_atoms.emplace_back(Path({1, 0, kSkip, 1}), 0.5);
  fake.M = 0;
  CHECK_THROWS_WITH_AS(decomposition_check(inst, fake),
                       doctest::Contains("jumps to two different targets"),
                       MongePreconditionError);
}

TEST_CASE("splitting check samples when the path space is large") {
  GeneratorSpec spec;
  spec.family = GeneratorFamily::Euclidean;
  spec.K = 5;
  spec.sizes = {6, 6, 6, 6, 6, 6};  // aug product 6*7^4*6 = 86436 > 2e4
  spec.seed = 12;
  ProblemInstance inst = generate(spec);
  HJMOTSolution sol = solve_hjmot(inst);
  SplittingPotentials pot = splitting_potentials(inst, sol);
  CheckResult res = check_splitting(inst, pot, sol);
  CHECK(res.pass);
}

TEST_CASE("decomposition refuses split-mass solutions") {
  ProblemInstance inst = mix1();
  HJMOTSolution sol = solve_hjmot(inst);
  HJMOTSolution fake = sol;
  fake.path_atoms.clear();
  ReducedCostTable table = reduced_cost_table(inst);
  fake.path_atoms.emplace_back(table.argmin_paths[0][0], 0.5);
  fake.path_atoms.emplace_back(Path({0, kSkip, 1}), 0.5);  // source 0 split
  CHECK_THROWS_AS(decomposition_check(inst, fake), MongePreconditionError);
}

TEST_CASE("cyclical check samples permutation tuples when they explode") {
  // K=5 with m=4 atoms: (4!)^6 tuples is far past the enumeration cap
  GeneratorSpec spec;
  spec.family = GeneratorFamily::Euclidean;
  spec.K = 5;
  spec.sizes = {4, 2, 2, 2, 2, 4};
  spec.seed = 19;
  ProblemInstance inst = generate(spec);
  HJMOTSolution sol = solve_hjmot(inst);
  REQUIRE(sol.path_atoms.size() >= 4);
  CheckResult res = check_cyclical_monotonicity(inst, sol, 4, 8, 1e-9);
  CHECK(res.pass);
}

TEST_CASE("permutation subset size is capped") {
  ProblemInstance inst = mix1();
  HJMOTSolution sol = solve_hjmot(inst);
  CHECK_THROWS_AS(check_cyclical_monotonicity(inst, sol, 5, 10), InputError);
}

TEST_CASE("tilde bound rejects wrongly shaped intermediates") {
  Vec bad(2);  // stage 1 has 2 points + skip slot = 3
  bad << 0.5, 0.5;
  CHECK_THROWS_AS(upper_bound_via_tilde(tiny1(), {bad}), InputError);
}

TEST_CASE("duality certificate holds across random exact solutions") {
  for (uint64_t seed = 500; seed < 515; ++seed) {
    ProblemInstance inst = random_instance(seed, 4, 3);
    HJMOTSolution sol = solve_hjmot(inst);
    SplittingPotentials pot = splitting_potentials(inst, sol);
    CheckResult res = check_splitting(inst, pot, sol);
    CHECK(res.pass);

    Real dual_value = 0;
    for (int k = 0; k <= inst.K; ++k)
      dual_value += pot.v[k].dot(stage_pushforward(sol.path_atoms, inst, k));
    CHECK(std::abs(dual_value - sol.M) <= 1e-9 * std::max(Real(1), std::abs(sol.M)));
  }
}
