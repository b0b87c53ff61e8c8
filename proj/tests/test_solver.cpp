#include "hjmot/solver.hpp"

#include "hjmot/lp_oracle.hpp"
#include "test_support.hpp"

#include <doctest.h>

using namespace hjmot;
using namespace hjmot::testing;

namespace {

void check_solution_invariants(const ProblemInstance& inst, const HJMOTSolution& sol) {
  const CostFamily realized = realize_costs(inst);
  Real total = 0, objective = 0;
  for (const auto& [p, mass] : sol.path_atoms) {
    CHECK(path_well_formed(p, inst));
    total += mass;
    objective += mass * path_cost(p, inst, realized);
  }
  CHECK(std::abs(total - 1.0) <= 1e-12);
  CHECK(std::abs(objective - sol.M) <= 1e-9 * std::max(Real(1), std::abs(sol.M)));

  // stage pushforwards: endpoints match the instance, intermediates match
  // the recorded marginals bit for bit (same arithmetic path).
  Vec p0 = stage_pushforward(sol.path_atoms, inst, 0);
  Vec pK = stage_pushforward(sol.path_atoms, inst, inst.K);
  for (int a = 0; a < inst.stage_size(0); ++a)
    CHECK(std::abs(p0[a] - inst.mu0.weights[a]) <= 1e-9);
  for (int b = 0; b < inst.stage_size(inst.K); ++b)
    CHECK(std::abs(pK[b] - inst.muK.weights[b]) <= 1e-9);
  for (int k = 1; k <= inst.K - 1; ++k) {
    Vec push = stage_pushforward(sol.path_atoms, inst, k);
    const Vec& rec = sol.intermediate_marginals[k - 1].weights;
    REQUIRE(push.size() == rec.size());
    for (Eigen::Index i = 0; i < push.size(); ++i) CHECK(push[i] == rec[i]);
  }
}

}  // namespace

TEST_CASE("single-source line fixture solution") {
  ProblemInstance inst = tiny1();
  HJMOTSolution sol = solve_hjmot(inst);
  CHECK(sol.M == doctest::Approx(0.52));
  REQUIRE(sol.path_atoms.size() == 1);
  CHECK(sol.path_atoms[0].first.choices == std::vector<int>{0, 0, 0});
  CHECK(sol.path_atoms[0].second == doctest::Approx(1.0));
  CHECK(sol.intermediate_marginals[0].weights[0] == doctest::Approx(1.0));  // point 0.4
  CHECK(sol.skip_mass(1) == doctest::Approx(0.0));
  check_solution_invariants(inst, sol);
}

TEST_CASE("skip-favoring fixture routes through the skip state") {
  ProblemInstance inst = tiny2();
  HJMOTSolution sol = solve_hjmot(inst);
  CHECK(sol.M == doctest::Approx(1.0));
  REQUIRE(sol.path_atoms.size() == 1);
  CHECK(sol.path_atoms[0].first.choices == std::vector<int>{0, kSkip, 0});
  CHECK(sol.skip_mass(1) == doctest::Approx(1.0));
  check_solution_invariants(inst, sol);
}

TEST_CASE("two-source fixture splits between the via and jump routes") {
  ProblemInstance inst = mix1();
  HJMOTSolution sol = solve_hjmot(inst);
  CHECK(sol.M == doctest::Approx(0.76));
  REQUIRE(sol.path_atoms.size() == 2);
  CHECK(sol.path_atoms[0].first.choices == std::vector<int>{0, 0, 0});
  CHECK(sol.path_atoms[1].first.choices == std::vector<int>{1, kSkip, 1});
  CHECK(sol.intermediate_marginals[0].weights[0] == doctest::Approx(0.5));
  CHECK(sol.skip_mass(1) == doctest::Approx(0.5));
  check_solution_invariants(inst, sol);
}

TEST_CASE("LP oracle on the tiny fixtures") {
  CHECK(solve_full_lp_oracle(tiny1()).value == doctest::Approx(0.52));
  CHECK(solve_full_lp_oracle(tiny2()).value == doctest::Approx(1.0));
  CHECK(solve_full_lp_oracle(mix1()).value == doctest::Approx(0.76));
}

TEST_CASE("solver agrees with the LP oracle on random instances") {
  for (uint64_t seed = 300; seed < 330; ++seed) {
    ProblemInstance inst = random_instance(seed, 4, 3);
    HJMOTSolution sol = solve_hjmot(inst);
    LpOracleResult lp = solve_full_lp_oracle(inst);
    CHECK(std::abs(sol.M - lp.value) <= 1e-9 * std::max(Real(1), std::abs(sol.M)));
    check_solution_invariants(inst, sol);
  }
}

TEST_CASE("infeasible instance is refused") {
  ProblemInstance inst = tiny1();
  inst.costs = realize_costs(inst);
  for (Mat& C : inst.costs.matrices) C.setConstant(kInf);
  CHECK_THROWS_AS(solve_hjmot(inst), InfeasibleError);
  CHECK_THROWS_AS(solve_full_lp_oracle(inst), InfeasibleError);
}

TEST_CASE("LP oracle refuses oversized instances") {
  GeneratorSpec spec;
  spec.family = GeneratorFamily::Euclidean;
  spec.K = 5;
  spec.sizes = {8, 8, 8, 8, 8, 8};  // aug product 8*9^4*8 > 2e4
  spec.seed = 3;
  CHECK_THROWS_AS(solve_full_lp_oracle(generate(spec)), InputError);
}

TEST_CASE("M is an upper bound for no random feasible plan") {
  // hand-fed feasible plans can only cost at least M
  std::mt19937_64 rng(9);
  for (uint64_t seed = 340; seed < 350; ++seed) {
    ProblemInstance inst = random_instance(seed, 3, 3);
    const CostFamily realized = realize_costs(inst);
    HJMOTSolution sol = solve_hjmot(inst);
    std::vector<Path> space = enumerate_path_space(inst, 2e4);

    for (int trial = 0; trial < 5; ++trial) {
      // feasible spot plan: fill terminals in a random order per source
      std::vector<int> order(inst.stage_size(inst.K));
      for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
      for (size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[rng() % i]);

      Real value = 0;
      Vec rem = inst.muK.weights;
      for (int a = 0; a < inst.stage_size(0); ++a) {
        Real need = inst.mu0.weights[a];
        for (int b : order) {
          if (need <= 1e-12) break;
          Real take = std::min(need, rem[b]);
          if (take <= 0) continue;
          // cheapest path with these endpoints, found by scan
          Real best = kInf;
          for (const Path& p : space)
            if (p.choices[0] == a && p.choices[inst.K] == b)
              best = std::min(best, path_cost(p, inst, realized));
          value += take * best;
          need -= take;
          rem[b] -= take;
        }
      }
      CHECK(sol.M <= value + 1e-9 * std::max(Real(1), std::abs(value)));
    }
  }
}

TEST_CASE("entropic solve approaches the exact objective") {
  ProblemInstance inst = mix1();
  HJMOTSolution exact = solve_hjmot(inst);
  Real prev = kInf;
  for (Real eps : {1.0, 1e-1, 1e-2, 1e-3}) {
    SolveOptions opts;
    opts.method = SolveOptions::Method::Entropic;
    opts.epsilon = eps;
    opts.max_iter = 50000;
    opts.stop_tol = 1e-11;
    HJMOTSolution sol = solve_hjmot(inst, opts);
    CHECK(sol.M >= exact.M - 1e-9);
    CHECK(sol.M <= prev * 1.1 + 1e-12);
    CHECK_FALSE(sol.has_duals);
    prev = sol.M;
  }
  CHECK(prev == doctest::Approx(exact.M).epsilon(1e-3));
}

TEST_CASE("re-solving is deterministic") {
  for (uint64_t seed : {401ULL, 402ULL, 403ULL}) {
    ProblemInstance inst = random_instance(seed, 4, 3);
    HJMOTSolution s1 = solve_hjmot(inst);
    HJMOTSolution s2 = solve_hjmot(inst);
    CHECK(s1.M == s2.M);
    REQUIRE(s1.path_atoms.size() == s2.path_atoms.size());
    for (size_t i = 0; i < s1.path_atoms.size(); ++i) {
      CHECK(s1.path_atoms[i].first == s2.path_atoms[i].first);
      CHECK(s1.path_atoms[i].second == s2.path_atoms[i].second);
    }
  }
}
