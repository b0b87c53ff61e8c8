#pragma once

#include "hjmot/path_cost.hpp"

namespace hjmot {

// Reduced pairwise cost c_red(x0, xK): the cheapest path between the
// endpoints through the layered jump DAG, with one deterministic argmin
// path per entry and the count of minimizing paths within tolerance.
struct ReducedCostTable {
  Mat values;
  std::vector<std::vector<Path>> argmin_paths;
  Eigen::MatrixXi ties;
};

// Stage-ordered dynamic program over the DAG whose nodes are (stage,
// point) and whose edges run (i, x_i) -> (j, x_j) for i < j (only j = i+1
// when skips are disabled).  Value accumulation is left to right along the
// path, matching path_cost term for term.  Ties are broken
// lexicographically: fewer skips, then lowest visited stage indices, then
// lowest point indices.
ReducedCostTable reduced_cost_table(const ProblemInstance& inst, Real tie_tol = 1e-9);

struct BruteForceResult {
  Real value = kInf;
  std::vector<Path> minimizers;
};

// Independent oracle: enumerates every subset of intermediate stages as
// the visited set and every choice of points, evaluating each path with
// path_cost.  Requires prod_k(|X_k|+1) <= 1e7.
BruteForceResult brute_force_reduced_cost(const ProblemInstance& inst, int a, int b,
                                          Real tie_tol = 1e-9);

// h(x0) = min over terminals of c_red(x0, .); +inf when every path from
// the source is forbidden.
Vec h_values(const ProblemInstance& inst, const ReducedCostTable& table);

struct OptimalContinuationSet {
  int source = 0;
  std::vector<Path> paths;
};

// All paths from source a with cost <= h(a)*(1+tol) + 1e-12, enumerated
// exactly via depth-first search with completion-bound pruning.
// Throws InfeasibleError when h(a) is infinite.
OptimalContinuationSet optimal_continuations(const ProblemInstance& inst, int a,
                                             Real tol = 1e-9);

// Exact enumeration of every path from `source` whose cost is <= budget.
// terminal < 0 enumerates over all terminals.  Paths come out in
// deterministic DFS order (next stage ascending, point ascending).
std::vector<Path> enumerate_paths_within(const ProblemInstance& inst,
                                         const CostFamily& realized, int source,
                                         int terminal, Real budget);

}  // namespace hjmot
