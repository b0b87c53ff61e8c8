#pragma once

#include "hjmot/path_cost.hpp"

namespace hjmot {

// Deterministic enumeration of the full path space: odometer order with
// stage 0 slowest; at intermediate stages points come before the skip
// state.  Size must satisfy prod_k aug_size(k) <= limit.
std::vector<Path> enumerate_path_space(const ProblemInstance& inst, Real limit = 2e4);

struct LpOracleResult {
  Real value = 0;
  std::vector<Path> paths;  // enumeration of the path space
  Vec masses;               // dense measure over `paths`
};

// Independent oracle for the full problem: minimizes the expected path
// cost over all path measures with the prescribed endpoint pushforwards,
// via a dense two-phase primal simplex with Bland's rule.  No part of the
// reduction or the flow solver is reused.  Requires the path space size
// to be <= 2e4; throws InfeasibleError when no feasible measure exists.
LpOracleResult solve_full_lp_oracle(const ProblemInstance& inst);

}  // namespace hjmot
