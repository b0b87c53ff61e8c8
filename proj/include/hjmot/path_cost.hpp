#pragma once

#include "hjmot/instance.hpp"

namespace hjmot {

// The ordered stage indices a path actually visits; always starts at 0
// and ends at K.
struct ActiveIndices {
  int n = 0;
  std::vector<int> indices;
};

ActiveIndices active_indices(const Path& path, int K);

// Points at the active indices, in stage order, as (stage, point index).
std::vector<std::pair<int, int>> extract(const Path& path, const ProblemInstance& inst);

// Path cost: sum of pairwise costs over consecutive active indices,
// accumulated left to right.  +inf if any leg is forbidden.
Real path_cost(const Path& path, const ProblemInstance& inst, const CostFamily& realized);
Real path_cost(const Path& path, const ProblemInstance& inst);

// Maximum adjacent cost c~ for augmented states a at stage i and b at
// stage i+1 (kSkip encodes the skip state).  The middle branch takes the
// max of c_{i,j}(a, .) over all later stages j > i+1 and their points.
Real max_adjacent_cost(int i, int a, int b, const ProblemInstance& inst,
                       const CostFamily& realized);

struct ChainBound {
  Real path_value = 0;
  Real tilde_sum = 0;
  bool holds = false;
};

// Checks c(path) <= sum of adjacent c~ terms along the path.
ChainBound chain_bound(const Path& path, const ProblemInstance& inst,
                       const CostFamily& realized);

// Well-formedness used throughout: endpoint choices are points, skips only
// where the instance permits them, indices in range.
bool path_well_formed(const Path& path, const ProblemInstance& inst);

}  // namespace hjmot
