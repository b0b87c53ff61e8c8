#pragma once

#include "hjmot/solver.hpp"

namespace hjmot {

struct TwistReport {
  std::vector<int> sources;        // positive-mass sources of mu0
  std::vector<int> cardinality;    // |F(source)| for each
  bool pass = false;               // all cardinalities equal 1
};

// Discrete-type sequential twist: the optimal-continuation set of every
// positive-mass source must be a singleton.
TwistReport check_discrete_twist(const ProblemInstance& inst, Real tol = 1e-9);

// Deterministic optimal map: one path per source atom, with the skip
// decomposition visible in the path's kSkip entries.
struct MongeMap {
  std::vector<int> sources;
  std::vector<Path> paths;
};

// Reads the map off a solution whose mass is not split at any source;
// otherwise throws MongePreconditionError naming the source and its paths.
MongeMap extract_monge_map(const ProblemInstance& inst, const HJMOTSolution& sol);

struct UniquenessProbe {
  int trials = 0;
  int changed = 0;
  Real stability = 1.0;  // fraction of trials whose optimal support is unchanged
};

// Empirical uniqueness proxy: re-solves under independent uniform cost
// perturbations in [-jitter, +jitter] per realized matrix entry (clamped
// at zero to preserve nonnegativity) and reports support stability.
UniquenessProbe uniqueness_probe(const ProblemInstance& inst, Real jitter, int trials,
                                 uint64_t seed);

}  // namespace hjmot
