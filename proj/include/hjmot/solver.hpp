#pragma once

#include "hjmot/reduction.hpp"
#include "hjmot/transport.hpp"

namespace hjmot {

struct SolveOptions {
  enum class Method { Exact, Entropic };
  Method method = Method::Exact;
  Real epsilon = 1e-2;   // entropic only
  int max_iter = 10000;  // entropic only
  Real stop_tol = 1e-9;  // entropic only
  Real tie_tol = 1e-9;
};

// An optimal (or, for the entropic method, feasible near-optimal) path
// coupling: sparse path atoms, objective, and the induced intermediate
// marginals including skip mass.
struct HJMOTSolution {
  std::vector<std::pair<Path, Real>> path_atoms;  // sorted by path, masses > 0
  Real M = 0;
  std::vector<DiscreteMeasure> intermediate_marginals;  // stages 1..K-1
  TransportPlan plan;                                   // endpoint coupling on c_red
  bool exact = true;
  bool has_duals = false;  // exact method only

  Real skip_mass(int k) const;  // mass on the skip state of stage k
};

// Pushforward of path atoms onto stage k's augmented state set, summed in
// atom order; the solver and its feasibility checks share this routine.
Vec stage_pushforward(const std::vector<std::pair<Path, Real>>& atoms,
                      const ProblemInstance& inst, int k);

// Solves the full problem by the jump-DAG reduction followed by
// two-marginal transport on c_red, then lifts each plan entry to the
// stored argmin path.  Ties all go to the lexicographic winner.
HJMOTSolution solve_hjmot(const ProblemInstance& inst, const SolveOptions& opts = {});

}  // namespace hjmot
