#pragma once

#include "hjmot/solver.hpp"

namespace hjmot {

// Per-stage potentials over the augmented state sets: their sum is below
// the path cost everywhere and equal to it on the optimal support.
struct SplittingPotentials {
  std::vector<Vec> v;  // K+1 vectors, sized aug_size(k)
};

struct CheckResult {
  std::string name;
  bool pass = false;
  Real slack = 0;  // worst violation observed (<= 0 when passing margins)
  std::string witness;
  std::vector<Path> witness_paths;
};

struct CertificateReport {
  std::vector<CheckResult> checks;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

// Builds potentials from the exact solver's transport duals: v_0 = u,
// v_K = v (shifted so v_K vanishes on the first support terminal), and
// identically zero on the intermediate augmented stages.  Refuses
// solutions without duals (entropic method).
SplittingPotentials splitting_potentials(const ProblemInstance& inst,
                                         const HJMOTSolution& sol);

// Global inequality sum_k v_k <= c over the path space (exhaustive when
// |Omega| <= 2e4, else sampled plus all support paths) and equality on
// the support.
CheckResult check_splitting(const ProblemInstance& inst, const SplittingPotentials& pot,
                            const HJMOTSolution& sol, Real tol = 1e-9,
                            uint64_t seed = 20240901);

// For sampled support subsets of size m <= m_max, enumerates every tuple
// of per-stage permutations (sampled once the tuple count passes 1e6) and
// checks that no rearrangement lowers the total cost.
CheckResult check_cyclical_monotonicity(const ProblemInstance& inst, const HJMOTSolution& sol,
                                        int m_max = 3, int samples = 200, Real tol = 1e-9,
                                        uint64_t seed = 20240902);

// Sparse measure on the path space; choices use kSkip for the skip state.
using PathMeasure = std::vector<std::pair<Path, Real>>;

// Kernel-composition gluing of consecutive pairwise plans (dense matrices
// over augmented state pairs) into one path measure, per
// pi_{0..i+1} = pi_{0..i} (x) kappa_{i+1}.  Atoms below 1e-15 are dropped.
// Throws InputError when consecutive plans disagree on the shared
// marginal beyond 1e-9.
PathMeasure glue_pairwise(const ProblemInstance& inst, const std::vector<Mat>& pairwise_plans,
                          const std::vector<Vec>& marginals);

// Verifies that the glued measure reproduces all stage marginals and all
// adjacent pairwise projections of its inputs.
CheckResult check_glued_marginals(const ProblemInstance& inst, const PathMeasure& glued,
                                  const std::vector<Mat>& plans,
                                  const std::vector<Vec>& marginals, Real tol = 1e-12);

// Pairwise projection of a path measure onto stages (k, k+1), over the
// augmented state sets.
Mat pairwise_projection(const ProblemInstance& inst, const PathMeasure& atoms, int k);

struct TildeBound {
  Real bound = 0;  // sum of optimal-transport values of the c~ matrices
  Real M = 0;
  bool holds = false;
  std::vector<Real> per_stage;
};

// Finiteness bound: M <= sum_i C~_{i,i+1}(mu_i, mu_{i+1}) for any choice
// of intermediate measures (given over the augmented sets, skip slot
// last).  An infinite stage value makes the bound vacuous.
TildeBound upper_bound_via_tilde(const ProblemInstance& inst,
                                 const std::vector<Vec>& intermediate_measures);

struct DecompositionResult {
  Real sum = 0;  // sum of optimal-transport values of the c^ matrices
  Real M = 0;
  Real gap = 0;
  std::vector<Real> per_stage;
};

// Minimal-cost decomposition: rebuilds the stagewise c^ matrices from the
// solution's support (unrealized transitions are +inf) and checks
// M = sum_i C^_{i,i+1}(mu*_i, mu*_{i+1}).  Requires a Monge-structured
// solution; throws MongePreconditionError with the conflicting witness
// otherwise.
DecompositionResult decomposition_check(const ProblemInstance& inst, const HJMOTSolution& sol,
                                        Real tol = 1e-9);

}  // namespace hjmot
