#pragma once

#include "hjmot/types.hpp"

namespace hjmot {

// A vertex of the transportation polytope together with the optimal value
// and dual potentials.  u(i) + v(j) <= cost(i,j) holds on every finite
// entry, with equality on the support.
struct TransportPlan {
  struct Entry {
    int src;
    int dst;
    Real mass;
  };
  std::vector<Entry> entries;  // sorted by (src, dst), masses > 0
  Real value = 0;
  Vec u, v;
};

// Exact optimum of the transportation linear program by successive
// shortest paths with node potentials.  Masses are scaled to integers
// when every weight is a rational n/d with d <= 1e6; otherwise the solver
// runs in floating point and treats residual supplies below 1e-12 as
// exhausted.  cost may contain +inf to forbid pairs.
//
// Throws InputError on non-normalized inputs and InfeasibleError when the
// remaining mass cannot be routed over finite-cost pairs.
TransportPlan solve_exact_transport(const Vec& mu, const Vec& nu, const Mat& cost);

struct EntropicResult {
  TransportPlan plan;      // rounded to exact marginals; value is its primal cost
  Vec alpha, beta;         // entropic dual potentials (epsilon-scaled log scalings)
  int iterations = 0;
  Real marginal_violation = 0;  // max-norm violation at the stopping iterate
  bool converged = false;
};

// Sinkhorn scaling on the kernel exp(-cost/epsilon), run in the log
// domain.  Stops when the unrounded iterate's marginal violation drops
// below stop_tol; the returned plan is made feasible by marginal-
// correction rounding.
EntropicResult solve_entropic(const Vec& mu, const Vec& nu, const Mat& cost, Real epsilon,
                              int max_iter = 10000, Real stop_tol = 1e-9);

}  // namespace hjmot
