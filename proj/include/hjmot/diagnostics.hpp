#pragma once

#include "hjmot/reduction.hpp"

namespace hjmot {

// Default step grid for the finite-difference probes, decreasing.
std::vector<Real> default_t_grid();

// Path cost with the source point moved off-grid to `moved`, evaluated
// directly from the stage coordinates (kernel cost kinds only).  For
// Euclidean kinds `moved` is a coordinate vector; for the circle it is a
// one-entry angle.
Real path_cost_moved_source(const ProblemInstance& inst, const Path& path, const Vec& moved);

// Exact h at an off-grid source location: the minimum over every grid
// continuation, enumerated outright.
Real h_moved_source(const ProblemInstance& inst, const Vec& moved);

// exp map of the source chart: coords + t*v on Euclidean stages, angle
// + t*v on the circle.
Vec exp_source(const ProblemInstance& inst, int source, const Vec& v, Real t);

// Geodesic distance between the moved source location and the source grid
// point, in the stage-0 chart.
Real source_distance(const ProblemInstance& inst, int source, const Vec& moved);

struct DerivativeEstimate {
  std::vector<Real> t;
  std::vector<Real> quotient;  // [c(exp(tv), tail) - c(path)] / t per t
  Real extrapolated = 0;       // first-order Richardson on the two smallest t
};

// Finite-difference directional derivative of the path cost in the source
// variable, along direction v.  Requires a kernel cost kind.
DerivativeEstimate directional_derivative(const ProblemInstance& inst, const Path& path,
                                          const Vec& v, const std::vector<Real>& t_grid);

struct LocalControlProbe {
  std::vector<Path> continuations;  // S(source)
  std::vector<Real> t;
  Mat r;         // r(t) = c(exp(tv), tail) - h(exp(tv)); rows: t, cols: continuation
  Mat r_over_t;
  bool pass = false;  // every slope column decays toward zero across the grid
};

// Probes the local control condition: the excess of each optimal
// continuation over h stays o(t) along the moved source.
LocalControlProbe local_control_probe(const ProblemInstance& inst, int source, const Vec& v,
                                      const std::vector<Real>& t_grid, Real tol = 1e-9);

struct TwistProbeResult {
  std::vector<Path> continuations;
  std::vector<Real> D;  // extrapolated derivative per continuation
  bool injective = false;
};

// Geodesic twist probe: the derivative map must separate the optimal
// continuations pairwise beyond tol.
TwistProbeResult twist_probe(const ProblemInstance& inst, int source, const Vec& v,
                             Real tol = 1e-9);

}  // namespace hjmot
