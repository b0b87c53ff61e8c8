#include "hjmot/diagnostics.hpp"

namespace hjmot {

std::vector<Real> default_t_grid() { return {1e-2, 1e-3, 1e-4, 1e-5}; }

namespace {

void require_kernel(const ProblemInstance& inst) {
  if (inst.costs.kind == CostKind::ExplicitMatrices)
    throw InputError("probe requires kernel costs");
}

Real kernel_leg(const ProblemInstance& inst, int i, int j, const Vec& xi, const Vec& xj) {
  switch (inst.costs.kind) {
    case CostKind::SquaredEuclidean: return squared_euclidean(xi, xj);
    case CostKind::Euclidean: return euclidean(xi, xj);
    case CostKind::SquaredCircleGeodesic: return squared_circle_geodesic(xi[0], xj[0]);
    default: throw InputError("probe requires kernel costs");
  }
  (void)i;
  (void)j;
}

Vec point_chart(const ProblemInstance& inst, int stage, int point) {
  if (inst.costs.kind == CostKind::SquaredCircleGeodesic) {
    Vec a(1);
    a[0] = inst.spaces[stage].angles[point];
    return a;
  }
  return inst.spaces[stage].coords[point];
}

}  // namespace

Real path_cost_moved_source(const ProblemInstance& inst, const Path& path, const Vec& moved) {
  require_kernel(inst);
  ActiveIndices act = active_indices(path, inst.K);
  Real total = 0;
  for (int l = 0; l + 1 < act.n; ++l) {
    int i = act.indices[l];
    int j = act.indices[l + 1];
    Vec xi = i == 0 ? moved : point_chart(inst, i, path.choices[i]);
    Vec xj = point_chart(inst, j, path.choices[j]);
    total += kernel_leg(inst, i, j, xi, xj);
  }
  return total;
}

Real h_moved_source(const ProblemInstance& inst, const Vec& moved) {
  require_kernel(inst);
  Real prod = 1;
  for (int k = 1; k <= inst.K; ++k) prod *= inst.aug_size(k);
  if (prod > 1e7) throw InputError("instance too large for exact off-grid h");

  // Odometer over the continuation states; the source slot is fixed.
  Real best = kInf;
  std::vector<int> odo(inst.K, 0);  // stages 1..K
  while (true) {
    Path p;
    p.choices.assign(inst.K + 1, 0);
    for (int k = 1; k <= inst.K; ++k)
      p.choices[k] = odo[k - 1] == inst.stage_size(k) ? kSkip : odo[k - 1];
    best = std::min(best, path_cost_moved_source(inst, p, moved));
    int k = inst.K - 1;
    for (; k >= 0; --k) {
      int states = inst.stage_has_skip(k + 1) ? inst.stage_size(k + 1) + 1
                                              : inst.stage_size(k + 1);
      if (++odo[k] < states) break;
      odo[k] = 0;
    }
    if (k < 0) break;
  }
  return best;
}

Vec exp_source(const ProblemInstance& inst, int source, const Vec& v, Real t) {
  Vec base = point_chart(inst, 0, source);
  return base + t * v;
}

Real source_distance(const ProblemInstance& inst, int source, const Vec& moved) {
  Vec base = point_chart(inst, 0, source);
  if (inst.costs.kind == CostKind::SquaredCircleGeodesic)
    return circle_arc_distance(base[0], moved[0]);
  return (moved - base).norm();
}

DerivativeEstimate directional_derivative(const ProblemInstance& inst, const Path& path,
                                          const Vec& v, const std::vector<Real>& t_grid) {
  require_kernel(inst);
  if (t_grid.empty()) throw InputError("empty t grid");
  for (size_t i = 0; i + 1 < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i + 1]) || !(t_grid[i + 1] > 0))
      throw InputError("t grid must be decreasing and positive");

  const int source = path.choices[0];
  const Real c0 = path_cost_moved_source(inst, path, point_chart(inst, 0, source));

  DerivativeEstimate est;
  est.t = t_grid;
  for (Real t : t_grid) {
    Real ct = path_cost_moved_source(inst, path, exp_source(inst, source, v, t));
    est.quotient.push_back((ct - c0) / t);
  }
  if (est.quotient.size() >= 2) {
    // First-order Richardson on the two smallest steps.
    Real ta = est.t[est.t.size() - 2], tb = est.t.back();
    Real qa = est.quotient[est.quotient.size() - 2], qb = est.quotient.back();
    est.extrapolated = (ta * qb - tb * qa) / (ta - tb);
  } else {
    est.extrapolated = est.quotient.back();
  }
  return est;
}

LocalControlProbe local_control_probe(const ProblemInstance& inst, int source, const Vec& v,
                                      const std::vector<Real>& t_grid, Real tol) {
  require_kernel(inst);
  if (t_grid.size() < 2) throw InputError("insufficient grid");
  LocalControlProbe probe;
  probe.continuations = optimal_continuations(inst, source, tol).paths;
  probe.t = t_grid;
  const int nt = static_cast<int>(t_grid.size());
  const int nc = static_cast<int>(probe.continuations.size());
  probe.r = Mat::Zero(nt, nc);
  probe.r_over_t = Mat::Zero(nt, nc);

  for (int ti = 0; ti < nt; ++ti) {
    Vec moved = exp_source(inst, source, v, t_grid[ti]);
    Real h = h_moved_source(inst, moved);
    for (int ci = 0; ci < nc; ++ci) {
      Real c = path_cost_moved_source(inst, probe.continuations[ci], moved);
      probe.r(ti, ci) = c - h;
      probe.r_over_t(ti, ci) = (c - h) / t_grid[ti];
    }
  }

  probe.pass = true;
  for (int ci = 0; ci < nc; ++ci)
    for (int ti = 0; ti + 1 < nt; ++ti) {
      Real prev = probe.r_over_t(ti, ci), next = probe.r_over_t(ti + 1, ci);
      if (!(next <= 0.9 * prev + 1e-12)) probe.pass = false;
    }
  return probe;
}

TwistProbeResult twist_probe(const ProblemInstance& inst, int source, const Vec& v, Real tol) {
  require_kernel(inst);
  TwistProbeResult res;
  res.continuations = optimal_continuations(inst, source, tol).paths;
  for (const Path& p : res.continuations)
    res.D.push_back(directional_derivative(inst, p, v, default_t_grid()).extrapolated);
  res.injective = true;
  for (size_t i = 0; i < res.D.size(); ++i)
    for (size_t j = i + 1; j < res.D.size(); ++j)
      if (!(std::abs(res.D[i] - res.D[j]) > tol)) res.injective = false;
  return res;
}

}  // namespace hjmot
