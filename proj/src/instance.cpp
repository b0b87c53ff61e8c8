#include "hjmot/instance.hpp"

#include <set>
#include <sstream>

namespace hjmot {

std::string to_string(CostKind kind) {
  switch (kind) {
    case CostKind::ExplicitMatrices: return "ExplicitMatrices";
    case CostKind::SquaredEuclidean: return "SquaredEuclidean";
    case CostKind::Euclidean: return "Euclidean";
    case CostKind::SquaredCircleGeodesic: return "SquaredCircleGeodesic";
  }
  throw InputError("unknown cost kind");
}

CostKind cost_kind_from_string(const std::string& s) {
  if (s == "ExplicitMatrices") return CostKind::ExplicitMatrices;
  if (s == "SquaredEuclidean") return CostKind::SquaredEuclidean;
  if (s == "Euclidean") return CostKind::Euclidean;
  if (s == "SquaredCircleGeodesic") return CostKind::SquaredCircleGeodesic;
  throw InputError("unknown cost kind: " + s);
}

Real squared_euclidean(const Vec& a, const Vec& b) { return (a - b).squaredNorm(); }

Real euclidean(const Vec& a, const Vec& b) { return (a - b).norm(); }

Real circle_arc_distance(Real a, Real b) {
  Real d = std::fmod(std::abs(a - b), 2.0 * M_PI);
  return std::min(d, 2.0 * M_PI - d);
}

Real squared_circle_geodesic(Real a, Real b) {
  Real d = circle_arc_distance(a, b);
  return d * d;
}

namespace {

void add(ValidationReport& rep, const std::string& code, const std::string& detail) {
  rep.violations.push_back({code, detail});
}

std::string at_stage(int k) {
  std::ostringstream os;
  os << "stage " << k;
  return os.str();
}

void validate_measure(ValidationReport& rep, const ProblemInstance& inst,
                      const DiscreteMeasure& mu, int k, const std::string& name) {
  if (mu.stage_index != k)
    add(rep, "stage-index-mismatch", name + " carries stage " + std::to_string(mu.stage_index));
  // Endpoint measures live on the plain point set: no skip slot.
  if (mu.weights.size() != inst.stage_size(k)) {
    add(rep, "measure-shape", name + " has " + std::to_string(mu.weights.size()) +
                                  " weights, expected " + std::to_string(inst.stage_size(k)));
    return;
  }
  Real sum = 0;
  for (Eigen::Index i = 0; i < mu.weights.size(); ++i) {
    Real w = mu.weights[i];
    if (!(w >= 0) || !std::isfinite(w)) {
      add(rep, "negative-weight", name + " atom " + std::to_string(i));
      return;
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > kNormTol)
    add(rep, "measure-not-normalized", name + " sums to " + std::to_string(sum));
}

}  // namespace

ValidationReport validate(const ProblemInstance& inst) {
  ValidationReport rep;
  if (inst.K < 1) {
    add(rep, "bad-k", "K must be >= 1");
    return rep;
  }
  if (static_cast<int>(inst.spaces.size()) != inst.K + 1) {
    add(rep, "bad-shape", "expected K+1 stage spaces");
    return rep;
  }
  for (int k = 0; k <= inst.K; ++k) {
    const StageSpace& sp = inst.spaces[k];
    if (sp.stage_index != k)
      add(rep, "stage-index-mismatch", at_stage(k) + " labelled " + std::to_string(sp.stage_index));
    if (sp.points.empty()) {
      add(rep, "empty-stage", at_stage(k));
      continue;
    }
    std::set<std::string> seen(sp.points.begin(), sp.points.end());
    if (static_cast<int>(seen.size()) != sp.size())
      add(rep, "duplicate-label", at_stage(k));
    if (sp.has_coords()) {
      if (static_cast<int>(sp.coords.size()) != sp.size())
        add(rep, "coords-shape", at_stage(k));
      else {
        Eigen::Index dim = sp.coords.front().size();
        if (dim < 1) add(rep, "coords-shape", at_stage(k) + " has zero-dimensional coords");
        for (const Vec& c : sp.coords)
          if (c.size() != dim) add(rep, "coord-dim-mismatch", at_stage(k));
      }
    }
    if (sp.has_angles() && static_cast<int>(sp.angles.size()) != sp.size())
      add(rep, "angles-shape", at_stage(k));
  }
  if (!rep.ok()) return rep;

  switch (inst.costs.kind) {
    case CostKind::ExplicitMatrices: {
      if (static_cast<int>(inst.costs.matrices.size()) != pair_count(inst.K)) {
        add(rep, "cost-shape", "expected one matrix per stage pair");
        break;
      }
      for (int i = 0; i < inst.K; ++i)
        for (int j = i + 1; j <= inst.K; ++j) {
          const Mat& C = inst.costs.matrices[pair_index(i, j, inst.K)];
          if (C.rows() != inst.stage_size(i) || C.cols() != inst.stage_size(j)) {
            add(rep, "cost-shape", "pair (" + std::to_string(i) + "," + std::to_string(j) + ")");
            continue;
          }
          for (Eigen::Index a = 0; a < C.rows(); ++a)
            for (Eigen::Index b = 0; b < C.cols(); ++b) {
              Real c = C(a, b);
              if (std::isnan(c) || c < 0)
                add(rep, "negative-cost", "pair (" + std::to_string(i) + "," + std::to_string(j) +
                                              ") entry (" + std::to_string(a) + "," +
                                              std::to_string(b) + ")");
            }
        }
      break;
    }
    case CostKind::SquaredEuclidean:
    case CostKind::Euclidean: {
      Eigen::Index dim = -1;
      for (int k = 0; k <= inst.K; ++k) {
        if (!inst.spaces[k].has_coords()) {
          add(rep, "missing-coords", at_stage(k));
          continue;
        }
        if (dim < 0) dim = inst.spaces[k].coords.front().size();
        if (inst.spaces[k].coords.front().size() != dim)
          add(rep, "coord-dim-mismatch", at_stage(k));
      }
      break;
    }
    case CostKind::SquaredCircleGeodesic:
      for (int k = 0; k <= inst.K; ++k)
        if (!inst.spaces[k].has_angles()) add(rep, "missing-angles", at_stage(k));
      break;
  }

  validate_measure(rep, inst, inst.mu0, 0, "mu0");
  validate_measure(rep, inst, inst.muK, inst.K, "muK");
  return rep;
}

CostFamily realize_costs(const ProblemInstance& inst) {
  if (inst.costs.kind == CostKind::ExplicitMatrices) return inst.costs;

  CostFamily out;
  out.kind = CostKind::ExplicitMatrices;
  out.matrices.resize(pair_count(inst.K));
  for (int i = 0; i < inst.K; ++i) {
    for (int j = i + 1; j <= inst.K; ++j) {
      const StageSpace& si = inst.spaces[i];
      const StageSpace& sj = inst.spaces[j];
      Mat C(si.size(), sj.size());
      switch (inst.costs.kind) {
        case CostKind::SquaredEuclidean:
        case CostKind::Euclidean: {
          if (!si.has_coords() || !sj.has_coords())
            throw InputError("kernel cost kind requires coords on every stage");
          const bool squared = inst.costs.kind == CostKind::SquaredEuclidean;
          for (int a = 0; a < si.size(); ++a)
            for (int b = 0; b < sj.size(); ++b)
              C(a, b) = squared ? squared_euclidean(si.coords[a], sj.coords[b])
                                : euclidean(si.coords[a], sj.coords[b]);
          break;
        }
        case CostKind::SquaredCircleGeodesic: {
          if (!si.has_angles() || !sj.has_angles())
            throw InputError("circle cost kind requires angles on every stage");
          for (int a = 0; a < si.size(); ++a)
            for (int b = 0; b < sj.size(); ++b)
              C(a, b) = squared_circle_geodesic(si.angles[a], sj.angles[b]);
          break;
        }
        default:
          break;
      }
      out.matrices[pair_index(i, j, inst.K)] = std::move(C);
    }
  }
  return out;
}

}  // namespace hjmot
