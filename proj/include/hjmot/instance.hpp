#pragma once

#include "hjmot/types.hpp"

namespace hjmot {

enum class CostKind {
  ExplicitMatrices,
  SquaredEuclidean,
  Euclidean,
  SquaredCircleGeodesic,
};

std::string to_string(CostKind kind);
CostKind cost_kind_from_string(const std::string& s);

// One finite stage space X_k.  Points are identified by position; labels
// are carried for serialization.  coords (per-point real vectors of a
// common dimension) or angles (radians, circle instances) are optional
// and required only by kernel cost kinds.
struct StageSpace {
  int stage_index = 0;
  std::vector<std::string> points;
  std::vector<Vec> coords;
  std::vector<Real> angles;

  int size() const { return static_cast<int>(points.size()); }
  bool has_coords() const { return !coords.empty(); }
  bool has_angles() const { return !angles.empty(); }
};

// Pairwise cost family c_{i,j} for 0 <= i < j <= K.  Kernel kinds derive
// matrices from stage coordinates; ExplicitMatrices stores them densely,
// one matrix per ordered pair in pair_index order.  Entries are >= 0 or
// +inf for forbidden pairs.
struct CostFamily {
  CostKind kind = CostKind::ExplicitMatrices;
  std::vector<Mat> matrices;
};

// Flat index of the ordered stage pair (i, j), i < j, among all such pairs.
inline int pair_index(int i, int j, int K) {
  // pairs (0,1..K), (1,2..K), ...: offset of row i is i*K - i*(i-1)/2
  return i * K - i * (i - 1) / 2 + (j - i - 1);
}

inline int pair_count(int K) { return K * (K + 1) / 2; }

// Atomic measure on a stage's augmented state set.  For intermediate
// stages the final slot of `weights` is the skip state; endpoint stages
// have no skip slot.
struct DiscreteMeasure {
  int stage_index = 0;
  Vec weights;
};

struct ProblemInstance {
  int K = 1;
  std::vector<StageSpace> spaces;  // K+1 entries
  CostFamily costs;
  DiscreteMeasure mu0;
  DiscreteMeasure muK;
  bool allow_skips = true;

  int stage_size(int k) const { return spaces[k].size(); }
  bool stage_has_skip(int k) const { return allow_skips && k >= 1 && k <= K - 1; }
  // Number of augmented states at stage k (points plus skip slot when present).
  int aug_size(int k) const { return stage_size(k) + (k >= 1 && k <= K - 1 ? 1 : 0); }
  // Slot of the skip state in augmented-indexed vectors/matrices.
  int skip_slot(int k) const { return stage_size(k); }
};

struct Violation {
  std::string code;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

// Checks every structural invariant of the instance and returns all
// violations with machine-readable codes; an empty report means valid.
ValidationReport validate(const ProblemInstance& inst);

// Materializes kernel cost kinds into explicit matrices; idempotent on
// ExplicitMatrices.  Throws InputError if a kernel kind lacks coordinates.
CostFamily realize_costs(const ProblemInstance& inst);

// Pairwise kernel evaluation shared by realize_costs and the off-grid
// diagnostics (which move the source coordinate between grid points).
Real squared_euclidean(const Vec& a, const Vec& b);
Real euclidean(const Vec& a, const Vec& b);
Real circle_arc_distance(Real a, Real b);
Real squared_circle_geodesic(Real a, Real b);

}  // namespace hjmot
