#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace hjmot {

using Real = double;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr Real kInf = std::numeric_limits<Real>::infinity();

// Augmented stage state: a point index into the stage space, or kSkip for
// the isolated bypass state of an intermediate stage.
inline constexpr int kSkip = -1;

// Atoms with weight below this are treated as outside the support.
inline constexpr Real kSupportEps = 1e-15;

// Absolute tolerance for probability normalization checks.
inline constexpr Real kNormTol = 1e-12;

// Uniform slack policy for inequality checks: relative 1e-9 with an
// absolute floor of 1e-12, referenced to max(1, |ref|).
inline Real slack_allowance(Real ref, Real rel = 1e-9) {
  return std::max(1e-12, rel * std::max(Real(1), std::abs(ref)));
}

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when an operation requires a deterministic (Monge) support
// structure and the solution splits mass or has ambiguous continuations.
struct MongePreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One element of the path space: a state per stage.  choices[0] and
// choices[K] are always point indices; intermediate entries may be kSkip.
struct Path {
  std::vector<int> choices;

  Path() = default;
  explicit Path(std::vector<int> c) : choices(std::move(c)) {}

  int stages() const { return static_cast<int>(choices.size()); }
  bool operator==(const Path& o) const { return choices == o.choices; }
  bool operator<(const Path& o) const { return choices < o.choices; }
};

}  // namespace hjmot
