#include "hjmot/monge.hpp"

#include <map>
#include <random>
#include <set>
#include <sstream>

namespace hjmot {

TwistReport check_discrete_twist(const ProblemInstance& inst, Real tol) {
  TwistReport rep;
  rep.pass = true;
  for (int a = 0; a < inst.stage_size(0); ++a) {
    if (inst.mu0.weights[a] <= kSupportEps) continue;
    OptimalContinuationSet set = optimal_continuations(inst, a, tol);
    rep.sources.push_back(a);
    rep.cardinality.push_back(static_cast<int>(set.paths.size()));
    if (set.paths.size() != 1) rep.pass = false;
  }
  return rep;
}

MongeMap extract_monge_map(const ProblemInstance& inst, const HJMOTSolution& sol) {
  std::map<int, std::vector<std::pair<Path, Real>>> by_source;
  for (const auto& [p, mass] : sol.path_atoms) by_source[p.choices[0]].push_back({p, mass});

  for (const auto& [src, atoms] : by_source) {
    if (atoms.size() > 1) {
      std::ostringstream os;
      os << "source " << src << " splits mass:";
      for (const auto& [p, mass] : atoms) {
        os << " mass " << mass << " on (";
        for (int k = 0; k < p.stages(); ++k) {
          if (k) os << ",";
          if (p.choices[k] == kSkip)
            os << "skip";
          else
            os << p.choices[k];
        }
        os << ")";
      }
      throw MongePreconditionError(os.str());
    }
  }

  MongeMap map;
  for (const auto& [src, atoms] : by_source) {
    map.sources.push_back(src);
    map.paths.push_back(atoms.front().first);
  }
  (void)inst;
  return map;
}

UniquenessProbe uniqueness_probe(const ProblemInstance& inst, Real jitter, int trials,
                                 uint64_t seed) {
  UniquenessProbe probe;
  probe.trials = trials;

  auto support_of = [](const HJMOTSolution& sol) {
    std::set<std::vector<int>> s;
    for (const auto& [p, mass] : sol.path_atoms) s.insert(p.choices);
    return s;
  };
  const auto baseline = support_of(solve_hjmot(inst));

  ProblemInstance work = inst;
  work.costs = realize_costs(inst);

  for (int t = 0; t < trials; ++t) {
    // Independent substream per trial; aggregation order is fixed.
    std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * static_cast<uint64_t>(t + 1)));
    ProblemInstance jittered = work;
    for (Mat& C : jittered.costs.matrices)
      for (Eigen::Index r = 0; r < C.rows(); ++r)
        for (Eigen::Index c = 0; c < C.cols(); ++c) {
          if (C(r, c) == kInf) continue;
          Real u = static_cast<Real>(rng() >> 11) * 0x1.0p-53;  // [0,1)
          C(r, c) = std::max(Real(0), C(r, c) + (2 * u - 1) * jitter);
        }
    if (support_of(solve_hjmot(jittered)) != baseline) ++probe.changed;
  }
  probe.stability =
      trials == 0 ? 1.0 : static_cast<Real>(trials - probe.changed) / static_cast<Real>(trials);
  return probe;
}

}  // namespace hjmot
