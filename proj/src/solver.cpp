#include "hjmot/solver.hpp"

#include <algorithm>
#include <map>

namespace hjmot {

Real HJMOTSolution::skip_mass(int k) const {
  const DiscreteMeasure& mu = intermediate_marginals[k - 1];
  return mu.weights[mu.weights.size() - 1];
}

Vec stage_pushforward(const std::vector<std::pair<Path, Real>>& atoms,
                      const ProblemInstance& inst, int k) {
  Vec out = Vec::Zero(inst.aug_size(k));
  for (const auto& [path, mass] : atoms) {
    int c = path.choices[k];
    out[c == kSkip ? inst.skip_slot(k) : c] += mass;
  }
  return out;
}

HJMOTSolution solve_hjmot(const ProblemInstance& inst, const SolveOptions& opts) {
  ValidationReport rep = validate(inst);
  if (!rep.ok()) throw InputError("invalid instance: " + rep.violations.front().code);

  ReducedCostTable table = reduced_cost_table(inst, opts.tie_tol);

  // Cheap necessary feasibility screen before running the transport.
  bool any_finite = false;
  for (int a = 0; a < inst.stage_size(0) && !any_finite; ++a)
    for (int b = 0; b < inst.stage_size(inst.K) && !any_finite; ++b)
      if (inst.mu0.weights[a] > kSupportEps && inst.muK.weights[b] > kSupportEps &&
          table.values(a, b) < kInf)
        any_finite = true;
  if (!any_finite) throw InfeasibleError("no finite-cost pair carries endpoint mass");

  HJMOTSolution sol;
  if (opts.method == SolveOptions::Method::Exact) {
    sol.plan = solve_exact_transport(inst.mu0.weights, inst.muK.weights, table.values);
    sol.exact = true;
    sol.has_duals = true;
  } else {
    EntropicResult er = solve_entropic(inst.mu0.weights, inst.muK.weights, table.values,
                                       opts.epsilon, opts.max_iter, opts.stop_tol);
    sol.plan = std::move(er.plan);
    sol.exact = false;
    sol.has_duals = false;
  }
  sol.M = sol.plan.value;

  // Lift plan entries to their argmin paths and merge duplicates.
  std::map<std::vector<int>, Real> merged;
  for (const auto& e : sol.plan.entries)
    merged[table.argmin_paths[e.src][e.dst].choices] += e.mass;

  Real kept = 0;
  for (auto& [choices, mass] : merged) {
    if (mass <= kSupportEps) continue;
    sol.path_atoms.emplace_back(Path(choices), mass);
    kept += mass;
  }
  if (std::abs(kept - 1.0) > 1e-12 && kept > 0) {
    for (auto& [path, mass] : sol.path_atoms) mass /= kept;
  }

  sol.intermediate_marginals.reserve(std::max(0, inst.K - 1));
  for (int k = 1; k <= inst.K - 1; ++k) {
    DiscreteMeasure mu;
    mu.stage_index = k;
    mu.weights = stage_pushforward(sol.path_atoms, inst, k);
    sol.intermediate_marginals.push_back(std::move(mu));
  }
  return sol;
}

}  // namespace hjmot
