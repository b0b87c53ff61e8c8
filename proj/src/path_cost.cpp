#include "hjmot/path_cost.hpp"

namespace hjmot {

ActiveIndices active_indices(const Path& path, int K) {
  ActiveIndices out;
  out.indices.push_back(0);
  for (int k = 1; k <= K - 1; ++k)
    if (path.choices[k] != kSkip) out.indices.push_back(k);
  out.indices.push_back(K);
  out.n = static_cast<int>(out.indices.size());
  return out;
}

std::vector<std::pair<int, int>> extract(const Path& path, const ProblemInstance& inst) {
  ActiveIndices act = active_indices(path, inst.K);
  std::vector<std::pair<int, int>> out;
  out.reserve(act.indices.size());
  for (int k : act.indices) out.emplace_back(k, path.choices[k]);
  return out;
}

Real path_cost(const Path& path, const ProblemInstance& inst, const CostFamily& realized) {
  ActiveIndices act = active_indices(path, inst.K);
  Real total = 0;
  for (int l = 0; l + 1 < act.n; ++l) {
    int i = act.indices[l];
    int j = act.indices[l + 1];
    total += realized.matrices[pair_index(i, j, inst.K)](path.choices[i], path.choices[j]);
  }
  return total;
}

Real path_cost(const Path& path, const ProblemInstance& inst) {
  return path_cost(path, inst, realize_costs(inst));
}

Real max_adjacent_cost(int i, int a, int b, const ProblemInstance& inst,
                       const CostFamily& realized) {
  if (a != kSkip && b != kSkip)
    return realized.matrices[pair_index(i, i + 1, inst.K)](a, b);
  if (a != kSkip && b == kSkip) {
    Real sup = -kInf;
    for (int j = i + 2; j <= inst.K; ++j) {
      const Mat& C = realized.matrices[pair_index(i, j, inst.K)];
      for (int x = 0; x < inst.stage_size(j); ++x) sup = std::max(sup, C(a, x));
    }
    return sup;  // stage K is always active and nonempty, so never empty
  }
  return 0;
}

ChainBound chain_bound(const Path& path, const ProblemInstance& inst,
                       const CostFamily& realized) {
  ChainBound out;
  out.path_value = path_cost(path, inst, realized);
  out.tilde_sum = 0;
  for (int i = 0; i < inst.K; ++i)
    out.tilde_sum += max_adjacent_cost(i, path.choices[i], path.choices[i + 1], inst, realized);
  out.holds = out.path_value <= out.tilde_sum + 1e-9 * std::max(Real(1), out.tilde_sum);
  return out;
}

bool path_well_formed(const Path& path, const ProblemInstance& inst) {
  if (path.stages() != inst.K + 1) return false;
  for (int k = 0; k <= inst.K; ++k) {
    int c = path.choices[k];
    if (c == kSkip) {
      if (k == 0 || k == inst.K || !inst.allow_skips) return false;
    } else if (c < 0 || c >= inst.stage_size(k)) {
      return false;
    }
  }
  return true;
}

}  // namespace hjmot
