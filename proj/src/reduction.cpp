#include "hjmot/reduction.hpp"

#include <algorithm>

namespace hjmot {

namespace {

int count_skips(const std::vector<int>& choices) {
  int s = 0;
  for (int c : choices)
    if (c == kSkip) ++s;
  return s;
}

// Tie-break key order: fewer skips, then lexicographically lowest visited
// stage sequence, then lowest point indices at the visited stages.
// Compared prefixes always end at the same (stage, point) node.
bool prefix_less(const std::vector<int>& lhs, const std::vector<int>& rhs) {
  int ls = count_skips(lhs), rs = count_skips(rhs);
  if (ls != rs) return ls < rs;
  std::vector<int> lstage, rstage, lpt, rpt;
  for (size_t k = 0; k < lhs.size(); ++k)
    if (lhs[k] != kSkip) {
      lstage.push_back(static_cast<int>(k));
      lpt.push_back(lhs[k]);
    }
  for (size_t k = 0; k < rhs.size(); ++k)
    if (rhs[k] != kSkip) {
      rstage.push_back(static_cast<int>(k));
      rpt.push_back(rhs[k]);
    }
  if (lstage != rstage) return lstage < rstage;
  return lpt < rpt;
}

struct NodeState {
  Real cost = kInf;
  std::vector<int> prefix;  // choices for stages 0..j
};

Real instance_path_space_size(const ProblemInstance& inst) {
  Real prod = 1;
  for (int k = 0; k <= inst.K; ++k) prod *= inst.aug_size(k);
  return prod;
}

}  // namespace

ReducedCostTable reduced_cost_table(const ProblemInstance& inst, Real tie_tol) {
  const CostFamily realized = realize_costs(inst);
  const int K = inst.K;
  const int n0 = inst.stage_size(0);
  const int nK = inst.stage_size(K);

  ReducedCostTable out;
  out.values = Mat::Constant(n0, nK, kInf);
  out.argmin_paths.assign(n0, std::vector<Path>(nK));
  out.ties = Eigen::MatrixXi::Zero(n0, nK);

  for (int a = 0; a < n0; ++a) {
    // Per-source DP over stages in increasing order.
    std::vector<std::vector<NodeState>> best(K + 1);
    for (int k = 0; k <= K; ++k) best[k].resize(inst.stage_size(k));
    best[0][a].cost = 0;
    best[0][a].prefix = {a};

    for (int j = 1; j <= K; ++j) {
      const int lo = inst.allow_skips ? 0 : j - 1;
      for (int b = 0; b < inst.stage_size(j); ++b) {
        NodeState& cur = best[j][b];
        for (int i = j - 1; i >= lo; --i) {
          const Mat& C = realized.matrices[pair_index(i, j, K)];
          for (int x = 0; x < inst.stage_size(i); ++x) {
            const NodeState& pred = best[i][x];
            if (pred.cost == kInf) continue;
            Real leg = C(x, b);
            if (leg == kInf) continue;
            Real cand = pred.cost + leg;
            if (cand > cur.cost) continue;
            std::vector<int> prefix = pred.prefix;
            prefix.insert(prefix.end(), j - i - 1, kSkip);
            prefix.push_back(b);
            if (cand < cur.cost || prefix_less(prefix, cur.prefix)) {
              cur.cost = cand;
              cur.prefix = std::move(prefix);
            }
          }
        }
      }
    }

    for (int b = 0; b < nK; ++b) {
      const NodeState& fin = best[K][b];
      out.values(a, b) = fin.cost;
      if (fin.cost < kInf) {
        out.argmin_paths[a][b] = Path(fin.prefix);
        Real budget = fin.cost * (1 + tie_tol) + 1e-12;
        out.ties(a, b) =
            static_cast<int>(enumerate_paths_within(inst, realized, a, b, budget).size());
      }
    }
  }
  return out;
}

BruteForceResult brute_force_reduced_cost(const ProblemInstance& inst, int a, int b,
                                          Real tie_tol) {
  if (instance_path_space_size(inst) > 1e7)
    throw InputError("instance too large for brute-force enumeration");
  const CostFamily realized = realize_costs(inst);
  const int K = inst.K;

  BruteForceResult res;
  std::vector<std::pair<Real, Path>> all;

  const int nmask = K >= 2 ? (1 << (K - 1)) : 1;
  for (int mask = 0; mask < nmask; ++mask) {
    if (!inst.allow_skips && mask != nmask - 1) continue;
    std::vector<int> visited;  // intermediate stages present in this subset
    for (int k = 1; k <= K - 1; ++k)
      if (mask & (1 << (k - 1))) visited.push_back(k);

    std::vector<int> odo(visited.size(), 0);
    while (true) {
      Path path;
      path.choices.assign(K + 1, kSkip);
      path.choices[0] = a;
      path.choices[K] = b;
      for (size_t v = 0; v < visited.size(); ++v) path.choices[visited[v]] = odo[v];
      Real c = path_cost(path, inst, realized);
      all.emplace_back(c, std::move(path));

      size_t pos = 0;
      while (pos < odo.size()) {
        if (++odo[pos] < inst.stage_size(visited[pos])) break;
        odo[pos] = 0;
        ++pos;
      }
      if (pos == odo.size()) break;
      if (odo.empty()) break;
    }
  }

  for (const auto& [c, p] : all) res.value = std::min(res.value, c);
  if (res.value < kInf) {
    Real budget = res.value * (1 + tie_tol) + 1e-12;
    for (auto& [c, p] : all)
      if (c <= budget) res.minimizers.push_back(p);
  }
  return res;
}

Vec h_values(const ProblemInstance&, const ReducedCostTable& table) {
  Vec h(table.values.rows());
  for (Eigen::Index a = 0; a < table.values.rows(); ++a) h[a] = table.values.row(a).minCoeff();
  return h;
}

std::vector<Path> enumerate_paths_within(const ProblemInstance& inst,
                                         const CostFamily& realized, int source,
                                         int terminal, Real budget) {
  const int K = inst.K;
  // Minimum completion cost from each node to the terminal set, used only
  // for pruning; kept slightly loose against summation-order drift, final
  // costs are re-checked exactly.
  std::vector<std::vector<Real>> suffix(K + 1);
  for (int k = 0; k <= K; ++k) suffix[k].assign(inst.stage_size(k), kInf);
  for (int b = 0; b < inst.stage_size(K); ++b)
    if (terminal < 0 || b == terminal) suffix[K][b] = 0;
  for (int i = K - 1; i >= 0; --i) {
    const int hi = inst.allow_skips ? K : i + 1;
    for (int x = 0; x < inst.stage_size(i); ++x) {
      for (int j = i + 1; j <= hi; ++j) {
        const Mat& C = realized.matrices[pair_index(i, j, K)];
        for (int y = 0; y < inst.stage_size(j); ++y) {
          if (suffix[j][y] == kInf) continue;
          suffix[i][x] = std::min(suffix[i][x], C(x, y) + suffix[j][y]);
        }
      }
    }
  }

  std::vector<Path> out;
  if (suffix[0][source] == kInf) return out;
  const Real guard = budget + 1e-12 * (1 + std::abs(budget));

  std::vector<int> choices(K + 1, kSkip);
  choices[0] = source;

  auto dfs = [&](auto&& self, int i, Real acc) -> void {
    const int hi = inst.allow_skips ? K : i + 1;
    for (int j = i + 1; j <= hi; ++j) {
      const Mat& C = realized.matrices[pair_index(i, j, K)];
      for (int y = 0; y < inst.stage_size(j); ++y) {
        if (j == K && terminal >= 0 && y != terminal) continue;
        if (suffix[j][y] == kInf) continue;
        Real leg = C(choices[i], y);
        if (leg == kInf) continue;
        Real acc2 = acc + leg;
        if (acc2 + suffix[j][y] > guard) continue;
        choices[j] = y;
        if (j == K) {
          if (acc2 <= budget) out.emplace_back(choices);
        } else {
          self(self, j, acc2);
        }
        choices[j] = kSkip;
      }
    }
  };
  dfs(dfs, 0, 0.0);
  return out;
}

OptimalContinuationSet optimal_continuations(const ProblemInstance& inst, int a, Real tol) {
  const CostFamily realized = realize_costs(inst);
  // Backward suffix bound gives h up to summation-order noise; a slightly
  // padded enumeration then pins the exact forward-evaluated minimum.
  Real h_bound = kInf;
  {
    std::vector<std::vector<Real>> suffix(inst.K + 1);
    for (int k = 0; k <= inst.K; ++k) suffix[k].assign(inst.stage_size(k), kInf);
    suffix[inst.K].assign(inst.stage_size(inst.K), 0.0);
    for (int i = inst.K - 1; i >= 0; --i) {
      const int hi = inst.allow_skips ? inst.K : i + 1;
      for (int x = 0; x < inst.stage_size(i); ++x)
        for (int j = i + 1; j <= hi; ++j) {
          const Mat& C = realized.matrices[pair_index(i, j, inst.K)];
          for (int y = 0; y < inst.stage_size(j); ++y)
            if (suffix[j][y] < kInf)
              suffix[i][x] = std::min(suffix[i][x], C(x, y) + suffix[j][y]);
        }
    }
    h_bound = suffix[0][a];
  }
  if (h_bound == kInf) throw InfeasibleError("h is infinite at source " + std::to_string(a));

  std::vector<Path> near =
      enumerate_paths_within(inst, realized, a, -1, h_bound * (1 + tol) + 1e-12);
  Real h = kInf;
  for (const Path& p : near) h = std::min(h, path_cost(p, inst, realized));
  OptimalContinuationSet out;
  out.source = a;
  const Real budget = h * (1 + tol) + 1e-12;
  for (Path& p : near)
    if (path_cost(p, inst, realized) <= budget) out.paths.push_back(std::move(p));
  return out;
}

}  // namespace hjmot
