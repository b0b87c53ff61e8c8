#include "hjmot/transport.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>

namespace hjmot {

namespace {

constexpr int64_t kMaxDenominator = 1'000'000;

// Best rational approximation p/q with q <= qmax via continued fractions.
std::optional<std::pair<int64_t, int64_t>> rationalize(Real w, int64_t qmax) {
  if (w < 0 || !std::isfinite(w)) return std::nullopt;
  int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  Real x = w;
  for (int it = 0; it < 64; ++it) {
    Real fa = std::floor(x);
    if (fa > 1e18) break;
    int64_t a = static_cast<int64_t>(fa);
    if (q0 + (q1 > 0 ? a * q1 : 0) > qmax && q1 > 0) break;
    int64_t p2 = a * p1 + p0;
    int64_t q2 = a * q1 + q0;
    if (q2 > qmax) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    Real frac = x - fa;
    if (frac < 1e-15) break;
    x = 1.0 / frac;
  }
  if (q1 == 0) return std::nullopt;
  if (std::abs(w - static_cast<Real>(p1) / static_cast<Real>(q1)) > 1e-12) return std::nullopt;
  return std::make_pair(p1, q1);
}

// Common denominator <= 1e6 making all weights integral, if one exists.
std::optional<int64_t> common_denominator(const Vec& mu, const Vec& nu) {
  int64_t L = 1;
  auto fold = [&](const Vec& w) -> bool {
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      auto r = rationalize(w[i], kMaxDenominator);
      if (!r) return false;
      int64_t q = r->second;
      L = std::lcm(L, q);
      if (L > kMaxDenominator) return false;
    }
    return true;
  };
  if (!fold(mu) || !fold(nu)) return std::nullopt;
  auto check = [&](const Vec& w) -> bool {
    int64_t total = 0;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      Real scaled = w[i] * static_cast<Real>(L);
      int64_t r = static_cast<int64_t>(std::llround(scaled));
      if (std::abs(scaled - static_cast<Real>(r)) > 1e-6) return false;
      total += r;
    }
    return total == L;
  };
  if (!check(mu) || !check(nu)) return std::nullopt;
  return L;
}

// Removes support cycles by alternating mass around them, choosing the
// orientation with nonpositive cycle cost.  Support arcs are dual-tight,
// so cycles are cost-neutral up to rounding; afterwards the support is a
// forest, i.e. the plan is a vertex with at most n+m-1 entries.
template <typename FlowMatrix, typename Scalar>
void cancel_support_cycles(FlowMatrix& flow, const Mat& cost, int n, int m) {
  const int nodes = n + m;
  for (int guard = 0; guard < n * m + 1; ++guard) {
    // adjacency over the support graph
    std::vector<std::vector<std::pair<int, int>>> adj(nodes);  // (neighbor, j-index)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j)
        if (flow[i][j] > Scalar(0)) {
          adj[i].push_back({n + j, j});
          adj[n + j].push_back({i, j});
        }

    // DFS for any cycle
    std::vector<int> state(nodes, 0), parent(nodes, -1), parent_edge(nodes, -1);
    std::vector<int> cycle_nodes;
    for (int root = 0; root < nodes && cycle_nodes.empty(); ++root) {
      if (state[root]) continue;
      std::vector<int> stack = {root};
      parent[root] = -1;
      while (!stack.empty() && cycle_nodes.empty()) {
        int u = stack.back();
        if (state[u] == 0) state[u] = 1;
        bool advanced = false;
        for (auto [v, j] : adj[u]) {
          int edge_id = (u < n ? u : v) * m + j;
          if (edge_id == parent_edge[u]) continue;
          if (state[v] == 1) {
            // back edge: walk u .. v through parents
            cycle_nodes.push_back(v);
            for (int x = u; x != v; x = parent[x]) cycle_nodes.push_back(x);
            std::reverse(cycle_nodes.begin(), cycle_nodes.end());
            break;
          }
          if (state[v] == 0) {
            parent[v] = u;
            parent_edge[v] = edge_id;
            stack.push_back(v);
            advanced = true;
            break;
          }
        }
        if (!cycle_nodes.empty()) break;
        if (!advanced) {
          state[u] = 2;
          stack.pop_back();
        }
      }
    }
    if (cycle_nodes.empty()) return;

    const int len = static_cast<int>(cycle_nodes.size());
    // signs: traversing source->sink adds, sink->source subtracts
    std::vector<int> ii(len), jj(len), sign(len);
    Real cyc_cost = 0;
    for (int t = 0; t < len; ++t) {
      int u = cycle_nodes[t], v = cycle_nodes[(t + 1) % len];
      int i = u < n ? u : v;
      int j = (u < n ? v : u) - n;
      ii[t] = i;
      jj[t] = j;
      sign[t] = u < n ? +1 : -1;
      cyc_cost += sign[t] * cost(i, j);
    }
    if (cyc_cost > 0)
      for (int& s : sign) s = -s;

    Scalar delta = Scalar(0);
    bool first = true;
    for (int t = 0; t < len; ++t)
      if (sign[t] < 0 && (first || flow[ii[t]][jj[t]] < delta)) {
        delta = flow[ii[t]][jj[t]];
        first = false;
      }
    if (first || !(delta > Scalar(0))) return;  // no subtract arc; nothing to cancel
    for (int t = 0; t < len; ++t) flow[ii[t]][jj[t]] += sign[t] > 0 ? delta : -delta;
  }
}

}  // namespace

TransportPlan solve_exact_transport(const Vec& mu, const Vec& nu, const Mat& cost) {
  const int n = static_cast<int>(mu.size());
  const int m = static_cast<int>(nu.size());
  if (cost.rows() != n || cost.cols() != m) throw InputError("cost shape mismatch");
  for (Eigen::Index i = 0; i < mu.size(); ++i)
    if (!(mu[i] >= 0)) throw InputError("negative source mass");
  for (Eigen::Index j = 0; j < nu.size(); ++j)
    if (!(nu[j] >= 0)) throw InputError("negative sink mass");
  if (std::abs(mu.sum() - 1.0) > 1e-9 || std::abs(nu.sum() - 1.0) > 1e-9)
    throw InputError("transport inputs must be normalized");

  // Integer mode keeps supplies exact; float mode epsilon-pivots at 1e-12.
  std::optional<int64_t> denom = common_denominator(mu, nu);
  const bool integral = denom.has_value();
  const Real supply_eps = integral ? 0.0 : 1e-12;

  std::vector<Real> rem_supply(n), rem_demand(m);
  std::vector<int64_t> rem_supply_i(n, 0), rem_demand_i(m, 0);
  if (integral) {
    for (int i = 0; i < n; ++i)
      rem_supply_i[i] = static_cast<int64_t>(std::llround(mu[i] * static_cast<Real>(*denom)));
    for (int j = 0; j < m; ++j)
      rem_demand_i[j] = static_cast<int64_t>(std::llround(nu[j] * static_cast<Real>(*denom)));
  } else {
    for (int i = 0; i < n; ++i) rem_supply[i] = mu[i];
    for (int j = 0; j < m; ++j) rem_demand[j] = nu[j];
  }
  auto supply_left = [&](int i) -> Real {
    return integral ? static_cast<Real>(rem_supply_i[i]) : rem_supply[i];
  };
  auto demand_left = [&](int j) -> Real {
    return integral ? static_cast<Real>(rem_demand_i[j]) : rem_demand[j];
  };

  std::vector<std::vector<Real>> flow(n, std::vector<Real>(m, 0.0));
  std::vector<std::vector<int64_t>> flow_i(n, std::vector<int64_t>(m, 0));
  auto flow_at = [&](int i, int j) -> Real {
    return integral ? static_cast<Real>(flow_i[i][j]) : flow[i][j];
  };

  const int nodes = n + m;
  Vec phi = Vec::Zero(nodes);
  std::vector<Real> dist(nodes);
  std::vector<int> parent(nodes);
  std::vector<char> done(nodes);

  const int max_rounds = 4 * (n + 1) * (m + 1) + 64;
  int rounds = 0;
  while (true) {
    bool any_supply = false;
    for (int i = 0; i < n; ++i)
      if (supply_left(i) > supply_eps) {
        any_supply = true;
        break;
      }
    if (!any_supply) break;
    if (++rounds > max_rounds)
      throw std::runtime_error("transport solver exceeded augmentation budget");

    // Multi-source Dijkstra over the residual network with reduced costs.
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(parent.begin(), parent.end(), -1);
    std::fill(done.begin(), done.end(), 0);
    for (int i = 0; i < n; ++i)
      if (supply_left(i) > supply_eps) dist[i] = 0;

    for (int iter = 0; iter < nodes; ++iter) {
      int u = -1;
      Real best = kInf;
      for (int x = 0; x < nodes; ++x)
        if (!done[x] && dist[x] < best) {
          best = dist[x];
          u = x;
        }
      if (u < 0) break;
      done[u] = 1;
      if (u < n) {
        for (int j = 0; j < m; ++j) {
          Real c = cost(u, j);
          if (c == kInf) continue;
          Real r = std::max(Real(0), c + phi[u] - phi[n + j]);
          if (dist[u] + r < dist[n + j]) {
            dist[n + j] = dist[u] + r;
            parent[n + j] = u;
          }
        }
      } else {
        int j = u - n;
        for (int i = 0; i < n; ++i) {
          if (flow_at(i, j) <= 0) continue;
          Real r = std::max(Real(0), -cost(i, j) + phi[n + j] - phi[i]);
          if (dist[u] + r < dist[i]) {
            dist[i] = dist[u] + r;
            parent[i] = u;
          }
        }
      }
    }

    int t = -1;
    Real tbest = kInf;
    for (int j = 0; j < m; ++j)
      if (demand_left(j) > supply_eps && dist[n + j] < tbest) {
        tbest = dist[n + j];
        t = j;
      }
    if (t < 0) throw InfeasibleError("transport infeasible: remaining mass cannot be routed");

    // Full-distance potential update keeps every finite-cost arc's reduced
    // cost nonnegative, which is what makes the final duals globally valid.
    Real dmax = 0;
    for (int x = 0; x < nodes; ++x)
      if (dist[x] < kInf) dmax = std::max(dmax, dist[x]);
    for (int x = 0; x < nodes; ++x) phi[x] += (dist[x] < kInf) ? dist[x] : dmax;

    // Trace sink -> source, collect bottleneck.
    std::vector<int> chain;  // nodes from sink back to source
    int cur = n + t;
    chain.push_back(cur);
    while (parent[cur] >= 0) {
      cur = parent[cur];
      chain.push_back(cur);
    }
    int s = chain.back();

    Real delta = std::min(supply_left(s), demand_left(t));
    for (size_t idx = 0; idx + 1 < chain.size(); ++idx) {
      int to = chain[idx], from = chain[idx + 1];
      if (from >= n && to < n) delta = std::min(delta, flow_at(to, from - n));
    }

    if (integral) {
      int64_t d = static_cast<int64_t>(std::llround(delta));
      for (size_t idx = 0; idx + 1 < chain.size(); ++idx) {
        int to = chain[idx], from = chain[idx + 1];
        if (from < n)
          flow_i[from][to - n] += d;
        else
          flow_i[to][from - n] -= d;
      }
      rem_supply_i[s] -= d;
      rem_demand_i[t] -= d;
    } else {
      for (size_t idx = 0; idx + 1 < chain.size(); ++idx) {
        int to = chain[idx], from = chain[idx + 1];
        if (from < n)
          flow[from][to - n] += delta;
        else
          flow[to][from - n] -= delta;
      }
      rem_supply[s] -= delta;
      rem_demand[t] -= delta;
    }
  }

  if (integral)
    cancel_support_cycles<std::vector<std::vector<int64_t>>, int64_t>(flow_i, cost, n, m);
  else
    cancel_support_cycles<std::vector<std::vector<Real>>, Real>(flow, cost, n, m);

  TransportPlan plan;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) {
      Real mass = integral ? static_cast<Real>(flow_i[i][j]) / static_cast<Real>(*denom)
                           : flow[i][j];
      if (mass > kSupportEps) plan.entries.push_back({i, j, mass});
    }
  plan.value = 0;
  for (const auto& e : plan.entries) plan.value += e.mass * cost(e.src, e.dst);
  plan.u = -phi.head(n);
  plan.v = phi.tail(m);
  return plan;
}

EntropicResult solve_entropic(const Vec& mu, const Vec& nu, const Mat& cost, Real epsilon,
                              int max_iter, Real stop_tol) {
  if (epsilon <= 0) throw InputError("epsilon must be positive");
  const int n = static_cast<int>(mu.size());
  const int m = static_cast<int>(nu.size());
  if (cost.rows() != n || cost.cols() != m) throw InputError("cost shape mismatch");
  if (std::abs(mu.sum() - 1.0) > 1e-9 || std::abs(nu.sum() - 1.0) > 1e-9)
    throw InputError("transport inputs must be normalized");

  // log kernel; forbidden entries carry -inf and never receive mass.
  Mat logK(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) logK(i, j) = cost(i, j) == kInf ? -kInf : -cost(i, j) / epsilon;

  auto lse_row = [&](const Vec& g, int i) {
    Real mx = -kInf;
    for (int j = 0; j < m; ++j) mx = std::max(mx, logK(i, j) + g[j]);
    if (mx == -kInf) return -kInf;
    Real acc = 0;
    for (int j = 0; j < m; ++j) acc += std::exp(logK(i, j) + g[j] - mx);
    return mx + std::log(acc);
  };
  auto lse_col = [&](const Vec& f, int j) {
    Real mx = -kInf;
    for (int i = 0; i < n; ++i) mx = std::max(mx, logK(i, j) + f[i]);
    if (mx == -kInf) return -kInf;
    Real acc = 0;
    for (int i = 0; i < n; ++i) acc += std::exp(logK(i, j) + f[i] - mx);
    return mx + std::log(acc);
  };

  Vec logmu(n), lognu(m);
  for (int i = 0; i < n; ++i) logmu[i] = mu[i] > 0 ? std::log(mu[i]) : -kInf;
  for (int j = 0; j < m; ++j) lognu[j] = nu[j] > 0 ? std::log(nu[j]) : -kInf;

  Vec f = Vec::Zero(n), g = Vec::Zero(m);
  EntropicResult res;
  Mat P(n, m);
  auto materialize = [&]() {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) {
        Real l = logK(i, j) + f[i] + g[j];
        P(i, j) = l == -kInf ? 0.0 : std::exp(l);
      }
  };

  res.converged = false;
  int it = 0;
  for (; it < max_iter; ++it) {
    for (int i = 0; i < n; ++i) {
      if (logmu[i] == -kInf) {
        f[i] = -kInf;
        continue;
      }
      Real s = lse_row(g, i);  // = LSE_j(logK + g) without the f_i term
      if (s != -kInf) f[i] = logmu[i] - s;
    }
    for (int j = 0; j < m; ++j) {
      if (lognu[j] == -kInf) {
        g[j] = -kInf;
        continue;
      }
      Real s = lse_col(f, j);
      if (s != -kInf) g[j] = lognu[j] - s;
    }
    materialize();
    Real viol = 0;
    for (int i = 0; i < n; ++i) viol = std::max(viol, std::abs(P.row(i).sum() - mu[i]));
    for (int j = 0; j < m; ++j) viol = std::max(viol, std::abs(P.col(j).sum() - nu[j]));
    res.marginal_violation = viol;
    if (viol < stop_tol) {
      res.converged = true;
      ++it;
      break;
    }
  }
  res.iterations = it;

  // Marginal-correction rounding: scale rows then columns down to the
  // targets, then spread the residual.  With all-finite costs the residual
  // goes out as a rank-one correction; when forbidden pairs exist it is
  // routed by an exact transport restricted to the finite entries so the
  // rounded plan never touches them.
  materialize();
  for (int i = 0; i < n; ++i) {
    Real r = P.row(i).sum();
    if (r > mu[i] && r > 0) P.row(i) *= mu[i] / r;
  }
  for (int j = 0; j < m; ++j) {
    Real c = P.col(j).sum();
    if (c > nu[j] && c > 0) P.col(j) *= nu[j] / c;
  }
  Vec err_r(n), err_c(m);
  for (int i = 0; i < n; ++i) err_r[i] = std::max(Real(0), mu[i] - P.row(i).sum());
  for (int j = 0; j < m; ++j) err_c[j] = std::max(Real(0), nu[j] - P.col(j).sum());
  Real rsum = err_r.sum();
  const bool has_forbidden = !cost.allFinite();
  if (rsum > kSupportEps) {
    if (!has_forbidden) {
      P += (err_r * err_c.transpose()) / rsum;
    } else {
      Real csum = err_c.sum();
      TransportPlan residual =
          solve_exact_transport(err_r / rsum, err_c / csum, cost);
      for (const auto& e : residual.entries) P(e.src, e.dst) += rsum * e.mass;
    }
  }

  TransportPlan plan;
  plan.value = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      if (P(i, j) > kSupportEps) {
        plan.entries.push_back({i, j, P(i, j)});
        plan.value += P(i, j) * cost(i, j);
      }
  res.plan = std::move(plan);
  res.alpha = epsilon * f;
  res.beta = epsilon * g;
  return res;
}

}  // namespace hjmot
