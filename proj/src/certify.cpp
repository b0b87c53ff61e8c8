#include "hjmot/certify.hpp"

#include "hjmot/lp_oracle.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <sstream>

namespace hjmot {

namespace {

std::string path_to_string(const Path& p) {
  std::ostringstream os;
  os << "(";
  for (int k = 0; k < p.stages(); ++k) {
    if (k) os << ",";
    if (p.choices[k] == kSkip)
      os << "skip";
    else
      os << p.choices[k];
  }
  os << ")";
  return os.str();
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {  // inclusive bounds
  return lo + static_cast<int>(rng() % static_cast<uint64_t>(hi - lo + 1));
}

Real potential_sum(const ProblemInstance& inst, const SplittingPotentials& pot,
                   const Path& p) {
  Real s = 0;
  for (int k = 0; k <= inst.K; ++k) {
    int c = p.choices[k];
    s += pot.v[k][c == kSkip ? inst.skip_slot(k) : c];
  }
  return s;
}

}  // namespace

SplittingPotentials splitting_potentials(const ProblemInstance& inst,
                                         const HJMOTSolution& sol) {
  if (!sol.has_duals)
    throw InputError(
        "splitting potentials need transport duals; solve with the exact method");
  SplittingPotentials pot;
  pot.v.resize(inst.K + 1);
  for (int k = 0; k <= inst.K; ++k) pot.v[k] = Vec::Zero(inst.aug_size(k));
  pot.v[0].head(inst.stage_size(0)) = sol.plan.u;
  pot.v[inst.K].head(inst.stage_size(inst.K)) = sol.plan.v;
  // Gauge: potentials are defined up to opposite additive shifts; pin
  // v_K to zero on the first support terminal.
  if (!sol.plan.entries.empty()) {
    Real shift = pot.v[inst.K][sol.plan.entries.front().dst];
    pot.v[inst.K].array() -= shift;
    pot.v[0].array() += shift;
  }
  return pot;
}

CheckResult check_splitting(const ProblemInstance& inst, const SplittingPotentials& pot,
                            const HJMOTSolution& sol, Real tol, uint64_t seed) {
  const CostFamily realized = realize_costs(inst);
  CheckResult res;
  res.name = "splitting";
  Real worst = -kInf;  // worst violation of sum v_k <= c
  Path worst_path;

  Real omega_size = 1;
  for (int k = 0; k <= inst.K; ++k) omega_size *= inst.aug_size(k);

  auto consider = [&](const Path& p) {
    Real c = path_cost(p, inst, realized);
    if (c == kInf) return;
    Real viol = potential_sum(inst, pot, p) - c;
    if (viol > worst) {
      worst = viol;
      worst_path = p;
    }
  };

  if (omega_size <= 2e4) {
    for (const Path& p : enumerate_path_space(inst, 2e4 + 1)) consider(p);
  } else {
    std::mt19937_64 rng(seed);
    for (int s = 0; s < 100000; ++s) {
      Path p;
      p.choices.resize(inst.K + 1);
      for (int k = 0; k <= inst.K; ++k) {
        int states = inst.stage_has_skip(k) ? inst.stage_size(k) + 1 : inst.stage_size(k);
        int pick = uniform_int(rng, 0, states - 1);
        p.choices[k] = pick == inst.stage_size(k) ? kSkip : pick;
      }
      consider(p);
    }
    for (const auto& [p, mass] : sol.path_atoms) consider(p);
  }

  // Support equality: |sum v_k - c| on every atom.
  Real worst_eq = 0;
  Path worst_eq_path;
  for (const auto& [p, mass] : sol.path_atoms) {
    Real gap = std::abs(potential_sum(inst, pot, p) - path_cost(p, inst, realized));
    if (gap > worst_eq) {
      worst_eq = gap;
      worst_eq_path = p;
    }
  }

  Real slack_ineq = std::max(Real(0), worst);
  res.slack = std::max(slack_ineq, worst_eq);
  res.pass = slack_ineq <= slack_allowance(1.0, tol) && worst_eq <= slack_allowance(1.0, tol);
  if (!res.pass) {
    const Path& w = slack_ineq > worst_eq ? worst_path : worst_eq_path;
    res.witness = "path " + path_to_string(w);
    res.witness_paths.push_back(w);
  }
  return res;
}

CheckResult check_cyclical_monotonicity(const ProblemInstance& inst, const HJMOTSolution& sol,
                                        int m_max, int samples, Real tol, uint64_t seed) {
  const CostFamily realized = realize_costs(inst);
  CheckResult res;
  res.name = "cyclical";
  if (m_max > 4) throw InputError("m_max is capped at 4");
  const int natoms = static_cast<int>(sol.path_atoms.size());
  if (natoms == 0) {
    res.pass = true;
    return res;
  }

  std::mt19937_64 rng(seed);
  Real worst = -kInf;
  std::vector<Path> worst_tuple;

  // All permutations of {0..m-1} for each subset size used.
  auto perms_of = [](int m) {
    std::vector<std::vector<int>> perms;
    std::vector<int> p(m);
    for (int i = 0; i < m; ++i) p[i] = i;
    do {
      perms.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return perms;
  };

  for (int s = 0; s < samples; ++s) {
    int m = uniform_int(rng, 1, std::min(m_max, natoms));
    // sample m distinct atoms
    std::vector<int> idx;
    while (static_cast<int>(idx.size()) < m) {
      int cand = uniform_int(rng, 0, natoms - 1);
      if (std::find(idx.begin(), idx.end(), cand) == idx.end()) idx.push_back(cand);
    }
    std::vector<const Path*> atoms(m);
    for (int i = 0; i < m; ++i) atoms[i] = &sol.path_atoms[idx[i]].first;

    Real base = 0;
    for (int i = 0; i < m; ++i) base += path_cost(*atoms[i], inst, realized);

    auto perms = perms_of(m);
    const int np = static_cast<int>(perms.size());
    Real tuple_count = std::pow(static_cast<Real>(np), inst.K + 1);

    auto eval_tuple = [&](const std::vector<int>& sigma) {
      // sigma[k] selects the permutation applied at stage k
      Real total = 0;
      std::vector<Path> permuted(m);
      for (int i = 0; i < m; ++i) {
        Path q;
        q.choices.resize(inst.K + 1);
        for (int k = 0; k <= inst.K; ++k) q.choices[k] = atoms[perms[sigma[k]][i] ]->choices[k];
        total += path_cost(q, inst, realized);
        permuted[i] = std::move(q);
        if (total == kInf) break;
      }
      Real viol = base - total;
      if (viol > worst) {
        worst = viol;
        worst_tuple = permuted;
      }
    };

    if (tuple_count <= 1e6) {
      std::vector<int> sigma(inst.K + 1, 0);
      while (true) {
        eval_tuple(sigma);
        int k = inst.K;
        for (; k >= 0; --k) {
          if (++sigma[k] < np) break;
          sigma[k] = 0;
        }
        if (k < 0) break;
      }
    } else {
      for (int trial = 0; trial < 10000; ++trial) {
        std::vector<int> sigma(inst.K + 1);
        for (int k = 0; k <= inst.K; ++k) sigma[k] = uniform_int(rng, 0, np - 1);
        eval_tuple(sigma);
      }
    }
  }

  res.slack = std::max(Real(0), worst);
  res.pass = res.slack <= slack_allowance(1.0, tol);
  if (!res.pass) {
    std::ostringstream os;
    os << "rearranged tuple lowers cost by " << res.slack << ":";
    for (const Path& p : worst_tuple) os << " " << path_to_string(p);
    res.witness = os.str();
    res.witness_paths = worst_tuple;
  }
  return res;
}

PathMeasure glue_pairwise(const ProblemInstance& inst, const std::vector<Mat>& pairwise_plans,
                          const std::vector<Vec>& marginals) {
  const int K = inst.K;
  if (static_cast<int>(pairwise_plans.size()) != K || static_cast<int>(marginals.size()) != K + 1)
    throw InputError("expected K pairwise plans and K+1 marginals");
  for (int i = 0; i < K; ++i) {
    const Mat& P = pairwise_plans[i];
    if (P.rows() != inst.aug_size(i) || P.cols() != inst.aug_size(i + 1))
      throw InputError("plan " + std::to_string(i) + " has the wrong shape");
    for (Eigen::Index a = 0; a < P.rows(); ++a) {
      Real gap = std::abs(P.row(a).sum() - marginals[i][a]);
      if (gap > 1e-9)
        throw InputError("plan " + std::to_string(i) + " left marginal mismatch at stage " +
                         std::to_string(i) + " (off by " + std::to_string(gap) + ")");
    }
    for (Eigen::Index b = 0; b < P.cols(); ++b) {
      Real gap = std::abs(P.col(b).sum() - marginals[i + 1][b]);
      if (gap > 1e-9)
        throw InputError("plan " + std::to_string(i) + " right marginal mismatch at stage " +
                         std::to_string(i + 1) + " (off by " + std::to_string(gap) + ")");
    }
  }

  auto to_choice = [&](int k, int slot) { return slot == inst.skip_slot(k) && k >= 1 && k <= K - 1
                                                     ? kSkip
                                                     : slot; };

  // Seed with the atoms of the first plan, then extend by the conditional
  // kernels of each subsequent plan.
  PathMeasure atoms;
  for (Eigen::Index a = 0; a < pairwise_plans[0].rows(); ++a)
    for (Eigen::Index b = 0; b < pairwise_plans[0].cols(); ++b) {
      Real mass = pairwise_plans[0](a, b);
      if (mass < kSupportEps) continue;
      Path p;
      p.choices = {to_choice(0, static_cast<int>(a)), to_choice(1, static_cast<int>(b))};
      atoms.emplace_back(std::move(p), mass);
    }

  for (int i = 1; i < K; ++i) {
    const Mat& P = pairwise_plans[i];
    PathMeasure next;
    for (const auto& [prefix, mass] : atoms) {
      int last = prefix.choices.back();
      int slot = last == kSkip ? inst.skip_slot(i) : last;
      Real denom = marginals[i][slot];
      for (int b = 0; b < inst.aug_size(i + 1); ++b) {
        Real kappa;
        if (denom > 0) {
          kappa = P(slot, b) / denom;
        } else {
          kappa = (b == 0) ? 1.0 : 0.0;  // arbitrary-but-fixed kernel off-support
        }
        Real m2 = mass * kappa;
        if (m2 < kSupportEps) continue;
        Path p = prefix;
        p.choices.push_back(to_choice(i + 1, b));
        next.emplace_back(std::move(p), m2);
      }
    }
    atoms = std::move(next);
  }

  PathMeasure out;
  for (auto& [p, mass] : atoms)
    if (mass > kSupportEps) out.emplace_back(std::move(p), mass);
  std::sort(out.begin(), out.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  return out;
}

Mat pairwise_projection(const ProblemInstance& inst, const PathMeasure& atoms, int k) {
  Mat out = Mat::Zero(inst.aug_size(k), inst.aug_size(k + 1));
  for (const auto& [p, mass] : atoms) {
    int a = p.choices[k] == kSkip ? inst.skip_slot(k) : p.choices[k];
    int b = p.choices[k + 1] == kSkip ? inst.skip_slot(k + 1) : p.choices[k + 1];
    out(a, b) += mass;
  }
  return out;
}

CheckResult check_glued_marginals(const ProblemInstance& inst, const PathMeasure& glued,
                                  const std::vector<Mat>& plans,
                                  const std::vector<Vec>& marginals, Real tol) {
  CheckResult res;
  res.name = "glue";
  Real worst = 0;
  std::string where;
  for (int k = 0; k <= inst.K; ++k) {
    Vec push = stage_pushforward(glued, inst, k);
    for (int a = 0; a < inst.aug_size(k); ++a) {
      Real gap = std::abs(push[a] - marginals[k][a]);
      if (gap > worst) {
        worst = gap;
        where = "stage " + std::to_string(k) + " atom " + std::to_string(a);
      }
    }
  }
  for (int k = 0; k < inst.K; ++k) {
    Mat proj = pairwise_projection(inst, glued, k);
    for (int a = 0; a < proj.rows(); ++a)
      for (int b = 0; b < proj.cols(); ++b) {
        Real gap = std::abs(proj(a, b) - plans[k](a, b));
        if (gap > worst) {
          worst = gap;
          where = "pair (" + std::to_string(k) + "," + std::to_string(k + 1) + ") entry (" +
                  std::to_string(a) + "," + std::to_string(b) + ")";
        }
      }
  }
  res.slack = worst;
  res.pass = worst <= tol;
  if (!res.pass) res.witness = where;
  return res;
}

TildeBound upper_bound_via_tilde(const ProblemInstance& inst,
                                 const std::vector<Vec>& intermediate_measures) {
  if (static_cast<int>(intermediate_measures.size()) != std::max(0, inst.K - 1))
    throw InputError("expected K-1 intermediate measures");
  for (int k = 1; k <= inst.K - 1; ++k)
    if (intermediate_measures[k - 1].size() != inst.aug_size(k))
      throw InputError("intermediate measure " + std::to_string(k) +
                       " must cover the augmented state set (skip slot last)");
  const CostFamily realized = realize_costs(inst);

  TildeBound out;
  out.M = solve_hjmot(inst).M;

  auto measure_at = [&](int k) -> Vec {
    if (k == 0) return inst.mu0.weights;
    if (k == inst.K) return inst.muK.weights;
    return intermediate_measures[k - 1];
  };

  out.bound = 0;
  for (int i = 0; i < inst.K; ++i) {
    Mat tilde(inst.aug_size(i), inst.aug_size(i + 1));
    for (int a = 0; a < inst.aug_size(i); ++a)
      for (int b = 0; b < inst.aug_size(i + 1); ++b) {
        int ca = (i >= 1 && a == inst.skip_slot(i)) ? kSkip : a;
        int cb = (i + 1 <= inst.K - 1 && b == inst.skip_slot(i + 1)) ? kSkip : b;
        tilde(a, b) = max_adjacent_cost(i, ca, cb, inst, realized);
      }
    Real value;
    try {
      value = solve_exact_transport(measure_at(i), measure_at(i + 1), tilde).value;
    } catch (const InfeasibleError&) {
      value = kInf;
    }
    out.per_stage.push_back(value);
    out.bound += value;
  }
  out.holds = out.bound == kInf || out.M <= out.bound + slack_allowance(out.bound);
  return out;
}

DecompositionResult decomposition_check(const ProblemInstance& inst, const HJMOTSolution& sol,
                                        Real tol) {
  const CostFamily realized = realize_costs(inst);
  const int K = inst.K;

  // Monge preconditions: one support path per source, and an unambiguous
  // jump target for every point that starts a jump.
  std::map<int, const Path*> by_source;
  for (const auto& [p, mass] : sol.path_atoms) {
    auto [it, fresh] = by_source.emplace(p.choices[0], &p);
    if (!fresh)
      throw MongePreconditionError("source " + std::to_string(p.choices[0]) +
                                   " splits mass between " + path_to_string(*it->second) +
                                   " and " + path_to_string(p));
  }

  // next_active[i][x]: stage and point the support jumps to from (i, x)
  // when stage i+1 is skipped; conflicting jumps are refused.
  std::vector<std::map<int, std::pair<int, int>>> jump_target(K);
  for (const auto& [p, mass] : sol.path_atoms) {
    ActiveIndices act = active_indices(p, K);
    for (int l = 0; l + 1 < act.n; ++l) {
      int i = act.indices[l], j = act.indices[l + 1];
      if (j == i + 1) continue;
      auto [it, fresh] =
          jump_target[i].emplace(p.choices[i], std::make_pair(j, p.choices[j]));
      if (!fresh && it->second != std::make_pair(j, p.choices[j]))
        throw MongePreconditionError("point " + std::to_string(p.choices[i]) + " at stage " +
                                     std::to_string(i) + " jumps to two different targets");
    }
  }

  // Stagewise minimal-cost matrices over augmented states; transitions the
  // support never realizes stay +inf.
  std::vector<Mat> chat(K);
  for (int i = 0; i < K; ++i) chat[i] = Mat::Constant(inst.aug_size(i), inst.aug_size(i + 1), kInf);
  for (const auto& [p, mass] : sol.path_atoms) {
    for (int i = 0; i < K; ++i) {
      int a = p.choices[i], b = p.choices[i + 1];
      int sa = a == kSkip ? inst.skip_slot(i) : a;
      int sb = b == kSkip ? inst.skip_slot(i + 1) : b;
      Real val;
      if (a != kSkip && b != kSkip)
        val = realized.matrices[pair_index(i, i + 1, K)](a, b);
      else if (a != kSkip && b == kSkip) {
        auto [jstage, jpoint] = jump_target[i].at(a);
        val = realized.matrices[pair_index(i, jstage, K)](a, jpoint);
      } else
        val = 0;
      chat[i](sa, sb) = val;
    }
  }

  DecompositionResult out;
  out.M = sol.M;
  std::vector<Vec> marg(K + 1);
  for (int k = 0; k <= K; ++k) marg[k] = stage_pushforward(sol.path_atoms, inst, k);
  out.sum = 0;
  for (int i = 0; i < K; ++i) {
    Real value = solve_exact_transport(marg[i], marg[i + 1], chat[i]).value;
    out.per_stage.push_back(value);
    out.sum += value;
  }
  out.gap = std::abs(out.sum - out.M);
  (void)tol;
  return out;
}

}  // namespace hjmot
