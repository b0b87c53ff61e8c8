#include "hjmot/lp_oracle.hpp"

namespace hjmot {

std::vector<Path> enumerate_path_space(const ProblemInstance& inst, Real limit) {
  // states per stage; the skip state exists only where the instance allows it
  std::vector<int> states(inst.K + 1);
  Real prod = 1;
  for (int k = 0; k <= inst.K; ++k) {
    states[k] = inst.stage_size(k) + (inst.stage_has_skip(k) ? 1 : 0);
    prod *= states[k];
  }
  if (prod > limit) throw InputError("instance too large for full path enumeration");

  std::vector<Path> paths;
  paths.reserve(static_cast<size_t>(prod));
  std::vector<int> odo(inst.K + 1, 0);
  while (true) {
    Path p;
    p.choices.resize(inst.K + 1);
    for (int k = 0; k <= inst.K; ++k) {
      // odometer value == stage point count encodes the skip state
      p.choices[k] = odo[k] == inst.stage_size(k) ? kSkip : odo[k];
    }
    paths.push_back(std::move(p));
    int k = inst.K;
    for (; k >= 0; --k) {
      if (++odo[k] < states[k]) break;
      odo[k] = 0;
    }
    if (k < 0) break;
  }
  return paths;
}

namespace {

// Two-phase dense simplex for min c.x s.t. Ax = b, x >= 0, with Bland's
// rule for anti-cycling.  Columns with +inf cost are excluded up front.
struct DenseSimplex {
  Mat A;     // rows x cols
  Vec b;     // rows, >= 0
  Vec c;     // cols
  int rows, cols;

  Vec solve(Real* out_value) {
    const Real eps = 1e-11;
    // tableau: [A | I_artificial | b], objective rows managed separately
    int total = cols + rows;
    Mat T(rows, total + 1);
    T.setZero();
    T.block(0, 0, rows, cols) = A;
    for (int r = 0; r < rows; ++r) {
      T(r, cols + r) = 1.0;
      T(r, total) = b[r];
    }
    std::vector<int> basis(rows);
    for (int r = 0; r < rows; ++r) basis[r] = cols + r;

    // Phase objective as a dense row over all columns.
    Vec obj = Vec::Zero(total);
    auto run = [&](bool phase_one) -> Real {
      Vec z = Vec::Zero(total + 1);
      // reduced costs: obj - obj_B * B^{-1} A, maintained by elimination
      // of basic columns from a working copy of the objective row.
      z.head(total) = obj;
      for (int r = 0; r < rows; ++r) {
        Real w = z[basis[r]];
        if (w != 0) z -= w * T.row(r).transpose();
      }
      const Real rc_eps = 1e-9;
      int guard = 0;
      const int max_pivots = 50000;
      while (true) {
        if (++guard > max_pivots) throw std::runtime_error("simplex pivot budget exceeded");
        // Bland: entering = lowest-index column with negative reduced cost.
        int enter = -1;
        int scan_limit = phase_one ? total : cols;
        for (int jcol = 0; jcol < scan_limit; ++jcol) {
          if (!phase_one && jcol >= cols) break;
          if (z[jcol] < -rc_eps) {
            enter = jcol;
            break;
          }
        }
        if (enter < 0) break;
        // Ratio test; Bland ties resolved by lowest basic variable index.
        int leave = -1;
        Real best_ratio = kInf;
        for (int r = 0; r < rows; ++r) {
          Real a = T(r, enter);
          if (a > eps) {
            Real ratio = T(r, total) / a;
            if (ratio < best_ratio - 1e-15 ||
                (std::abs(ratio - best_ratio) <= 1e-15 &&
                 (leave < 0 || basis[r] < basis[leave]))) {
              best_ratio = ratio;
              leave = r;
            }
          }
        }
        if (leave < 0) throw std::runtime_error("simplex objective unbounded");
        // pivot
        Real piv = T(leave, enter);
        T.row(leave) /= piv;
        for (int r = 0; r < rows; ++r) {
          if (r == leave) continue;
          Real f = T(r, enter);
          if (f != 0) T.row(r) -= f * T.row(leave);
        }
        Real fz = z[enter];
        if (fz != 0) z -= fz * T.row(leave).transpose();
        basis[leave] = enter;
      }
      Real val = 0;
      for (int r = 0; r < rows; ++r) val += obj[basis[r]] * T(r, total);
      return val;
    };

    // Phase 1: drive artificials to zero.
    for (int r = 0; r < rows; ++r) obj[cols + r] = 1.0;
    Real p1 = run(true);
    if (p1 > 1e-9) throw InfeasibleError("no feasible path measure");
    // Pivot out any zero-level artificial still in the basis.
    for (int r = 0; r < rows; ++r) {
      if (basis[r] < cols) continue;
      int enter = -1;
      for (int jcol = 0; jcol < cols; ++jcol)
        if (std::abs(T(r, jcol)) > 1e-9) {
          enter = jcol;
          break;
        }
      if (enter < 0) continue;  // redundant row; artificial stays basic at zero
      Real piv = T(r, enter);
      T.row(r) /= piv;
      for (int r2 = 0; r2 < rows; ++r2) {
        if (r2 == r) continue;
        Real f = T(r2, enter);
        if (f != 0) T.row(r2) -= f * T.row(r);
      }
      basis[r] = enter;
    }

    // Phase 2: original objective; artificial columns are barred by the
    // scan limit and any basic ones sit at level zero on redundant rows.
    obj.setZero();
    obj.head(cols) = c;
    Real value = run(false);

    Vec x = Vec::Zero(cols);
    for (int r = 0; r < rows; ++r)
      if (basis[r] < cols) x[basis[r]] = T(r, total);
    if (out_value) *out_value = value;
    return x;
  }
};

}  // namespace

LpOracleResult solve_full_lp_oracle(const ProblemInstance& inst) {
  const CostFamily realized = realize_costs(inst);
  LpOracleResult res;
  res.paths = enumerate_path_space(inst);
  const int nvar_all = static_cast<int>(res.paths.size());
  const int n0 = inst.stage_size(0);
  const int nK = inst.stage_size(inst.K);

  // Forbidden paths cannot carry mass in a finite optimum; exclude them.
  std::vector<int> keep;
  std::vector<Real> costs;
  keep.reserve(nvar_all);
  for (int idx = 0; idx < nvar_all; ++idx) {
    Real cv = path_cost(res.paths[idx], inst, realized);
    if (cv < kInf) {
      keep.push_back(idx);
      costs.push_back(cv);
    }
  }
  const int nvar = static_cast<int>(keep.size());
  if (nvar == 0) throw InfeasibleError("all paths forbidden");

  const int rows = n0 + nK + 1;
  DenseSimplex lp;
  lp.rows = rows;
  lp.cols = nvar;
  lp.A = Mat::Zero(rows, nvar);
  lp.b = Vec::Zero(rows);
  lp.c = Vec::Zero(nvar);
  for (int col = 0; col < nvar; ++col) {
    const Path& p = res.paths[keep[col]];
    lp.A(p.choices[0], col) = 1.0;
    lp.A(n0 + p.choices[inst.K], col) = 1.0;
    lp.A(rows - 1, col) = 1.0;
    lp.c[col] = costs[col];
  }
  for (int a = 0; a < n0; ++a) lp.b[a] = inst.mu0.weights[a];
  for (int bidx = 0; bidx < nK; ++bidx) lp.b[n0 + bidx] = inst.muK.weights[bidx];
  lp.b[rows - 1] = 1.0;

  Real value = 0;
  Vec x = lp.solve(&value);
  res.masses = Vec::Zero(nvar_all);
  for (int col = 0; col < nvar; ++col) res.masses[keep[col]] = x[col];
  res.value = value;
  return res;
}

}  // namespace hjmot
