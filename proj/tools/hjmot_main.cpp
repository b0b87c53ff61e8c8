#include "hjmot/diagnostics.hpp"
#include "hjmot/io.hpp"
#include "hjmot/lp_oracle.hpp"
#include "hjmot/monge.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace hjmot;

enum ExitCode { kOk = 0, kCheckFailed = 1, kInputError = 2, kInfeasible = 3 };

int log_level() {
  const char* env = std::getenv("HJMOT_LOG");
  if (!env) return 0;
  std::string v = env;
  if (v == "debug") return 2;
  if (v == "info") return 1;
  return 0;
}

void log_info(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "[info] " << msg << "\n";
}

std::vector<Real> parse_real_list(const std::string& csv) {
  std::vector<Real> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::strtod(tok.c_str(), nullptr));
  return out;
}

int cmd_generate(const std::string& spec_file, const std::string& out_file) {
  GeneratorSpec spec = read_generator_spec(spec_file);
  ProblemInstance inst = generate(spec);
  ValidationReport rep = validate(inst);
  if (!rep.ok()) throw InputError("generated instance failed validation: " + rep.violations.front().code);
  write_instance(out_file, inst);
  log_info("generated " + out_file);
  return kOk;
}

int cmd_solve(const std::string& inst_file, const std::string& out_file,
              const std::string& method, Real epsilon, int max_iter, Real stop_tol,
              const std::string& table_prefix, const std::string& monge_out) {
  ProblemInstance inst = read_instance(inst_file);
  ValidationReport rep = validate(inst);
  if (!rep.ok()) throw InputError("invalid instance: " + rep.violations.front().code);

  SolveOptions opts;
  if (method == "exact")
    opts.method = SolveOptions::Method::Exact;
  else if (method == "entropic")
    opts.method = SolveOptions::Method::Entropic;
  else
    throw InputError("unknown method: " + method);
  opts.epsilon = epsilon;
  opts.max_iter = max_iter;
  opts.stop_tol = stop_tol;

  HJMOTSolution sol = solve_hjmot(inst, opts);
  log_info("solved " + inst_file + " with " + std::to_string(sol.path_atoms.size()) + " atoms");
  if (!out_file.empty()) write_solution(out_file, inst, sol);

  if (!table_prefix.empty()) {
    ReducedCostTable table = reduced_cost_table(inst, opts.tie_tol);
    std::ofstream matrix(table_prefix + ".csv"), paths(table_prefix + "_paths.csv");
    if (!matrix || !paths) throw InputError("cannot write table export " + table_prefix);
    write_reduced_table_csv(matrix, paths, inst, table);
  }
  if (!monge_out.empty()) {
    MongeMap map;
    try {
      map = extract_monge_map(inst, sol);
    } catch (const MongePreconditionError& e) {
      std::cerr << "monge-precondition-failed: " << e.what() << "\n";
      return kCheckFailed;
    }
    std::ofstream out(monge_out);
    if (!out) throw InputError("cannot open " + monge_out + " for writing");
    out << monge_map_to_json(inst, map).dump(2) << "\n";
  }

  std::ostringstream skipped;
  skipped << "[";
  for (int k = 1; k <= inst.K - 1; ++k) {
    if (k > 1) skipped << ",";
    skipped << format_real(sol.skip_mass(k));
  }
  skipped << "]";
  std::cout << "M=" << format_real(sol.M) << " atoms=" << sol.path_atoms.size()
            << " skipped_mass=" << skipped.str() << "\n";
  return kOk;
}

int cmd_certify(const std::string& inst_file, const std::string& sol_file,
                const std::string& checks_csv, const std::string& out_file, Real tol,
                uint64_t seed) {
  ProblemInstance inst = read_instance(inst_file);
  HJMOTSolution sol = read_solution(sol_file, inst);

  std::vector<std::string> checks;
  {
    std::stringstream ss(checks_csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) checks.push_back(tok);
  }

  CertificateReport report;
  for (const std::string& name : checks) {
    if (name == "splitting") {
      CheckResult res;
      try {
        SplittingPotentials pot = splitting_potentials(inst, sol);
        res = check_splitting(inst, pot, sol, tol, seed);
      } catch (const InputError& e) {
        res.name = "splitting";
        res.pass = false;
        res.witness = std::string("splitting-precondition-failed: ") + e.what();
      }
      report.checks.push_back(std::move(res));
    } else if (name == "cyclical") {
      report.checks.push_back(check_cyclical_monotonicity(inst, sol, 3, 200, tol, seed));
    } else if (name == "glue") {
      CheckResult res;
      res.name = "glue";
      std::vector<Mat> plans;
      std::vector<Vec> margs;
      for (int k = 0; k <= inst.K; ++k) margs.push_back(stage_pushforward(sol.path_atoms, inst, k));
      for (int k = 0; k < inst.K; ++k) plans.push_back(pairwise_projection(inst, sol.path_atoms, k));
      PathMeasure glued = glue_pairwise(inst, plans, margs);
      res = check_glued_marginals(inst, glued, plans, margs, 1e-12);
      // The glued plan is feasible for the original problem, so its cost
      // can never undercut M.
      const CostFamily realized = realize_costs(inst);
      Real glued_value = 0;
      for (const auto& [p, mass] : glued) glued_value += mass * path_cost(p, inst, realized);
      if (glued_value < sol.M - slack_allowance(sol.M, tol)) {
        res.pass = false;
        res.witness = "glued value " + format_real(glued_value) + " undercuts M";
      }
      report.checks.push_back(std::move(res));
    } else if (name == "tilde-bound") {
      CheckResult res;
      res.name = "tilde-bound";
      std::vector<Vec> intermediates;
      for (int k = 1; k <= inst.K - 1; ++k)
        intermediates.push_back(stage_pushforward(sol.path_atoms, inst, k));
      TildeBound tb = upper_bound_via_tilde(inst, intermediates);
      res.pass = tb.holds;
      res.slack = tb.bound == kInf ? 0 : std::max(Real(0), tb.M - tb.bound);
      if (!res.pass) res.witness = "M " + format_real(tb.M) + " > bound " + format_real(tb.bound);
      report.checks.push_back(std::move(res));
    } else if (name == "decomposition") {
      CheckResult res;
      res.name = "decomposition";
      try {
        DecompositionResult dc = decomposition_check(inst, sol, tol);
        res.slack = dc.gap;
        res.pass = dc.gap <= slack_allowance(dc.M, tol);
        if (!res.pass)
          res.witness = "sum " + format_real(dc.sum) + " vs M " + format_real(dc.M);
      } catch (const MongePreconditionError& e) {
        res.pass = false;
        res.witness = std::string("monge-precondition-failed: ") + e.what();
      }
      report.checks.push_back(std::move(res));
    } else if (name == "twist") {
      CheckResult res;
      res.name = "twist";
      TwistReport tw = check_discrete_twist(inst, tol);
      res.pass = tw.pass;
      if (!tw.pass) {
        for (size_t i = 0; i < tw.sources.size(); ++i)
          if (tw.cardinality[i] != 1)
            res.witness += "source " + std::to_string(tw.sources[i]) + " has " +
                           std::to_string(tw.cardinality[i]) + " optimal continuations; ";
      }
      report.checks.push_back(std::move(res));
    } else {
      throw InputError("unknown check: " + name);
    }
  }

  if (!out_file.empty()) {
    std::ofstream out(out_file);
    if (!out) throw InputError("cannot open " + out_file + " for writing");
    out << report_to_json(report).dump(2) << "\n";
  }
  for (const CheckResult& c : report.checks)
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " slack=" << format_real(c.slack)
              << (c.witness.empty() ? "" : " " + c.witness) << "\n";
  return report.all_pass() ? kOk : kCheckFailed;
}

int cmd_probe(const std::string& inst_file, int source, const std::string& direction,
              const std::string& t_grid_csv, const std::string& out_file) {
  ProblemInstance inst = read_instance(inst_file);
  if (inst.costs.kind == CostKind::ExplicitMatrices)
    throw InputError("probe requires kernel costs");
  std::vector<Real> dir = parse_real_list(direction);
  Vec v(dir.size());
  for (size_t i = 0; i < dir.size(); ++i) v[static_cast<Eigen::Index>(i)] = dir[i];
  std::vector<Real> t_grid = t_grid_csv.empty() ? default_t_grid() : parse_real_list(t_grid_csv);

  LocalControlProbe probe = local_control_probe(inst, source, v, t_grid);
  std::vector<DerivativeEstimate> derivs;
  for (const Path& p : probe.continuations)
    derivs.push_back(directional_derivative(inst, p, v, t_grid));

  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!out_file.empty()) {
    file.open(out_file);
    if (!file) throw InputError("cannot open " + out_file + " for writing");
    os = &file;
  }
  *os << "t";
  for (size_t c = 0; c < probe.continuations.size(); ++c)
    *os << ",D" << c << ",r" << c << ",r" << c << "_over_t";
  *os << "\n";
  for (size_t ti = 0; ti < t_grid.size(); ++ti) {
    *os << format_real(t_grid[ti]);
    for (size_t c = 0; c < probe.continuations.size(); ++c)
      *os << "," << format_real(derivs[c].quotient[ti]) << ","
          << format_real(probe.r(static_cast<int>(ti), static_cast<int>(c))) << ","
          << format_real(probe.r_over_t(static_cast<int>(ti), static_cast<int>(c)));
    *os << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hjmot: solve and certify hierarchical jump multi-marginal transport"};
  app.require_subcommand(1);

  std::string spec_file, inst_file, sol_file, out_file, table_prefix, monge_out;
  std::string method = "exact";
  std::string checks = "splitting,cyclical,glue,tilde-bound,decomposition,twist";
  std::string direction = "1";
  std::string t_grid;
  Real epsilon = 1e-2, tol = 1e-9, stop_tol = 1e-9;
  int max_iter = 10000, source = 0;
  uint64_t seed = 20240901;

  CLI::App* gen = app.add_subcommand("generate", "generate an instance from a spec file");
  gen->add_option("spec", spec_file, "generator spec (JSON)")->required();
  gen->add_option("--out", out_file, "output instance file")->required();

  CLI::App* solve = app.add_subcommand("solve", "solve an instance");
  solve->add_option("instance", inst_file, "instance file (JSON)")->required();
  solve->add_option("--method", method, "exact|entropic");
  solve->add_option("--epsilon", epsilon, "entropic regularization strength");
  solve->add_option("--max-iter", max_iter, "entropic iteration cap");
  solve->add_option("--stop-tol", stop_tol, "entropic marginal stopping tolerance");
  solve->add_option("--out", out_file, "output solution file");
  solve->add_option("--table-out", table_prefix,
                    "write the reduced cost table to <prefix>.csv and <prefix>_paths.csv");
  solve->add_option("--monge-out", monge_out, "write the Monge map table (JSON)");

  CLI::App* certify = app.add_subcommand("certify", "check a solution against an instance");
  certify->add_option("instance", inst_file, "instance file (JSON)")->required();
  certify->add_option("solution", sol_file, "solution file (JSON)")->required();
  certify->add_option("--checks", checks, "comma list of checks to run");
  certify->add_option("--tol", tol, "check tolerance");
  certify->add_option("--seed", seed, "sampling seed");
  certify->add_option("--out", out_file, "report file (JSON)");

  CLI::App* probe = app.add_subcommand("probe", "finite-difference diagnostics at a source");
  probe->add_option("instance", inst_file, "instance file (JSON)")->required();
  probe->add_option("--source", source, "source point index");
  probe->add_option("--direction", direction, "direction vector, comma separated");
  probe->add_option("--t-grid", t_grid, "decreasing step grid, comma separated");
  probe->add_option("--out", out_file, "CSV output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kInputError;
  }

  try {
    if (gen->parsed()) return cmd_generate(spec_file, out_file);
    if (solve->parsed())
      return cmd_solve(inst_file, out_file, method, epsilon, max_iter, stop_tol, table_prefix,
                       monge_out);
    if (certify->parsed()) return cmd_certify(inst_file, sol_file, checks, out_file, tol, seed);
    if (probe->parsed()) return cmd_probe(inst_file, source, direction, t_grid, out_file);
  } catch (const hjmot::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const hjmot::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
