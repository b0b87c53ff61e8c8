#include "hjmot/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <ostream>

namespace hjmot {

std::string format_real(Real x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

namespace {

Real weight_from_json(const json& j) {
  if (j.is_string()) return std::strtod(j.get<std::string>().c_str(), nullptr);
  if (j.is_number()) return j.get<Real>();
  throw InputError("weights must be numbers or decimal strings");
}

Vec weights_from_json(const json& j) {
  if (!j.is_array()) throw InputError("weight list expected");
  Vec w(j.size());
  for (size_t i = 0; i < j.size(); ++i) w[static_cast<Eigen::Index>(i)] = weight_from_json(j[i]);
  return w;
}

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed)
      if (key == a) known = true;
    if (!known) throw InputError("unknown key \"" + key + "\" in " + where);
  }
}

json real_to_json(Real x) {
  if (std::isinf(x)) return json(x > 0 ? "inf" : "-inf");
  return json(x);
}

Real real_from_json(const json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    return std::strtod(s.c_str(), nullptr);
  }
  return j.get<Real>();
}

}  // namespace

json instance_to_json(const ProblemInstance& inst) {
  json j;
  j["K"] = inst.K;
  j["allow_skips"] = inst.allow_skips;
  json spaces = json::array();
  for (const StageSpace& sp : inst.spaces) {
    json s;
    s["points"] = sp.points;
    if (sp.has_coords()) {
      json coords = json::array();
      for (const Vec& c : sp.coords) {
        json row = json::array();
        for (Eigen::Index d = 0; d < c.size(); ++d) row.push_back(c[d]);
        coords.push_back(std::move(row));
      }
      s["coords"] = std::move(coords);
    }
    if (sp.has_angles()) s["angles"] = sp.angles;
    spaces.push_back(std::move(s));
  }
  j["spaces"] = std::move(spaces);

  json cost;
  cost["kind"] = to_string(inst.costs.kind);
  if (inst.costs.kind == CostKind::ExplicitMatrices) {
    json mats;
    for (int i = 0; i < inst.K; ++i)
      for (int jj = i + 1; jj <= inst.K; ++jj) {
        const Mat& C = inst.costs.matrices[pair_index(i, jj, inst.K)];
        json rowmajor = json::array();
        for (Eigen::Index r = 0; r < C.rows(); ++r)
          for (Eigen::Index c = 0; c < C.cols(); ++c) rowmajor.push_back(real_to_json(C(r, c)));
        mats[std::to_string(i) + "," + std::to_string(jj)] = std::move(rowmajor);
      }
    cost["matrices"] = std::move(mats);
  }
  j["cost"] = std::move(cost);

  json mu0 = json::array();
  for (Eigen::Index i = 0; i < inst.mu0.weights.size(); ++i) mu0.push_back(inst.mu0.weights[i]);
  json muK = json::array();
  for (Eigen::Index i = 0; i < inst.muK.weights.size(); ++i) muK.push_back(inst.muK.weights[i]);
  j["mu0"] = std::move(mu0);
  j["muK"] = std::move(muK);
  return j;
}

ProblemInstance instance_from_json(const json& j) {
  reject_unknown_keys(j, {"K", "spaces", "cost", "mu0", "muK", "allow_skips"}, "instance");
  ProblemInstance inst;
  if (!j.contains("K") || !j.contains("spaces") || !j.contains("cost") || !j.contains("mu0") ||
      !j.contains("muK"))
    throw InputError("instance requires K, spaces, cost, mu0, muK");
  inst.K = j.at("K").get<int>();
  inst.allow_skips = j.value("allow_skips", true);

  for (const json& s : j.at("spaces")) {
    reject_unknown_keys(s, {"points", "coords", "angles"}, "space");
    StageSpace sp;
    sp.stage_index = static_cast<int>(inst.spaces.size());
    for (const json& p : s.at("points")) sp.points.push_back(p.get<std::string>());
    if (s.contains("coords")) {
      for (const json& row : s.at("coords")) {
        Vec c(row.size());
        for (size_t d = 0; d < row.size(); ++d) c[static_cast<Eigen::Index>(d)] = row[d].get<Real>();
        sp.coords.push_back(std::move(c));
      }
    }
    if (s.contains("angles"))
      for (const json& a : s.at("angles")) sp.angles.push_back(a.get<Real>());
    inst.spaces.push_back(std::move(sp));
  }

  const json& cost = j.at("cost");
  reject_unknown_keys(cost, {"kind", "matrices"}, "cost");
  inst.costs.kind = cost_kind_from_string(cost.at("kind").get<std::string>());
  if (inst.costs.kind == CostKind::ExplicitMatrices) {
    if (!cost.contains("matrices")) throw InputError("ExplicitMatrices requires matrices");
    inst.costs.matrices.resize(pair_count(inst.K));
    for (int i = 0; i < inst.K; ++i)
      for (int jj = i + 1; jj <= inst.K; ++jj) {
        std::string key = std::to_string(i) + "," + std::to_string(jj);
        if (!cost.at("matrices").contains(key))
          throw InputError("missing cost matrix for pair " + key);
        const json& rowmajor = cost.at("matrices").at(key);
        int rows = inst.spaces[i].size(), cols = inst.spaces[jj].size();
        if (static_cast<int>(rowmajor.size()) != rows * cols)
          throw InputError("cost matrix " + key + " has the wrong size");
        Mat C(rows, cols);
        for (int r = 0; r < rows; ++r)
          for (int c = 0; c < cols; ++c) C(r, c) = real_from_json(rowmajor[r * cols + c]);
        inst.costs.matrices[pair_index(i, jj, inst.K)] = std::move(C);
      }
  }

  inst.mu0.stage_index = 0;
  inst.mu0.weights = weights_from_json(j.at("mu0"));
  inst.muK.stage_index = inst.K;
  inst.muK.weights = weights_from_json(j.at("muK"));
  return inst;
}

void write_instance(const std::string& file, const ProblemInstance& inst) {
  std::ofstream out(file);
  if (!out) throw InputError("cannot open " + file + " for writing");
  out << instance_to_json(inst).dump(2) << "\n";
}

ProblemInstance read_instance(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw InputError("cannot open " + file);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError(std::string("parse error: ") + e.what());
  }
  return instance_from_json(j);
}

std::string instance_hash(const ProblemInstance& inst) {
  const std::string payload = instance_to_json(inst).dump();
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : payload) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json path_to_json(const Path& p) {
  json arr = json::array();
  for (int c : p.choices) {
    if (c == kSkip)
      arr.push_back("skip");
    else
      arr.push_back(c);
  }
  return arr;
}

Path path_from_json(const json& j, const ProblemInstance& inst) {
  if (!j.is_array() || static_cast<int>(j.size()) != inst.K + 1)
    throw InputError("path must list one state per stage");
  Path p;
  for (const json& c : j) {
    if (c.is_string()) {
      if (c.get<std::string>() != "skip") throw InputError("bad path entry");
      p.choices.push_back(kSkip);
    } else {
      p.choices.push_back(c.get<int>());
    }
  }
  return p;
}

json solution_to_json(const ProblemInstance& inst, const HJMOTSolution& sol) {
  json j;
  j["M"] = sol.M;
  j["instance_hash"] = instance_hash(inst);
  j["method"] = sol.exact ? "exact" : "entropic";
  json atoms = json::array();
  for (const auto& [p, mass] : sol.path_atoms) {
    json a;
    a["path"] = path_to_json(p);
    a["mass"] = mass;
    atoms.push_back(std::move(a));
  }
  j["atoms"] = std::move(atoms);
  json margs = json::array();
  for (const DiscreteMeasure& mu : sol.intermediate_marginals) {
    json m;
    m["stage"] = mu.stage_index;
    json w = json::array();
    for (Eigen::Index i = 0; i + 1 < mu.weights.size(); ++i) w.push_back(mu.weights[i]);
    m["weights"] = std::move(w);
    m["skip_mass"] = mu.weights[mu.weights.size() - 1];
    margs.push_back(std::move(m));
  }
  j["marginals"] = std::move(margs);
  if (sol.has_duals) {
    json du = json::array(), dv = json::array();
    for (Eigen::Index i = 0; i < sol.plan.u.size(); ++i) du.push_back(sol.plan.u[i]);
    for (Eigen::Index i = 0; i < sol.plan.v.size(); ++i) dv.push_back(sol.plan.v[i]);
    j["duals"] = {{"u", std::move(du)}, {"v", std::move(dv)}};
    json plan = json::array();
    for (const auto& e : sol.plan.entries)
      plan.push_back({{"src", e.src}, {"dst", e.dst}, {"mass", e.mass}});
    j["plan"] = std::move(plan);
  }
  return j;
}

HJMOTSolution solution_from_json(const json& j, const ProblemInstance& inst) {
  reject_unknown_keys(
      j, {"M", "instance_hash", "method", "atoms", "marginals", "duals", "plan"}, "solution");
  if (j.at("instance_hash").get<std::string>() != instance_hash(inst))
    throw InputError("solution was produced for a different instance (hash mismatch)");
  HJMOTSolution sol;
  sol.M = j.at("M").get<Real>();
  sol.exact = j.value("method", "exact") == std::string("exact");
  for (const json& a : j.at("atoms"))
    sol.path_atoms.emplace_back(path_from_json(a.at("path"), inst), a.at("mass").get<Real>());
  for (const json& m : j.at("marginals")) {
    DiscreteMeasure mu;
    mu.stage_index = m.at("stage").get<int>();
    Vec w = weights_from_json(m.at("weights"));
    mu.weights = Vec(w.size() + 1);
    mu.weights.head(w.size()) = w;
    mu.weights[w.size()] = m.at("skip_mass").get<Real>();
    sol.intermediate_marginals.push_back(std::move(mu));
  }
  if (j.contains("duals")) {
    sol.has_duals = true;
    sol.plan.u = weights_from_json(j.at("duals").at("u"));
    sol.plan.v = weights_from_json(j.at("duals").at("v"));
    if (j.contains("plan"))
      for (const json& e : j.at("plan"))
        sol.plan.entries.push_back(
            {e.at("src").get<int>(), e.at("dst").get<int>(), e.at("mass").get<Real>()});
    sol.plan.value = sol.M;
  }
  return sol;
}

void write_solution(const std::string& file, const ProblemInstance& inst,
                    const HJMOTSolution& sol) {
  std::ofstream out(file);
  if (!out) throw InputError("cannot open " + file + " for writing");
  out << solution_to_json(inst, sol).dump(2) << "\n";
}

HJMOTSolution read_solution(const std::string& file, const ProblemInstance& inst) {
  std::ifstream in(file);
  if (!in) throw InputError("cannot open " + file);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError(std::string("parse error: ") + e.what());
  }
  return solution_from_json(j, inst);
}

json report_to_json(const CertificateReport& report) {
  json arr = json::array();
  for (const CheckResult& c : report.checks) {
    json e;
    e["name"] = c.name;
    e["pass"] = c.pass;
    e["slack"] = c.slack;
    if (!c.witness.empty()) e["witness"] = c.witness;
    arr.push_back(std::move(e));
  }
  json j;
  j["checks"] = std::move(arr);
  j["all_pass"] = report.all_pass();
  return j;
}

json monge_map_to_json(const ProblemInstance& inst, const MongeMap& map) {
  json j = json::object();
  for (size_t i = 0; i < map.sources.size(); ++i)
    j[inst.spaces[0].points[map.sources[i]]] = path_to_json(map.paths[i]);
  return j;
}

GeneratorSpec generator_spec_from_json(const json& j) {
  reject_unknown_keys(
      j, {"family", "K", "sizes", "seed", "cost_scale", "dimension", "allow_skips"}, "spec");
  GeneratorSpec spec;
  spec.family = generator_family_from_string(j.at("family").get<std::string>());
  spec.K = j.at("K").get<int>();
  for (const json& s : j.at("sizes")) spec.sizes.push_back(s.get<int>());
  spec.seed = j.contains("seed") ? j.at("seed").get<uint64_t>() : 0;
  spec.cost_scale = j.value("cost_scale", 1.0);
  spec.dimension = j.value("dimension", 1);
  spec.allow_skips = j.value("allow_skips", true);
  return spec;
}

GeneratorSpec read_generator_spec(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw InputError("cannot open " + file);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError(std::string("parse error: ") + e.what());
  }
  return generator_spec_from_json(j);
}

void write_reduced_table_csv(std::ostream& matrix_out, std::ostream& paths_out,
                             const ProblemInstance&, const ReducedCostTable& table) {
  for (Eigen::Index a = 0; a < table.values.rows(); ++a) {
    for (Eigen::Index b = 0; b < table.values.cols(); ++b) {
      if (b) matrix_out << ",";
      matrix_out << format_real(table.values(a, b));
    }
    matrix_out << "\n";
  }
  paths_out << "source,terminal,value,ties,path\n";
  for (Eigen::Index a = 0; a < table.values.rows(); ++a)
    for (Eigen::Index b = 0; b < table.values.cols(); ++b) {
      paths_out << a << "," << b << "," << format_real(table.values(a, b)) << ","
                << table.ties(a, b) << ",";
      if (table.values(a, b) < kInf) {
        const Path& p = table.argmin_paths[a][b];
        for (int k = 0; k < p.stages(); ++k) {
          if (k) paths_out << " ";
          if (p.choices[k] == kSkip)
            paths_out << "skip";
          else
            paths_out << p.choices[k];
        }
      }
      paths_out << "\n";
    }
}

}  // namespace hjmot
