#pragma once

#include "hjmot/certify.hpp"
#include "hjmot/generate.hpp"
#include "hjmot/monge.hpp"
#include "hjmot/solver.hpp"

#include <json.hpp>

#include <iosfwd>

namespace hjmot {

using json = nlohmann::json;

// Shortest decimal representation that round-trips to the same double.
std::string format_real(Real x);

json instance_to_json(const ProblemInstance& inst);
ProblemInstance instance_from_json(const json& j);
void write_instance(const std::string& file, const ProblemInstance& inst);
ProblemInstance read_instance(const std::string& file);

// FNV-1a over the canonical (sorted-key) serialization; recorded in
// solution files so certificates cannot be applied to the wrong instance.
std::string instance_hash(const ProblemInstance& inst);

json path_to_json(const Path& p);
Path path_from_json(const json& j, const ProblemInstance& inst);

json solution_to_json(const ProblemInstance& inst, const HJMOTSolution& sol);
// Rebuilds a solution (including duals if present) and verifies the
// recorded instance hash; throws InputError on mismatch.
HJMOTSolution solution_from_json(const json& j, const ProblemInstance& inst);
void write_solution(const std::string& file, const ProblemInstance& inst,
                    const HJMOTSolution& sol);
HJMOTSolution read_solution(const std::string& file, const ProblemInstance& inst);

json report_to_json(const CertificateReport& report);

// Monge map table: source label -> path with "skip" literals.
json monge_map_to_json(const ProblemInstance& inst, const MongeMap& map);

GeneratorSpec generator_spec_from_json(const json& j);
GeneratorSpec read_generator_spec(const std::string& file);

// Reduced-cost export: CSV matrix (row = source, column = terminal) and a
// sidecar file listing one argmin path per entry.
void write_reduced_table_csv(std::ostream& matrix_out, std::ostream& paths_out,
                             const ProblemInstance& inst, const ReducedCostTable& table);

}  // namespace hjmot
