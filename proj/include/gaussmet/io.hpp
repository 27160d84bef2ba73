#pragma once

#include "gaussmet/gaussian.hpp"
#include "gaussmet/generator.hpp"
#include "gaussmet/measurement.hpp"
#include "gaussmet/metrology.hpp"
#include "gaussmet/optimal.hpp"
#include "gaussmet/scenarios.hpp"

#include "json.hpp"

#include <string>

namespace gaussmet::io {

using nlohmann::json;

// Round to the given number of significant digits (for report output).
double round_sig(double x, int digits);

json complex_to_json(cplx z);
cplx complex_from_json(const json& j);
json vector_to_json(const ComplexVector& v);
ComplexVector vector_from_json(const json& j);
json matrix_to_json(const ComplexMatrix& A);
ComplexMatrix matrix_from_json(const json& j);

json state_to_json(const GaussianPureState& s);
GaussianPureState state_from_json(const json& j);

json generator_to_json(const Generator& g);
Generator generator_from_json(const json& j);

json grid_to_json(const DiscretizationGrid& g);
DiscretizationGrid grid_from_json(const json& j);

json resources_to_json(const ResourceTriple& r, int digits);
json report_to_json(const QfiReport& r, int digits);

ProbeSpec probe_spec_from_json(const json& j);
json probe_spec_to_json(const ProbeSpec& s);
json probe_result_to_json(const ProbeResult& r, int digits);

HomodyneSetup homodyne_setup_from_json(const json& j);
json homodyne_setup_to_json(const HomodyneSetup& s);
json homodyne_result_to_json(const HomodyneResult& r, int digits);

RegularizedModePair pair_from_json(const json& j);
json pair_to_json(const RegularizedModePair& p);
ScenarioConfig scenario_config_from_json(const json& j);

json read_json_file(const std::string& path);
// Writes through a temporary file and renames, so readers never see partial output.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace gaussmet::io
