#pragma once

// JSON and CSV serialization. Spaces carry their full distance table; cones
// additionally carry a construction block so large instances can be rebuilt
// without materializing n^2 distances. Object keys serialize sorted, so equal
// inputs produce byte-identical files.

#include <string>
#include <vector>

#include "json.hpp"
#include "riccilab/curvature.hpp"
#include "riccilab/functionals.hpp"
#include "riccilab/geometry.hpp"
#include "riccilab/heat.hpp"
#include "riccilab/mmspace.hpp"
#include "riccilab/transport.hpp"

namespace ricci {

using Json = nlohmann::json;

// { name, n, dist (row-major n^2), mass, labels?, coords?, meta:{generator, params} }
Json space_to_json(const FiniteMMSpace& space, const std::string& generator = "",
                   const Json& params = Json::object());
// Re-validates (strict) unless told otherwise.
FiniteMMSpace space_from_json(const Json& j, bool revalidate = true);
void save_space(const FiniteMMSpace& space, const std::string& path,
                const std::string& generator = "", const Json& params = Json::object());
FiniteMMSpace load_space(const std::string& path, bool revalidate = true);

// Space fields (dist only up to materialize_cap points) plus
// "cone": {K, N, grid, base} for exact reconstruction.
Json cone_to_json(const ConeSpace& cone, long long materialize_cap = 2000);
ConeSpace cone_from_json(const Json& j);
void save_cone(const ConeSpace& cone, const std::string& path, long long materialize_cap = 2000);
ConeSpace load_cone(const std::string& path);

Json measure_to_json(const ProbMeasure& mu);  // {"weights": [...]}
ProbMeasure measure_from_json(const Json& j);

Json radial_law_to_json(const RadialLaw& law);

Json rigidity_to_json(const RigidityReport& rep);
Json profile_to_json(const ComparisonProfile& prof);
Json theta_to_json(const ThetaEstimate& est);
Json theta_star_to_json(const ThetaStarEstimate& est);
Json contraction_to_json(const ContractionReport& rep);
Json variance_to_json(const VarianceBoundReport& rep);
Json dichotomy_to_json(const DichotomyReport& rep);
Json sandwich_to_json(const SandwichReport& rep);
Json ot_to_json(const OTResult& res, bool include_plan = false);
Json sinkhorn_to_json(const SinkhornResult& res);

const char* dichotomy_case_name(DichotomyCase c);
const char* theta_kind_name(ThetaEstimate::Kind k);

std::string read_text_file(const std::string& path);
// Write-then-rename so readers never observe a partial file.
void write_text_file_atomic(const std::string& path, const std::string& content);
void append_text_line(const std::string& path, const std::string& line);

// Plain CSV, 17 significant digits, comma separated, one header row.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);
// Data-only plotting: a gnuplot script that draws every column against the first.
std::string gnuplot_script(const std::string& csv_name, const std::vector<std::string>& header,
                           const std::string& title, bool log_x = true);

}  // namespace ricci
