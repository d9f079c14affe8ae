#include "riccilab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace ricci {

namespace {

Json vec_json(const std::vector<double>& v) { return Json(v); }

std::vector<double> vec_from(const Json& j, const char* key) {
    return j.at(key).get<std::vector<double>>();
}

}  // namespace

Json space_to_json(const FiniteMMSpace& space, const std::string& generator, const Json& params) {
    Json j;
    j["name"] = space.name;
    j["n"] = space.n;
    j["dist"] = space.dist;
    j["mass"] = space.mass;
    if (!space.labels.empty()) j["labels"] = space.labels;
    if (!space.coords.empty()) {
        Json c = Json::array();
        for (const auto& p : space.coords) c.push_back({p[0], p[1], p[2]});
        j["coords"] = c;
    }
    j["meta"] = Json{{"generator", generator}, {"params", params}};
    return j;
}

FiniteMMSpace space_from_json(const Json& j, bool revalidate) {
    int n = j.at("n").get<int>();
    FiniteMMSpace space = make_space(n, vec_from(j, "dist"), vec_from(j, "mass"),
                                     j.value("name", std::string()));
    if (j.contains("labels")) space.labels = j.at("labels").get<std::vector<std::string>>();
    if (j.contains("coords")) {
        for (const auto& row : j.at("coords")) {
            require(row.size() == 3, "space_from_json: coords rows must have 3 entries");
            space.coords.push_back({row[0].get<double>(), row[1].get<double>(),
                                    row[2].get<double>()});
        }
        require(static_cast<int>(space.coords.size()) == n,
                "space_from_json: coords size mismatch");
    }
    if (revalidate) validate_space(space, true);
    return space;
}

void save_space(const FiniteMMSpace& space, const std::string& path, const std::string& generator,
                const Json& params) {
    write_text_file_atomic(path, space_to_json(space, generator, params).dump(2) + "\n");
}

FiniteMMSpace load_space(const std::string& path, bool revalidate) {
    return space_from_json(Json::parse(read_text_file(path)), revalidate);
}

Json cone_to_json(const ConeSpace& cone, long long materialize_cap) {
    Json j;
    const long long n = cone.n_points();
    j["name"] = "cone_over_" + cone.base.name;
    j["n"] = n;
    j["mass"] = cone.mass;
    if (n <= materialize_cap) {
        FiniteMMSpace full = cone.as_finite(materialize_cap);
        j["dist"] = full.dist;
        j["name"] = full.name;
    }
    j["meta"] = Json{{"generator", "cone"},
                     {"params", Json{{"K", cone.K}, {"N", cone.N}}}};
    j["cone"] = Json{{"K", cone.K},
                     {"N", cone.N},
                     {"grid", cone.grid.edges},
                     {"base", space_to_json(cone.base)}};
    return j;
}

ConeSpace cone_from_json(const Json& j) {
    require(j.contains("cone"), "cone_from_json: missing construction block");
    const Json& c = j.at("cone");
    FiniteMMSpace base = space_from_json(c.at("base"));
    return build_cone(base, c.at("K").get<double>(), c.at("N").get<double>(),
                      custom_grid(c.at("grid").get<std::vector<double>>()));
}

void save_cone(const ConeSpace& cone, const std::string& path, long long materialize_cap) {
    write_text_file_atomic(path, cone_to_json(cone, materialize_cap).dump(2) + "\n");
}

ConeSpace load_cone(const std::string& path) {
    return cone_from_json(Json::parse(read_text_file(path)));
}

Json measure_to_json(const ProbMeasure& mu) { return Json{{"weights", mu.w}}; }

ProbMeasure measure_from_json(const Json& j) { return make_measure(vec_from(j, "weights")); }

Json radial_law_to_json(const RadialLaw& law) {
    Json j;
    j["params"] = Json{{"N", law.N}, {"r0", law.r0}};
    j["grid"] = law.grid.edges;
    j["node_r"] = law.node_r;
    j["t"] = law.t;
    Json nu = Json::array();
    for (const auto& row : law.nu) nu.push_back(row);
    j["weights"] = nu;
    j["first_moment"] = law.first_moment;
    j["second_moment"] = law.second_moment;
    // both normalizations of the linear second-moment law, so a reader can
    // match either against the measured slope
    j["model_slope"] = 2.0 * (law.N + 1.0);
    j["model_slope_integer_dim"] = std::ceil(law.N);
    j["boundary_mass"] = law.boundary_mass;
    return j;
}

Json rigidity_to_json(const RigidityReport& rep) {
    return Json{{"m_value", rep.m_value}, {"m_star", rep.m_star},     {"gap", rep.gap},
                {"hist_l1", rep.hist_l1}, {"bins", rep.bins}};
}

Json profile_to_json(const ComparisonProfile& prof) {
    return Json{{"r", prof.r},
                {"volume", prof.v},
                {"model_volume", prof.model_volume},
                {"margin", prof.margin},
                {"shell", prof.shell},
                {"model_sphere", prof.model_sphere},
                {"R", prof.R},
                {"worst_margin", prof.worst_margin},
                {"max_abs_margin", prof.max_abs_margin},
                {"empty_balls", prof.empty_balls}};
}

const char* theta_kind_name(ThetaEstimate::Kind k) {
    switch (k) {
        case ThetaEstimate::Kind::finite: return "finite";
        case ThetaEstimate::Kind::divergent: return "divergent";
        default: return "inconclusive";
    }
}

const char* dichotomy_case_name(DichotomyCase c) {
    switch (c) {
        case DichotomyCase::distance_preserving: return "distance-preserving";
        case DichotomyCase::sqrt_defect: return "sqrt-defect";
        default: return "inconclusive";
    }
}

Json theta_to_json(const ThetaEstimate& est) {
    return Json{{"x", est.x},
                {"y", est.y},
                {"d", est.d},
                {"t", est.t},
                {"w2", est.w2},
                {"v", est.v},
                {"theta", est.theta},
                {"beta", est.beta},
                {"rms", est.rms},
                {"v_slope", est.v_slope},
                {"defect_exponent", est.defect_exponent},
                {"classification", theta_kind_name(est.kind)}};
}

Json theta_star_to_json(const ThetaStarEstimate& est) {
    Json details = Json::array();
    for (const auto& e : est.details) details.push_back(theta_to_json(e));
    return Json{{"value", est.value},
                {"divergent", est.divergent},
                {"finite_pairs", est.finite_pairs},
                {"divergent_pairs", est.divergent_pairs},
                {"inconclusive_pairs", est.inconclusive_pairs},
                {"details", details}};
}

Json contraction_to_json(const ContractionReport& rep) {
    Json pairs = Json::array();
    for (const auto& [x, y] : rep.pairs) pairs.push_back({x, y});
    Json ratio = Json::array();
    for (const auto& row : rep.ratio) ratio.push_back(row);
    return Json{{"K", rep.K},
                {"pairs", pairs},
                {"t", rep.t},
                {"ratio", ratio},
                {"worst_ratio", rep.worst_ratio}};
}

Json variance_to_json(const VarianceBoundReport& rep) {
    return Json{{"x", rep.x},           {"N", rep.N},
                {"t", rep.t},           {"spread_sq", rep.spread_sq},
                {"bound", rep.bound},   {"ratio", rep.ratio},
                {"worst_ratio", rep.worst_ratio}};
}

Json dichotomy_to_json(const DichotomyReport& rep) {
    Json j{{"classification", dichotomy_case_name(rep.outcome)},
           {"x0", rep.x0},
           {"d", rep.d},
           {"a", rep.a},
           {"a_tol", rep.a_tol},
           {"a_est", rep.a_est},
           {"exponent", rep.exponent},
           {"exponent_r2", rep.exponent_r2},
           {"t", rep.t},
           {"d_up", rep.d_up},
           {"g", rep.g},
           {"c_t", rep.c_t},
           {"ex_r2", rep.ex_r2},
           {"eo_s2", rep.eo_s2},
           {"g_slope", rep.g_slope},
           {"g_rms", rep.g_rms},
           {"g_max", rep.g_max},
           {"w2_certified", rep.w2_certified},
           {"w2_margin", rep.w2_margin},
           {"w2_method", rep.w2_method},
           {"eps", rep.eps},
           {"cone_points", rep.cone_points},
           {"flow_edge_mass", rep.flow_edge_mass},
           {"warnings", rep.warnings},
           {"half_resolution_ran", rep.half_resolution_ran},
           {"half_resolution_agrees", rep.half_resolution_agrees}};
    if (rep.half) j["half"] = dichotomy_to_json(*rep.half);
    return j;
}

Json sandwich_to_json(const SandwichReport& rep) {
    return Json{{"t", rep.t},
                {"lower_g", rep.lower_g},
                {"w2_exact", rep.w2_exact},
                {"upper_product", rep.upper_product},
                {"worst_violation", rep.worst_violation},
                {"lip_measured", rep.lip_measured},
                {"ok", rep.ok}};
}

Json ot_to_json(const OTResult& res, bool include_plan) {
    Json j{{"cost", res.cost},
           {"duality_gap", res.duality_gap},
           {"pivots", res.pivots},
           {"converged", res.converged}};
    if (include_plan) {
        Json plan = Json::array();
        for (const auto& e : res.plan.entries) plan.push_back({e.i, e.j, e.w});
        j["plan"] = plan;
    }
    return j;
}

Json sinkhorn_to_json(const SinkhornResult& res) {
    return Json{{"raw_cost", res.raw_cost},
                {"rounded_cost", res.rounded_cost},
                {"marginal_error", res.marginal_error},
                {"iterations", res.iterations},
                {"converged", res.converged}};
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw std::runtime_error("rename failed: " + path);
    }
}

void append_text_line(const std::string& path, const std::string& line) {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) throw std::runtime_error("cannot open for appending: " + path);
    out << line << "\n";
    if (!out) throw std::runtime_error("append failed: " + path);
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    require(!header.empty(), "write_csv: empty header");
    std::ostringstream ss;
    ss << std::setprecision(17);
    for (std::size_t c = 0; c < header.size(); ++c)
        ss << (c ? "," : "") << header[c];
    ss << "\n";
    for (const auto& row : rows) {
        require(row.size() == header.size(), "write_csv: row width mismatch");
        for (std::size_t c = 0; c < row.size(); ++c)
            ss << (c ? "," : "") << row[c];
        ss << "\n";
    }
    write_text_file_atomic(path, ss.str());
}

std::string gnuplot_script(const std::string& csv_name, const std::vector<std::string>& header,
                           const std::string& title, bool log_x) {
    require(header.size() >= 2, "gnuplot_script: need at least two columns");
    std::ostringstream ss;
    ss << "set datafile separator ','\n";
    ss << "set title '" << title << "'\n";
    ss << "set xlabel '" << header[0] << "'\n";
    if (log_x) ss << "set logscale x\n";
    ss << "set key outside\n";
    ss << "plot ";
    for (std::size_t c = 1; c < header.size(); ++c) {
        if (c > 1) ss << ", \\\n     ";
        ss << "'" << csv_name << "' using 1:" << (c + 1) << " with linespoints title '"
           << header[c] << "'";
    }
    ss << "\n";
    return ss.str();
}

}  // namespace ricci
