#include "riccilab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>
#include <stdexcept>

#include "riccilab/common.hpp"

namespace ricci {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s, const std::string& who) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument(who + ": cannot parse '" + s + "' as a number");
    }
    require(used == s.size(), who + ": trailing characters in '" + s + "'");
    return v;
}

int parse_int(const std::string& s, const std::string& who) {
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(s, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument(who + ": cannot parse '" + s + "' as an integer");
    }
    require(used == s.size(), who + ": trailing characters in '" + s + "'");
    return v;
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

const std::vector<std::string>& known_kinds() {
    static const std::vector<std::string> kinds = {
        "mf", "bg", "heat", "theta", "dichotomy", "suspension-invariance",
        "almost-rigidity-sweep"};
    return kinds;
}

void add_assertion(RunManifest& man, AssertionResult a) {
    for (const auto& ex : man.assertions)
        require(ex.name != a.name, "duplicate assertion name: " + a.name);
    man.assertions.push_back(std::move(a));
}

AssertionResult check_range(const std::string& name, double measured, double lo, double hi,
                            std::string detail = "") {
    AssertionResult a;
    a.name = name;
    a.measured = measured;
    a.lo = lo;
    a.hi = hi;
    a.pass = std::isfinite(measured) && measured >= lo && measured <= hi;
    a.detail = std::move(detail);
    return a;
}

AssertionResult check_flag(const std::string& name, bool pass, std::string detail = "") {
    AssertionResult a;
    a.name = name;
    a.measured = pass ? 1.0 : 0.0;
    a.lo = 1.0;
    a.hi = 1.0;
    a.pass = pass;
    a.detail = std::move(detail);
    return a;
}

// Expected pair-distance mass of the N-model inside [lo, hi] (clipped to [0, pi]).
double model_bin_mass(double N, double lo, double hi) {
    lo = std::max(0.0, lo);
    hi = std::min(kPi, hi);
    if (hi <= lo) return 0.0;
    const auto sinpow = [N](double r) { return std::pow(std::sin(r), N - 1.0); };
    const double total = integrate(sinpow, 0.0, kPi, 1e-10).value;
    const double part = integrate(sinpow, lo, hi, 1e-10).value;
    return part / total;
}

struct CurveSink {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::string title;
    bool log_x = true;
};

// Distance-law bins scale with the sample so binning noise stays below the
// mismatch tolerances (the law has ~n distinct values, each bin needs many).
int adaptive_bins(int n) { return std::clamp(n / 16, 8, 64); }

void run_mf(const ExperimentConfig& config, const Tolerances& tol, RunManifest& man,
            Json& report, CurveSink& curves) {
    FiniteMMSpace space = make_space_from_spec(config.space);
    if (config.perturb_eta > 0.0)
        space = perturb_metric(space, config.perturb_eta, config.seed);
    const KernelFunction f = kernel_from_name(config.f);
    const RigidityReport rr = rigidity_report(space, f, config.N, adaptive_bins(space.n));
    report["space"] = Json{{"name", space.name}, {"n", space.n}};
    report["rigidity"] = rigidity_to_json(rr);
    add_assertion(man, check_range("mf-sharp-inequality", rr.gap, -tol.mf_gap,
                                   std::numeric_limits<double>::infinity(),
                                   "gap = M*_{f,N} - M_f"));
    if (config.expect_equality)
        add_assertion(man, check_range("mf-model-equality", rr.gap, -tol.mf_gap, tol.mf_gap));

    curves.header = {"bin_center", "pair_mass", "model_mass"};
    curves.title = "pair-distance law vs model, " + space.name;
    curves.log_x = false;
    const DistanceHistogram h = distance_histogram(space, rr.bins, 0.0, kPi);
    for (std::size_t b = 0; b < h.masses.size(); ++b) {
        const double lo = h.edges[b], hi = h.edges[b + 1];
        curves.rows.push_back(
            {0.5 * (lo + hi), h.masses[b], model_bin_mass(config.N, lo, hi)});
    }
}

void run_bg(const ExperimentConfig& config, const Tolerances& tol, RunManifest& man,
            Json& report, CurveSink& curves) {
    const FiniteMMSpace space = make_space_from_spec(config.space);
    const ComparisonProfile prof =
        bishop_gromov_check(space, config.x0, config.K, config.N, config.r_grid);
    report["space"] = Json{{"name", space.name}, {"n", space.n}};
    report["profile"] = profile_to_json(prof);
    add_assertion(man, check_range("bg-lower-margin", prof.worst_margin, -tol.bg_margin,
                                   std::numeric_limits<double>::infinity(),
                                   "min over radii of ratio(r) - model ratio"));
    if (config.expect_equality)
        add_assertion(man,
                      check_range("bg-near-equality", prof.max_abs_margin, 0.0, tol.bg_margin));

    curves.header = {"r", "volume", "model_volume", "margin"};
    curves.title = "volume growth vs model, " + space.name;
    curves.log_x = false;
    for (std::size_t i = 0; i < prof.r.size(); ++i)
        curves.rows.push_back({prof.r[i], prof.v[i], prof.model_volume[i], prof.margin[i]});
}

void run_heat(const ExperimentConfig& config, const Tolerances& tol, RunManifest& man,
              Json& report, CurveSink& curves) {
    const FiniteMMSpace space = make_space_from_spec(config.space);
    GraphGeneratorOptions gopt;
    gopt.eps = config.eps;
    const HeatModel model = build_generator_graph(space, gopt);
    const MetricView view = view_of(space);
    const auto flows = heat_measure(model, dirac(space.n, config.x0), config.t_grid);

    report["space"] = Json{{"name", space.name}, {"n", space.n}};
    report["eps"] = model.eps;
    Json measures = Json::array();
    double worst_mass_err = 0.0;
    double worst_ratio = 0.0;
    curves.header = {"t", "spread_sq", "bound_2Nt", "mass_error"};
    curves.title = "delta-start spread, " + space.name;
    for (std::size_t k = 0; k < config.t_grid.size(); ++k) {
        const double t = config.t_grid[k];
        double total = 0.0, spread = 0.0;
        for (int i = 0; i < space.n; ++i) {
            total += flows[k].w[i];
            const double d = view.dist(i, config.x0);
            spread += flows[k].w[i] * d * d;
        }
        const double bound = 2.0 * config.N * t;
        worst_mass_err = std::max(worst_mass_err, std::abs(total - 1.0));
        worst_ratio = std::max(worst_ratio, spread / bound);
        curves.rows.push_back({t, spread, bound, total - 1.0});
        measures.push_back(measure_to_json(flows[k]));
    }
    report["measures"] = measures;
    add_assertion(man, check_range("heat-mass-conservation", worst_mass_err, 0.0, 1e-9));
    add_assertion(man, check_range("heat-dimension-bound", worst_ratio, 0.0,
                                   1.0 + tol.variance, "spread^2 / (2 N t)"));
}

void run_theta(const ExperimentConfig& config, const Tolerances&, RunManifest& man,
               Json& report, CurveSink& curves) {
    const FiniteMMSpace space = make_space_from_spec(config.space);
    GraphGeneratorOptions gopt;
    gopt.eps = config.eps;
    const HeatModel model = build_generator_graph(space, gopt);
    const MetricView view = view_of(space);
    const ThetaEstimate est =
        theta_plus_estimate(model, view, config.x, config.y, config.t_grid);
    report["space"] = Json{{"name", space.name}, {"n", space.n}};
    report["theta"] = theta_to_json(est);
    add_assertion(man, check_flag("theta-classified", est.kind != ThetaEstimate::Kind::inconclusive,
                                  theta_kind_name(est.kind)));

    curves.header = {"t", "w2", "v"};
    curves.title = "transport rate v(t), pair (" + std::to_string(config.x) + "," +
                   std::to_string(config.y) + ")";
    for (std::size_t k = 0; k < est.t.size(); ++k)
        curves.rows.push_back({est.t[k], est.w2[k], est.v[k]});
}

void run_dichotomy(const ExperimentConfig& config, const Tolerances&, RunManifest& man,
                   Json& report, CurveSink& curves) {
    DichotomyOptions dopt;
    dopt.eps = config.eps;
    const ConeSpace cone = [&]() -> ConeSpace {
        if (!config.cone_file.empty()) return load_cone(config.cone_file);
        const FiniteMMSpace base = make_space_from_spec(config.space);
        return build_cone(base, config.K, config.N,
                          dichotomy_grid(base, config.N, config.r0, config.t_grid, dopt));
    }();
    const DichotomyReport rep = cone_dichotomy(cone, config.x0, config.r0, config.t_grid, dopt);
    report["dichotomy"] = dichotomy_to_json(rep);
    add_assertion(man, check_flag("dichotomy-classified",
                                  rep.outcome != DichotomyCase::inconclusive,
                                  dichotomy_case_name(rep.outcome)));
    add_assertion(man, check_flag("dichotomy-w2-certified", rep.w2_certified, rep.w2_method));
    if (config.rho > 0.0) {
        const double closed = std::sin(kPi * config.rho) / (kPi * config.rho);
        add_assertion(man, check_range("dichotomy-a-closed-form", rep.a, closed - 2e-3,
                                       closed + 2e-3, "sin(pi rho)/(pi rho)"));
    }

    curves.header = {"t", "d_up", "g", "c_t", "ex_r2", "eo_s2"};
    curves.title = "cone dichotomy diagnostics, x0=" + std::to_string(config.x0);
    for (std::size_t k = 0; k < rep.t.size(); ++k)
        curves.rows.push_back(
            {rep.t[k], rep.d_up[k], rep.g[k], rep.c_t[k], rep.ex_r2[k], rep.eo_s2[k]});
}

void run_suspension(const ExperimentConfig& config, const Tolerances& tol, RunManifest& man,
                    Json& report, CurveSink& curves) {
    const FiniteMMSpace space = make_space_from_spec(config.space);
    const int cells = config.grid_cells > 0 ? config.grid_cells : 96;
    const ConeSpace susp = suspension(space, config.N, linear_grid(cells, kPi));
    const KernelFunction f = KernelFunction::cosine();
    const double m_base = m_f(space, f);
    const double m_susp = m_f(susp, f);
    const double diff = std::abs(m_susp - m_base);
    report["space"] = Json{{"name", space.name}, {"n", space.n}};
    report["m_cos_base"] = m_base;
    report["m_cos_suspension"] = m_susp;
    report["suspension_points"] = susp.n_points();
    add_assertion(man, check_range("suspension-invariance", diff, 0.0, tol.suspension,
                                   "|M_cos(susp X) - M_cos(X)|"));
    curves.header = {"m_cos_base", "m_cos_suspension", "abs_diff"};
    curves.title = "suspension invariance, " + space.name;
    curves.log_x = false;
    curves.rows.push_back({m_base, m_susp, diff});
}

void run_rigidity_sweep(const ExperimentConfig& config, const Tolerances& tol, RunManifest& man,
                        Json& report, CurveSink& curves) {
    const FiniteMMSpace base = make_space_from_spec(config.space);
    const KernelFunction f = kernel_from_name(config.f);
    std::vector<double> gaps, l1s;
    Json table = Json::array();
    for (std::size_t i = 0; i < config.etas.size(); ++i) {
        const double eta = config.etas[i];
        const FiniteMMSpace s =
            eta > 0.0 ? perturb_metric(base, eta, mix_seed(config.seed, i)) : base;
        const RigidityReport rr = rigidity_report(s, f, config.N, adaptive_bins(s.n));
        gaps.push_back(std::abs(rr.gap));
        l1s.push_back(rr.hist_l1);
        table.push_back(Json{{"eta", eta}, {"gap", rr.gap}, {"hist_l1", rr.hist_l1}});
        curves.rows.push_back({eta, std::abs(rr.gap), rr.hist_l1});
    }
    report["space"] = Json{{"name", base.name}, {"n", base.n}};
    report["table"] = table;
    curves.header = {"eta", "abs_gap", "hist_l1"};
    curves.title = "almost-rigidity sweep, " + base.name;
    curves.log_x = false;

    add_assertion(man, check_range("sweep-rank-corr-gap", spearman(config.etas, gaps),
                                   tol.rank_corr, 1.0, "|gap| co-moves with perturbation"));
    add_assertion(man, check_range("sweep-rank-corr-hist", spearman(config.etas, l1s),
                                   tol.rank_corr, 1.0,
                                   "distance-law mismatch co-moves with perturbation"));
    if (config.etas.front() == 0.0) {
        add_assertion(man, check_range("sweep-unperturbed-gap", gaps.front(), 0.0, tol.mf_gap));
        add_assertion(man,
                      check_range("sweep-unperturbed-hist", l1s.front(), 0.0, tol.hist_l1));
    }
}

void write_outputs(const ExperimentConfig& config, const RunManifest& man,
                   const CurveSink& curves) {
    if (config.out_dir.empty()) return;
    std::filesystem::create_directories(config.out_dir);
    const std::filesystem::path dir(config.out_dir);
    write_text_file_atomic((dir / "report.json").string(), man.report.dump(2) + "\n");
    if (!curves.rows.empty()) {
        write_csv((dir / "curves.csv").string(), curves.header, curves.rows);
        write_text_file_atomic((dir / "plot.gp").string(),
                               gnuplot_script("curves.csv", curves.header, curves.title,
                                              curves.log_x));
    }
    append_text_line((dir / "manifest.jsonl").string(), manifest_to_json(man).dump());
}

}  // namespace

Tolerances tolerances(const std::string& profile) {
    Tolerances t;
    if (profile == "strict") return t;
    if (profile == "desk") {
        t.mf_gap *= 2.0;
        t.hist_l1 *= 2.0;
        t.bg_margin *= 2.0;
        t.suspension *= 2.0;
        t.contraction *= 2.0;
        t.variance *= 2.0;
        t.rank_corr = 0.8;
        return t;
    }
    throw std::invalid_argument("tolerances: unknown profile '" + profile + "'");
}

Json config_to_json(const ExperimentConfig& c) {
    return Json{{"kind", c.kind},
                {"space", c.space},
                {"cone_file", c.cone_file},
                {"f", c.f},
                {"N", c.N},
                {"K", c.K},
                {"r0", c.r0},
                {"x0", c.x0},
                {"x", c.x},
                {"y", c.y},
                {"t_grid", c.t_grid},
                {"r_grid", c.r_grid},
                {"etas", c.etas},
                {"eps", c.eps},
                {"perturb_eta", c.perturb_eta},
                {"rho", c.rho},
                {"grid_cells", c.grid_cells},
                {"expect_equality", c.expect_equality},
                {"seed", c.seed},
                {"out_dir", c.out_dir},
                {"tol_profile", c.tol_profile}};
}

ExperimentConfig config_from_json(const Json& j) {
    require(j.is_object(), "config: expected a JSON object");
    ExperimentConfig c;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& key = it.key();
        const Json& v = it.value();
        if (key == "kind") c.kind = v.get<std::string>();
        else if (key == "space") c.space = v.get<std::string>();
        else if (key == "cone_file") c.cone_file = v.get<std::string>();
        else if (key == "f") c.f = v.get<std::string>();
        else if (key == "N") c.N = v.get<double>();
        else if (key == "K") c.K = v.get<double>();
        else if (key == "r0") c.r0 = v.get<double>();
        else if (key == "x0") c.x0 = v.get<int>();
        else if (key == "x") c.x = v.get<int>();
        else if (key == "y") c.y = v.get<int>();
        else if (key == "t_grid") c.t_grid = v.get<std::vector<double>>();
        else if (key == "r_grid") c.r_grid = v.get<std::vector<double>>();
        else if (key == "etas") c.etas = v.get<std::vector<double>>();
        else if (key == "eps") c.eps = v.get<double>();
        else if (key == "perturb_eta") c.perturb_eta = v.get<double>();
        else if (key == "rho") c.rho = v.get<double>();
        else if (key == "grid_cells") c.grid_cells = v.get<int>();
        else if (key == "expect_equality") c.expect_equality = v.get<bool>();
        else if (key == "seed") c.seed = v.get<std::uint64_t>();
        else if (key == "out_dir") c.out_dir = v.get<std::string>();
        else if (key == "tol_profile") c.tol_profile = v.get<std::string>();
        else throw std::invalid_argument("config: unknown key '" + key + "'");
    }
    require(j.contains("kind"), "config: missing 'kind'");
    return c;
}

void validate_config(const ExperimentConfig& c) {
    const auto& kinds = known_kinds();
    require(std::find(kinds.begin(), kinds.end(), c.kind) != kinds.end(),
            "config: unknown kind '" + c.kind + "'");
    tolerances(c.tol_profile);
    const bool needs_space = c.kind != "dichotomy" || c.cone_file.empty();
    if (needs_space) require(!c.space.empty(), "config: 'space' is required for kind " + c.kind);
    if (c.kind == "mf" || c.kind == "almost-rigidity-sweep") kernel_from_name(c.f);
    require(c.N > 0.0, "config: N must be positive");
    auto needs_times = [&](const char* why) {
        require(!c.t_grid.empty(), std::string("config: t_grid is required for ") + why);
        for (double t : c.t_grid) require(t > 0.0, "config: t_grid entries must be positive");
        require(std::is_sorted(c.t_grid.begin(), c.t_grid.end()),
                "config: t_grid must be increasing");
    };
    if (c.kind == "heat" || c.kind == "theta" || c.kind == "dichotomy") needs_times(c.kind.c_str());
    if (c.kind == "theta") {
        require(c.x >= 0 && c.y >= 0 && c.x != c.y, "config: theta needs a pair x != y");
        require(c.t_grid.size() >= 6, "config: theta needs at least 6 times");
    }
    if (c.kind == "bg") {
        require(!c.r_grid.empty(), "config: r_grid is required for bg");
        for (double r : c.r_grid) require(r > 0.0, "config: r_grid entries must be positive");
        require(std::is_sorted(c.r_grid.begin(), c.r_grid.end()),
                "config: r_grid must be increasing");
    }
    if (c.kind == "dichotomy") {
        require(c.t_grid.size() >= 4, "config: dichotomy needs at least 4 times");
        if (c.cone_file.empty())
            require(c.r0 > 0.0, "config: dichotomy over a generated cone needs r0 > 0");
    }
    if (c.kind == "almost-rigidity-sweep") {
        require(c.etas.size() >= 3, "config: sweep needs at least 3 perturbation levels");
        require(std::is_sorted(c.etas.begin(), c.etas.end()), "config: etas must be increasing");
        for (double e : c.etas) require(e >= 0.0 && e < 1.0, "config: etas must lie in [0,1)");
    }
    require(c.perturb_eta >= 0.0 && c.perturb_eta < 1.0, "config: perturb_eta must lie in [0,1)");
    require(c.eps >= 0.0, "config: eps must be nonnegative");
    require(c.grid_cells >= 0, "config: grid_cells must be nonnegative");
}

std::string config_hash(const ExperimentConfig& c) {
    return hex64(fnv1a64(config_to_json(c).dump()));
}

bool RunManifest::ok() const {
    if (!errors.empty()) return false;
    for (const auto& a : assertions)
        if (!a.pass) return false;
    return !assertions.empty();
}

Json manifest_to_json(const RunManifest& man) {
    Json asrt = Json::array();
    for (const auto& a : man.assertions)
        asrt.push_back(Json{{"name", a.name},
                            {"measured", a.measured},
                            {"lo", a.lo},
                            {"hi", a.hi},
                            {"pass", a.pass},
                            {"detail", a.detail}});
    return Json{{"kind", man.kind},
                {"config_hash", man.config_hash},
                {"tool_version", man.tool_version},
                {"wall_seconds", man.wall_seconds},
                {"assertions", asrt},
                {"errors", man.errors},
                {"ok", man.ok()}};
}

FiniteMMSpace make_space_from_spec(const std::string& spec, bool revalidate) {
    require(!spec.empty(), "space spec: empty");
    if (ends_with(spec, ".json")) return load_space(spec, revalidate);
    const auto parts = split(spec, ':');
    const std::string& head = parts[0];
    if (head == "circle") {
        require(parts.size() == 3, "space spec: circle:<circumference>:<n>");
        return circle(parse_double(parts[1], "circle"), parse_int(parts[2], "circle"));
    }
    if (head == "sphere") {
        require(parts.size() == 4, "space spec: sphere:<N>:<radius>:<n>");
        return sphere_fibonacci(parse_int(parts[1], "sphere"), parse_double(parts[2], "sphere"),
                                parse_int(parts[3], "sphere"));
    }
    if (head == "interval") {
        require(parts.size() == 3, "space spec: interval:<N>:<n>");
        return interval_model(parse_double(parts[1], "interval"), parse_int(parts[2], "interval"));
    }
    if (head == "square") {
        require(parts.size() >= 2, "space spec: square:<inner spec>");
        const FiniteMMSpace inner =
            make_space_from_spec(spec.substr(head.size() + 1), revalidate);
        return product_space(inner, inner);
    }
    throw std::invalid_argument("space spec: unknown generator '" + head +
                                "' (expected circle, sphere, interval, square, or a .json path)");
}

KernelFunction kernel_from_name(const std::string& name) {
    if (name == "cos") return KernelFunction::cosine();
    if (name == "id") return KernelFunction::identity();
    if (name == "square") return KernelFunction::square();
    throw std::invalid_argument("kernel: unknown name '" + name + "' (cos, id, square)");
}

FiniteMMSpace perturb_metric(const FiniteMMSpace& space, double eta, std::uint64_t seed) {
    require(eta >= 0.0 && eta < 1.0, "perturb_metric: eta must lie in [0,1)");
    require(space.n <= 400, "perturb_metric: shortest-path repair is capped at n = 400");
    FiniteMMSpace out = space;
    if (eta == 0.0) return out;
    const int n = space.n;
    std::mt19937_64 rng(mix_seed(seed, 0xE7A));
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double v = space.d(i, j) * (1.0 + eta * U(rng));
            out.dist[static_cast<std::size_t>(i) * n + j] = v;
            out.dist[static_cast<std::size_t>(j) * n + i] = v;
        }
    // Floyd-Warshall repair; row k and column k are fixed points of pass k, so
    // symmetry survives each pass.
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i) {
            const double dik = out.dist[static_cast<std::size_t>(i) * n + k];
            double* row_i = &out.dist[static_cast<std::size_t>(i) * n];
            const double* row_k = &out.dist[static_cast<std::size_t>(k) * n];
            for (int j = 0; j < n; ++j) {
                const double via = dik + row_k[j];
                if (via < row_i[j]) row_i[j] = via;
            }
        }
    std::ostringstream tag;
    tag << space.name << "_eta" << eta;
    out.name = tag.str();
    const ValidationReport rep = validate_space(out, true);
    require(rep.ok(), "perturb_metric: repaired table failed validation");
    return out;
}

std::vector<double> parse_time_grid(const std::string& spec) {
    require(!spec.empty(), "time grid: empty spec");
    const auto parts = split(spec, ':');
    if (parts[0] == "log" || parts[0] == "lin") {
        require(parts.size() == 4, "time grid: expected " + parts[0] + ":<a>:<b>:<k>");
        const double a = parse_double(parts[1], "time grid");
        const double b = parse_double(parts[2], "time grid");
        const int k = parse_int(parts[3], "time grid");
        require(k >= 2, "time grid: need at least 2 points");
        require(a < b, "time grid: need a < b");
        std::vector<double> out(k);
        if (parts[0] == "log") {
            require(a > 0.0, "time grid: log spacing needs a > 0");
            const double step = std::log(b / a) / static_cast<double>(k - 1);
            for (int i = 0; i < k; ++i) out[i] = a * std::exp(step * i);
        } else {
            const double step = (b - a) / static_cast<double>(k - 1);
            for (int i = 0; i < k; ++i) out[i] = a + step * i;
        }
        out.back() = b;
        return out;
    }
    std::vector<double> out;
    for (const auto& tok : split(spec, ','))
        out.push_back(parse_double(tok, "time grid"));
    return out;
}

RunManifest run(const ExperimentConfig& config) {
    validate_config(config);
    RunManifest man;
    man.kind = config.kind;
    man.config_hash = config_hash(config);
    const Tolerances tol = tolerances(config.tol_profile);
    Json report{{"schema_version", kSchemaVersion},
                {"tool_version", kToolVersion},
                {"config", config_to_json(config)}};
    CurveSink curves;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        if (config.kind == "mf") run_mf(config, tol, man, report, curves);
        else if (config.kind == "bg") run_bg(config, tol, man, report, curves);
        else if (config.kind == "heat") run_heat(config, tol, man, report, curves);
        else if (config.kind == "theta") run_theta(config, tol, man, report, curves);
        else if (config.kind == "dichotomy") run_dichotomy(config, tol, man, report, curves);
        else if (config.kind == "suspension-invariance")
            run_suspension(config, tol, man, report, curves);
        else run_rigidity_sweep(config, tol, man, report, curves);
    } catch (const std::exception& e) {
        man.errors.push_back(std::string(e.what()) + " [kind=" + config.kind +
                             ", space=" + config.space + "]");
    }
    man.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!man.errors.empty()) report["errors"] = man.errors;
    man.report = std::move(report);
    write_outputs(config, man, curves);
    return man;
}

RunManifest sweep(const std::vector<ExperimentConfig>& configs, int parallelism) {
    require(!configs.empty(), "sweep: no configs");
    require(parallelism >= 1, "sweep: parallelism must be >= 1");
    for (const auto& c : configs) {
        validate_config(c);
        require(c.kind == configs.front().kind, "sweep: configs must share one kind");
    }
    std::vector<RunManifest> results(configs.size());
    parallel_for(
        configs.size(), [&](std::size_t i) { results[i] = run(configs[i]); }, parallelism);

    RunManifest man;
    man.kind = configs.front().kind;
    std::string all_hashes;
    Json reports = Json::array();
    for (std::size_t i = 0; i < results.size(); ++i) {
        all_hashes += results[i].config_hash;
        reports.push_back(results[i].report);
        const std::string prefix = "run" + std::to_string(i) + "-";
        for (AssertionResult a : results[i].assertions) {
            a.name = prefix + a.name;
            add_assertion(man, std::move(a));
        }
        for (const auto& e : results[i].errors)
            man.errors.push_back(prefix + e);
        man.wall_seconds += results[i].wall_seconds;
    }
    man.config_hash = hex64(fnv1a64(all_hashes));
    man.report = Json{{"schema_version", kSchemaVersion},
                      {"tool_version", kToolVersion},
                      {"kind", man.kind},
                      {"runs", reports}};

    // Family co-movement: an mf family indexed by perturbation strength must
    // rank-order both the gap and the distance-law mismatch.
    if (man.kind == "mf" && configs.size() >= 3) {
        bool indexed = true;
        std::vector<double> etas, gaps, l1s;
        for (std::size_t i = 0; i < configs.size(); ++i) {
            etas.push_back(configs[i].perturb_eta);
            if (i > 0 && !(etas[i] > etas[i - 1])) indexed = false;
            const auto& rep = results[i].report;
            if (rep.contains("rigidity")) {
                gaps.push_back(std::abs(rep["rigidity"]["gap"].get<double>()));
                l1s.push_back(rep["rigidity"]["hist_l1"].get<double>());
            } else {
                indexed = false;
            }
        }
        if (indexed) {
            const double floor = tolerances(configs.front().tol_profile).rank_corr;
            add_assertion(man, check_range("family-rank-corr-gap", spearman(etas, gaps), floor,
                                           1.0, "|gap| co-moves with perturbation"));
            add_assertion(man, check_range("family-rank-corr-hist", spearman(etas, l1s), floor,
                                           1.0, "distance-law mismatch co-moves with perturbation"));
        }
    }
    return man;
}

std::string csv_schema_text() {
    std::ostringstream os;
    os << "riccilab CSV schema, version " << kSchemaVersion << "\n"
       << "Every run writes curves.csv (17 significant digits) plus plot.gp.\n\n"
       << "mf curves.csv\n"
       << "  bin_center   midpoint of a pair-distance histogram bin\n"
       << "  pair_mass    m x m mass of distances falling in the bin (diagonal included)\n"
       << "  model_mass   mass the N-dimensional model law assigns to the bin\n\n"
       << "bg curves.csv\n"
       << "  r             ball radius\n"
       << "  volume        measure of the closed ball around x0\n"
       << "  model_volume  model volume normalized like the measured profile\n"
       << "  margin        volume ratio at r minus the ratio at the largest radius\n\n"
       << "heat curves.csv\n"
       << "  t           diffusion time\n"
       << "  spread_sq   sum of w_i d(i, x0)^2 for the evolved delta measure\n"
       << "  bound_2Nt   dimension bound 2 N t\n"
       << "  mass_error  total mass minus 1\n\n"
       << "theta curves.csv\n"
       << "  t    diffusion time\n"
       << "  w2   exact quadratic transport distance between the evolved deltas\n"
       << "  v    -log(w2 / d) / t, the contraction rate at time t\n\n"
       << "dichotomy curves.csv\n"
       << "  t       diffusion time\n"
       << "  d_up    d^2 - product-coupling cost, the certified defect lower bound\n"
       << "  g       dual lower bound on W2 from the cone potential, Lipschitz-normalized\n"
       << "  c_t     first radial moment of the vertex law\n"
       << "  ex_r2   second moment of d(., x) under the off-vertex flow\n"
       << "  eo_s2   second radial moment of the vertex law\n\n"
       << "suspension-invariance curves.csv\n"
       << "  m_cos_base        M_cos of the base space\n"
       << "  m_cos_suspension  M_cos of its suspension\n"
       << "  abs_diff          absolute difference\n\n"
       << "almost-rigidity-sweep curves.csv\n"
       << "  eta      metric perturbation strength\n"
       << "  abs_gap  |M*_{f,N} - M_f| on the perturbed space\n"
       << "  hist_l1  L1 distance between the pair-distance law and the model law\n";
    return os.str();
}

}  // namespace ricci
