// Command-line front end. Every analysis subcommand funnels through the
// experiment runner, so reports, CSVs, and manifests come out identical
// whether an experiment is launched here or from a config file.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "riccilab/experiments.hpp"

namespace {

using ricci::ExperimentConfig;
using ricci::Json;
using ricci::RunManifest;

double parse_method_eps(const std::string& method) {
    if (method == "graph" || method == "graph:eps=auto") return 0.0;
    const std::string prefix = "graph:eps=";
    if (method.rfind(prefix, 0) == 0) {
        const std::string val = method.substr(prefix.size());
        std::size_t used = 0;
        const double eps = std::stod(val, &used);
        ricci::require(used == val.size() && eps > 0.0,
                       "method: bandwidth must be a positive number");
        return eps;
    }
    throw std::invalid_argument("method: expected graph, graph:eps=auto, or graph:eps=<h>");
}

std::pair<int, int> parse_pair(const std::string& spec) {
    const auto comma = spec.find(',');
    ricci::require(comma != std::string::npos, "pair: expected <i>,<j>");
    return {std::stoi(spec.substr(0, comma)), std::stoi(spec.substr(comma + 1))};
}

int finish_run(const ExperimentConfig& config) {
    const RunManifest man = ricci::run(config);
    std::cout << ricci::manifest_to_json(man).dump(2) << "\n";
    return man.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    if (const char* cache = std::getenv("RICCILAB_CACHE")) ricci::set_spectral_cache_dir(cache);

    CLI::App app{"riccilab: curvature diagnostics on finite metric measure spaces"};
    app.require_subcommand(1);
    // global flags are accepted after the subcommand too
    app.fallthrough();

    int threads = 1;
    std::uint64_t seed = 2026;
    std::string out_dir;
    std::string tol_profile = "strict";
    app.add_option("--threads", threads, "worker threads for sweeps")->capture_default_str();
    app.add_option("--seed", seed, "run seed")->capture_default_str();
    app.add_option("--out-dir", out_dir, "directory for reports, CSVs, and manifests");
    app.add_option("--tol-profile", tol_profile, "assertion tolerances")
        ->check(CLI::IsMember({"strict", "desk"}))
        ->capture_default_str();

    auto base_config = [&](const std::string& kind) {
        ExperimentConfig c;
        c.kind = kind;
        c.seed = seed;
        c.out_dir = out_dir;
        c.tol_profile = tol_profile;
        return c;
    };

    int exit_code = 0;

    // space: generate or load, optionally perturb, print a summary, save.
    {
        auto* cmd = app.add_subcommand("space", "generate a space and save it as JSON");
        auto spec = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto eta = std::make_shared<double>(0.0);
        cmd->add_option("--spec", *spec, "circle:<C>:<n> | sphere:<N>:<R>:<n> | interval:<N>:<n> "
                                         "| square:<spec> | file.json")
            ->required();
        cmd->add_option("--out", *out, "output file");
        cmd->add_option("--perturb-eta", *eta, "multiplicative noise with shortest-path repair");
        cmd->callback([&, spec, out, eta]() {
            ricci::FiniteMMSpace space = ricci::make_space_from_spec(*spec);
            if (*eta > 0.0) space = ricci::perturb_metric(space, *eta, seed);
            double diam = 0.0;
            for (int i = 0; i < space.n; ++i)
                for (int j = i + 1; j < space.n; ++j) diam = std::max(diam, space.d(i, j));
            std::cout << Json{{"name", space.name}, {"n", space.n}, {"diameter", diam}}.dump(2)
                      << "\n";
            if (!out->empty()) ricci::save_space(space, *out, *spec);
        });
    }

    // cone: build over a base space and save.
    {
        auto* cmd = app.add_subcommand("cone", "build a warped cone over a base space");
        auto base = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto grid = std::make_shared<std::string>();
        auto K = std::make_shared<double>(0.0);
        auto N = std::make_shared<double>(2.0);
        cmd->add_option("--base", *base, "base space (spec or file)")->required();
        cmd->add_option("--K", *K, "cone curvature parameter")->capture_default_str();
        cmd->add_option("--N", *N, "dimension parameter")->capture_default_str();
        cmd->add_option("--grid", *grid, "lin:<cells>:<R> | geo:<cells>:<h0>:<R>")->required();
        cmd->add_option("--out", *out, "output file");
        cmd->callback([base, out, grid, K, N]() {
            const ricci::FiniteMMSpace b = ricci::make_space_from_spec(*base);
            const ricci::ConeSpace cone = ricci::build_cone(b, *K, *N, ricci::parse_grid(*grid));
            std::cout << Json{{"base", b.name},
                              {"K", cone.K},
                              {"N", cone.N},
                              {"layers", cone.layers()},
                              {"points", cone.n_points()},
                              {"max_radius", cone.max_radius()},
                              {"far_pole", cone.has_far_pole}}
                             .dump(2)
                      << "\n";
            if (!out->empty()) ricci::save_cone(cone, *out);
        });
    }

    // mf: mean-distance functional against its model value.
    {
        auto* cmd = app.add_subcommand("mf", "mean-distance functional vs the model value");
        auto space = std::make_shared<std::string>();
        auto f = std::make_shared<std::string>("cos");
        auto N = std::make_shared<double>(2.0);
        auto eta = std::make_shared<double>(0.0);
        auto equality = std::make_shared<bool>(false);
        cmd->add_option("--space", *space)->required();
        cmd->add_option("--f", *f, "cos | id | square")->capture_default_str();
        cmd->add_option("--N", *N)->capture_default_str();
        cmd->add_option("--perturb-eta", *eta);
        cmd->add_flag("--expect-equality", *equality, "assert the model value is attained");
        cmd->callback([&, space, f, N, eta, equality]() {
            ExperimentConfig c = base_config("mf");
            c.space = *space;
            c.f = *f;
            c.N = *N;
            c.perturb_eta = *eta;
            c.expect_equality = *equality;
            exit_code = finish_run(c);
        });
    }

    // bg: volume comparison profile.
    {
        auto* cmd = app.add_subcommand("bg", "volume growth against the curvature model");
        auto space = std::make_shared<std::string>();
        auto rgrid = std::make_shared<std::string>();
        auto x0 = std::make_shared<int>(0);
        auto K = std::make_shared<double>(0.0);
        auto N = std::make_shared<double>(2.0);
        auto equality = std::make_shared<bool>(false);
        cmd->add_option("--space", *space)->required();
        cmd->add_option("--x0", *x0)->capture_default_str();
        cmd->add_option("--K", *K)->capture_default_str();
        cmd->add_option("--N", *N)->capture_default_str();
        cmd->add_option("--rgrid", *rgrid, "lin:<a>:<b>:<k> or a comma list")->required();
        cmd->add_flag("--expect-equality", *equality);
        cmd->callback([&, space, rgrid, x0, K, N, equality]() {
            ExperimentConfig c = base_config("bg");
            c.space = *space;
            c.x0 = *x0;
            c.K = *K;
            c.N = *N;
            c.r_grid = ricci::parse_time_grid(*rgrid);
            c.expect_equality = *equality;
            exit_code = finish_run(c);
        });
    }

    // heat: evolve a delta and check mass and spread.
    {
        auto* cmd = app.add_subcommand("heat", "evolve a delta measure under the heat flow");
        auto space = std::make_shared<std::string>();
        auto method = std::make_shared<std::string>("graph:eps=auto");
        auto tgrid = std::make_shared<std::string>();
        auto from = std::make_shared<int>(0);
        auto t = std::make_shared<double>(0.0);
        auto N = std::make_shared<double>(2.0);
        auto out = std::make_shared<std::string>();
        cmd->add_option("--space", *space)->required();
        cmd->add_option("--method", *method, "graph:eps=auto | graph:eps=<h>")
            ->capture_default_str();
        cmd->add_option("--from", *from, "start point")->capture_default_str();
        cmd->add_option("--t", *t, "single diffusion time");
        cmd->add_option("--tgrid", *tgrid, "log:<a>:<b>:<k> | lin:<a>:<b>:<k> | comma list");
        cmd->add_option("--N", *N, "dimension bound parameter")->capture_default_str();
        cmd->add_option("--out", *out, "write the final evolved measure here");
        cmd->callback([&, space, method, tgrid, from, t, N, out]() {
            ExperimentConfig c = base_config("heat");
            c.space = *space;
            c.eps = parse_method_eps(*method);
            c.x0 = *from;
            c.N = *N;
            if (!tgrid->empty()) c.t_grid = ricci::parse_time_grid(*tgrid);
            else if (*t > 0.0) c.t_grid = {*t};
            const RunManifest man = ricci::run(c);
            std::cout << ricci::manifest_to_json(man).dump(2) << "\n";
            if (!out->empty() && man.report.contains("measures") &&
                !man.report["measures"].empty())
                ricci::write_text_file_atomic(*out, man.report["measures"].back().dump(2) + "\n");
            exit_code = man.ok() ? 0 : 1;
        });
    }

    // ot: transport distance between two stored measures.
    {
        auto* cmd = app.add_subcommand("ot", "transport distance between two measures");
        auto space = std::make_shared<std::string>();
        auto mu_file = std::make_shared<std::string>();
        auto nu_file = std::make_shared<std::string>();
        auto p = std::make_shared<double>(2.0);
        auto sink_eps = std::make_shared<double>(0.0);
        cmd->add_option("--space", *space)->required();
        cmd->add_option("--mu", *mu_file)->required();
        cmd->add_option("--nu", *nu_file)->required();
        cmd->add_option("--p", *p)->capture_default_str();
        cmd->add_option("--sinkhorn-eps", *sink_eps, "also run the entropic solver");
        cmd->callback([space, mu_file, nu_file, p, sink_eps]() {
            const ricci::FiniteMMSpace s = ricci::make_space_from_spec(*space);
            const ricci::ProbMeasure mu =
                ricci::measure_from_json(Json::parse(ricci::read_text_file(*mu_file)));
            const ricci::ProbMeasure nu =
                ricci::measure_from_json(Json::parse(ricci::read_text_file(*nu_file)));
            ricci::require(mu.n() == s.n && nu.n() == s.n,
                           "ot: measure size does not match the space");
            const ricci::MetricView view = ricci::view_of(s);
            const double wp = ricci::wp_distance(view, mu, nu, *p);
            Json out{{"p", *p}, {"w_p", wp}};
            if (*sink_eps > 0.0) {
                ricci::require(s.n <= 2048, "ot: entropic path is capped at n = 2048");
                std::vector<double> cost(static_cast<std::size_t>(s.n) * s.n);
                for (int i = 0; i < s.n; ++i)
                    for (int j = 0; j < s.n; ++j)
                        cost[static_cast<std::size_t>(i) * s.n + j] =
                            std::pow(s.d(i, j), *p);
                const ricci::SinkhornResult sr =
                    ricci::sinkhorn(cost, s.n, s.n, mu.w, nu.w, *sink_eps);
                out["sinkhorn"] = ricci::sinkhorn_to_json(sr);
            }
            std::cout << out.dump(2) << "\n";
        });
    }

    // theta: short-time curvature estimate for one pair.
    {
        auto* cmd = app.add_subcommand("theta", "short-time curvature estimate for a pair");
        auto space = std::make_shared<std::string>();
        auto method = std::make_shared<std::string>("graph:eps=auto");
        auto pair = std::make_shared<std::string>();
        auto tgrid = std::make_shared<std::string>();
        cmd->add_option("--space", *space)->required();
        cmd->add_option("--method", *method)->capture_default_str();
        cmd->add_option("--pair", *pair, "<i>,<j>")->required();
        cmd->add_option("--tgrid", *tgrid, "log:<a>:<b>:<k>, at least 6 times")->required();
        cmd->callback([&, space, method, pair, tgrid]() {
            ExperimentConfig c = base_config("theta");
            c.space = *space;
            c.eps = parse_method_eps(*method);
            std::tie(c.x, c.y) = parse_pair(*pair);
            c.t_grid = ricci::parse_time_grid(*tgrid);
            exit_code = finish_run(c);
        });
    }

    // dichotomy: vertex-vs-point transport defect classification on a cone.
    {
        auto* cmd = app.add_subcommand("dichotomy", "classify a flat cone at a marked point");
        auto cone_file = std::make_shared<std::string>();
        auto space = std::make_shared<std::string>();
        auto tgrid = std::make_shared<std::string>();
        auto x0 = std::make_shared<int>(0);
        auto r0 = std::make_shared<double>(0.0);
        auto N = std::make_shared<double>(2.0);
        auto eps = std::make_shared<double>(0.0);
        auto rho = std::make_shared<double>(0.0);
        cmd->add_option("--cone", *cone_file, "prebuilt cone file");
        cmd->add_option("--space", *space, "base space; the cone grid is derived");
        cmd->add_option("--x0", *x0, "base point under the marked cone point")
            ->capture_default_str();
        cmd->add_option("--r0", *r0, "marked radius")->required();
        cmd->add_option("--N", *N)->capture_default_str();
        cmd->add_option("--eps", *eps, "graph bandwidth, 0 = auto");
        cmd->add_option("--rho", *rho, "short-circle family label; checks the closed form");
        cmd->add_option("--tgrid", *tgrid)->required();
        cmd->callback([&, cone_file, space, tgrid, x0, r0, N, eps, rho]() {
            ExperimentConfig c = base_config("dichotomy");
            c.cone_file = *cone_file;
            c.space = *space;
            c.x0 = *x0;
            c.r0 = *r0;
            c.N = *N;
            c.eps = *eps;
            c.rho = *rho;
            c.t_grid = ricci::parse_time_grid(*tgrid);
            exit_code = finish_run(c);
        });
    }

    // sweep: run a homogeneous config family.
    {
        auto* cmd = app.add_subcommand("sweep", "run a family of configs from a JSON array");
        auto config_file = std::make_shared<std::string>();
        auto parallelism = std::make_shared<int>(0);
        cmd->add_option("--config", *config_file, "JSON array of experiment configs")
            ->required();
        cmd->add_option("--parallelism", *parallelism, "0 = use --threads");
        cmd->callback([&, config_file, parallelism]() {
            const Json arr = Json::parse(ricci::read_text_file(*config_file));
            ricci::require(arr.is_array() && !arr.empty(),
                           "sweep: config file must hold a nonempty JSON array");
            std::vector<ExperimentConfig> configs;
            for (const auto& j : arr) configs.push_back(ricci::config_from_json(j));
            const int par = *parallelism > 0 ? *parallelism : std::max(1, threads);
            const RunManifest man = ricci::sweep(configs, par);
            std::cout << ricci::manifest_to_json(man).dump(2) << "\n";
            if (!out_dir.empty()) {
                std::filesystem::create_directories(out_dir);
                ricci::write_text_file_atomic(out_dir + "/sweep_manifest.json",
                                              ricci::manifest_to_json(man).dump(2) + "\n");
            }
            exit_code = man.ok() ? 0 : 1;
        });
    }

    // schema: document every CSV column the tool can emit.
    {
        auto* cmd = app.add_subcommand("schema", "print the CSV schema");
        cmd->callback([]() { std::cout << ricci::csv_schema_text(); });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return exit_code;
}
