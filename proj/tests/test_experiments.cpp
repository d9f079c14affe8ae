#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "riccilab/experiments.hpp"

using namespace ricci;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("riccilab_test_" + tag);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("configs round-trip byte-identically") {
    ExperimentConfig c;
    c.kind = "theta";
    c.space = "sphere:2:1:500";
    c.x = 12;
    c.y = 77;
    c.t_grid = {1e-3, 1e-2, 1e-1, 0.3, 0.5, 1.0};
    c.eps = 0.01;
    c.seed = 99;
    const Json j = config_to_json(c);
    const ExperimentConfig back = config_from_json(j);
    CHECK(config_to_json(back).dump() == j.dump());
    CHECK(config_hash(back) == config_hash(c));
    // A changed field changes the fingerprint.
    ExperimentConfig other = c;
    other.seed = 100;
    CHECK(config_hash(other) != config_hash(c));
}

TEST_CASE("unknown keys and missing kind are rejected") {
    Json j = config_to_json(ExperimentConfig{});
    j["kind"] = "mf";
    j["spce"] = "typo";
    CHECK_THROWS(config_from_json(j));
    Json empty = Json::object();
    CHECK_THROWS(config_from_json(empty));
}

TEST_CASE("validate_config rejects malformed requests") {
    ExperimentConfig c;
    c.kind = "nope";
    CHECK_THROWS(validate_config(c));

    c.kind = "theta";
    c.space = "circle:6.28:64";
    c.t_grid = {1e-3, 2e-3, 4e-3, 8e-3, 1.6e-2, 3.2e-2};
    CHECK_THROWS(validate_config(c));  // pair not set
    c.x = 0;
    c.y = 5;
    CHECK_NOTHROW(validate_config(c));
    c.t_grid[0] = -1.0;
    CHECK_THROWS(validate_config(c));

    ExperimentConfig s;
    s.kind = "almost-rigidity-sweep";
    s.space = "sphere:2:1:160";
    s.etas = {0.2, 0.1, 0.0};  // must increase
    CHECK_THROWS(validate_config(s));
    s.etas = {0.0, 0.1, 0.2};
    CHECK_NOTHROW(validate_config(s));

    ExperimentConfig b;
    b.kind = "bg";
    b.space = "sphere:2:1:100";
    CHECK_THROWS(validate_config(b));  // no radii
}

TEST_CASE("time grid parsing") {
    const auto lg = parse_time_grid("log:1e-3:1e-1:5");
    CHECK(lg.size() == 5);
    CHECK(lg.front() == doctest::Approx(1e-3));
    CHECK(lg.back() == doctest::Approx(1e-1));
    CHECK(lg[1] / lg[0] == doctest::Approx(lg[2] / lg[1]));

    const auto ln = parse_time_grid("lin:0:1:5");
    CHECK(ln[2] == doctest::Approx(0.5));

    const auto cm = parse_time_grid("0.01,0.02,0.05");
    CHECK(cm.size() == 3);
    CHECK(cm[2] == doctest::Approx(0.05));

    CHECK_THROWS(parse_time_grid("log:0:1:5"));   // log needs a > 0
    CHECK_THROWS(parse_time_grid("log:1:2"));     // missing count
    CHECK_THROWS(parse_time_grid("0.01,abc"));
}

TEST_CASE("space specs") {
    CHECK(make_space_from_spec("circle:6.28:32").n == 32);
    CHECK(make_space_from_spec("interval:2:65").n == 65);
    CHECK(make_space_from_spec("sphere:2:1:100").n == 100);
    CHECK(make_space_from_spec("square:circle:6.28:12").n == 144);
    CHECK_THROWS(make_space_from_spec("torus:1:2"));
    CHECK_THROWS(make_space_from_spec("circle:6.28"));

    const fs::path dir = fresh_dir("spacespec");
    fs::create_directories(dir);
    const FiniteMMSpace s = make_space_from_spec("circle:6.28:32");
    save_space(s, (dir / "c.json").string(), "circle:6.28:32");
    const FiniteMMSpace r = make_space_from_spec((dir / "c.json").string());
    CHECK(r.n == s.n);
    CHECK(r.d(3, 9) == doctest::Approx(s.d(3, 9)));
    fs::remove_all(dir);
}

TEST_CASE("metric perturbation repairs the triangle inequality") {
    const FiniteMMSpace base = sphere_fibonacci(2, 1.0, 120);
    const FiniteMMSpace p1 = perturb_metric(base, 0.2, 5);
    const FiniteMMSpace p2 = perturb_metric(base, 0.2, 5);
    const FiniteMMSpace p3 = perturb_metric(base, 0.2, 6);
    CHECK(validate_space(p1).ok());  // repair restored the triangle inequality
    CHECK(p1.dist == p2.dist);       // seeded and deterministic
    CHECK(p1.dist != p3.dist);
    bool changed = false;
    for (std::size_t k = 0; k < base.dist.size(); ++k)
        if (p1.dist[k] != base.dist[k]) changed = true;
    CHECK(changed);

    const FiniteMMSpace same = perturb_metric(base, 0.0, 5);
    CHECK(same.dist == base.dist);
    CHECK_THROWS(perturb_metric(base, 1.5, 5));
    CHECK_THROWS(perturb_metric(circle(2 * kPi, 401), 0.1, 5));  // repair cap
}

TEST_CASE("mf run on the sphere passes and is deterministic on disk") {
    const fs::path dir = fresh_dir("mfrun");
    ExperimentConfig c;
    c.kind = "mf";
    c.space = "sphere:2:1:220";
    c.f = "cos";
    c.N = 2.0;
    c.expect_equality = true;
    c.out_dir = dir.string();

    const RunManifest first = run(c);
    CHECK(first.ok());
    CHECK(first.errors.empty());
    CHECK(first.kind == "mf");
    REQUIRE(fs::exists(dir / "report.json"));
    REQUIRE(fs::exists(dir / "curves.csv"));
    REQUIRE(fs::exists(dir / "plot.gp"));
    const std::string report1 = slurp(dir / "report.json");
    const std::string csv1 = slurp(dir / "curves.csv");

    const RunManifest second = run(c);
    CHECK(slurp(dir / "report.json") == report1);
    CHECK(slurp(dir / "curves.csv") == csv1);
    // Manifests append and differ only in wall-clock time.
    std::ifstream mf(dir / "manifest.jsonl");
    std::string l1, l2;
    REQUIRE(static_cast<bool>(std::getline(mf, l1)));
    REQUIRE(static_cast<bool>(std::getline(mf, l2)));
    Json m1 = Json::parse(l1), m2 = Json::parse(l2);
    m1.erase("wall_seconds");
    m2.erase("wall_seconds");
    CHECK(m1.dump() == m2.dump());
    CHECK(m1["config_hash"] == config_hash(c));
    fs::remove_all(dir);
}

TEST_CASE("execution errors are captured, partial report still written") {
    const fs::path dir = fresh_dir("errcap");
    ExperimentConfig c;
    c.kind = "mf";
    c.space = "/nonexistent/space.json";
    c.out_dir = dir.string();
    const RunManifest man = run(c);  // must not throw
    CHECK_FALSE(man.ok());
    CHECK_FALSE(man.errors.empty());
    REQUIRE(fs::exists(dir / "report.json"));
    CHECK(Json::parse(slurp(dir / "report.json")).contains("errors"));
    fs::remove_all(dir);
}

TEST_CASE("malformed configs abort before any output") {
    const fs::path dir = fresh_dir("malformed");
    ExperimentConfig c;
    c.kind = "theta";  // missing the pair
    c.space = "circle:6.28:64";
    c.t_grid = {1e-3, 2e-3, 4e-3, 8e-3, 1.6e-2, 3.2e-2};
    c.out_dir = dir.string();
    CHECK_THROWS(run(c));
    CHECK_FALSE(fs::exists(dir));
    fs::remove_all(dir);
}

TEST_CASE("heat run conserves mass and reports the evolved measures") {
    ExperimentConfig c;
    c.kind = "heat";
    c.space = "circle:6.283185307:128";
    c.N = 1.0;
    c.x0 = 5;
    c.t_grid = {0.01, 0.04};
    const RunManifest man = run(c);
    CHECK(man.ok());
    REQUIRE(man.report.contains("measures"));
    CHECK(man.report["measures"].size() == 2);
    double total = 0.0;
    for (double w : man.report["measures"][1]["weights"].get<std::vector<double>>()) total += w;
    CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("suspension invariance holds for the round circle") {
    ExperimentConfig c;
    c.kind = "suspension-invariance";
    c.space = "circle:6.283185307179586:64";
    c.N = 1.0;
    c.grid_cells = 48;
    const RunManifest man = run(c);
    CHECK(man.ok());
    CHECK(std::abs(man.report["m_cos_base"].get<double>()) <= 1e-9);
    CHECK(std::abs(man.report["m_cos_suspension"].get<double>()) <= 1e-2);
}

TEST_CASE("rigidity sweep ranks perturbation strength") {
    ExperimentConfig c;
    c.kind = "almost-rigidity-sweep";
    c.space = "sphere:2:1:160";
    c.f = "cos";
    c.N = 2.0;
    c.etas = {0.0, 0.08, 0.2};
    const RunManifest man = run(c);
    INFO(manifest_to_json(man).dump(2));
    CHECK(man.ok());
    bool saw_rank = false;
    for (const auto& a : man.assertions)
        if (a.name == "sweep-rank-corr-gap") {
            saw_rank = true;
            CHECK(a.measured >= 0.9);
        }
    CHECK(saw_rank);
}

TEST_CASE("sweep requires one kind and adds family assertions") {
    ExperimentConfig a;
    a.kind = "mf";
    a.space = "sphere:2:1:160";
    ExperimentConfig b = a;
    b.kind = "heat";
    b.x0 = 0;
    b.t_grid = {0.01};
    CHECK_THROWS(sweep({a, b}));

    std::vector<ExperimentConfig> family;
    for (double eta : {0.05, 0.1, 0.2}) {
        ExperimentConfig c = a;
        c.perturb_eta = eta;
        family.push_back(c);
    }
    const RunManifest man = sweep(family, 1);
    CHECK(man.kind == "mf");
    bool fam_gap = false, fam_hist = false;
    for (const auto& as : man.assertions) {
        if (as.name == "family-rank-corr-gap") fam_gap = true;
        if (as.name == "family-rank-corr-hist") fam_hist = true;
    }
    CHECK(fam_gap);
    CHECK(fam_hist);
    CHECK(man.report["runs"].size() == 3);
}

TEST_CASE("schema text covers every experiment kind") {
    const std::string schema = csv_schema_text();
    for (const char* kind : {"mf", "bg", "heat", "theta", "dichotomy", "suspension-invariance",
                             "almost-rigidity-sweep"})
        CHECK(schema.find(kind) != std::string::npos);
}

TEST_CASE("tolerance profiles") {
    const Tolerances strict = tolerances("strict");
    const Tolerances desk = tolerances("desk");
    CHECK(desk.mf_gap > strict.mf_gap);
    CHECK(desk.rank_corr < strict.rank_corr);
    CHECK_THROWS(tolerances("sloppy"));
}

TEST_CASE("command line surface") {
    // Exercised only when the binary sits next to the test runner (ctest cwd).
    if (!fs::exists("riccilab")) return;
    CHECK(std::system("./riccilab schema > /dev/null") == 0);
    CHECK(std::system("./riccilab mf --space bogus:1 > /dev/null 2>&1") != 0);
    CHECK(std::system("./riccilab theta --space circle:6.28:32 --pair 1,1 "
                      "--tgrid log:1e-3:1e-2:6 > /dev/null 2>&1") != 0);
}

}  // TEST_SUITE
