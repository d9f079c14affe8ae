#pragma once

// Experiment orchestration: validated configs, deterministic runs keyed by
// (config, seed), assertion manifests, and family sweeps.

#include <cstdint>
#include <string>
#include <vector>

#include "riccilab/io.hpp"

namespace ricci {

inline constexpr const char* kToolVersion = "riccilab 0.1.0";
inline constexpr int kSchemaVersion = 1;

struct Tolerances {
    double mf_gap = 5e-3;       // sharp-inequality slack and model-equality window
    double hist_l1 = 5e-2;      // distance-law mismatch of an unperturbed model
    double bg_margin = 1e-2;    // volume-ratio margin floor / equality window
    double suspension = 1e-2;   // |M_cos(suspension) - M_cos| window
    double contraction = 2e-2;  // worst contraction ratio above the bound
    double variance = 5e-2;     // spread^2 over 2 N t above 1
    double rank_corr = 0.9;     // sweep co-movement floor
};

// "strict" pins the acceptance values; "desk" doubles the windows (and drops
// the rank-correlation floor to 0.8) for exploratory runs.
Tolerances tolerances(const std::string& profile);

struct ExperimentConfig {
    std::string kind;  // mf | bg | heat | theta | dichotomy | suspension-invariance
                       // | almost-rigidity-sweep
    std::string space;      // generator spec ("circle:6.28:128", "sphere:2:1:2000",
                            // "interval:3:512", "square:<spec>") or a .json path
    std::string cone_file;  // optional prebuilt cone (dichotomy)
    std::string f = "cos";  // mf kernel: cos | id | square
    double N = 2.0;
    double K = 0.0;
    double r0 = 0.0;
    int x0 = 0;
    int x = -1, y = -1;          // theta pair
    std::vector<double> t_grid;
    std::vector<double> r_grid;  // bg radii
    std::vector<double> etas;    // almost-rigidity-sweep perturbations
    double eps = 0.0;            // graph bandwidth, 0 = auto
    double perturb_eta = 0.0;    // perturb the space before running (mf)
    double rho = 0.0;            // short-circle family annotation; checks a vs closed form
    int grid_cells = 0;          // suspension radial cells, 0 = 96
    bool expect_equality = false;
    std::uint64_t seed = 2026;
    std::string out_dir;         // empty = no files written
    std::string tol_profile = "strict";
};

Json config_to_json(const ExperimentConfig& config);
// Strict: unknown keys are rejected, so configs round-trip byte-identically.
ExperimentConfig config_from_json(const Json& j);
// Throws std::invalid_argument; run() refuses to produce any output on failure.
void validate_config(const ExperimentConfig& config);
std::string config_hash(const ExperimentConfig& config);

struct AssertionResult {
    std::string name;
    double measured = 0.0;
    double lo = 0.0, hi = 0.0;
    bool pass = false;
    std::string detail;
};

struct RunManifest {
    std::string kind;
    std::string config_hash;
    std::string tool_version = kToolVersion;
    double wall_seconds = 0.0;
    std::vector<AssertionResult> assertions;
    Json report;  // kept in memory; the serialized manifest carries assertions only
    std::vector<std::string> errors;
    bool ok() const;
};

Json manifest_to_json(const RunManifest& man);

// Generator spec or .json file path; validates on load.
FiniteMMSpace make_space_from_spec(const std::string& spec, bool revalidate = true);

KernelFunction kernel_from_name(const std::string& name);

// Symmetric multiplicative noise d (1 + eta U), U uniform on [-1,1], followed
// by all-pairs shortest-path repair. n is capped at 400 by the repair cost.
FiniteMMSpace perturb_metric(const FiniteMMSpace& space, double eta, std::uint64_t seed);

// "log:a:b:k", "lin:a:b:k", or a comma-separated list.
std::vector<double> parse_time_grid(const std::string& spec);

// Executes one experiment. Configuration errors throw before anything is
// written; execution errors are captured into the manifest and partial
// results are still emitted. When out_dir is set, writes report.json,
// curves.csv + plot.gp, and appends to manifest.jsonl.
RunManifest run(const ExperimentConfig& config);

// Family runner over homogeneous configs; per-run assertions are merged with
// a run<i> prefix and family assertions (rank-correlation co-movement for
// perturbation families) are appended.
RunManifest sweep(const std::vector<ExperimentConfig>& configs, int parallelism = 1);

// Documents every CSV column the tool emits, plus the schema version.
std::string csv_schema_text();

}  // namespace ricci
