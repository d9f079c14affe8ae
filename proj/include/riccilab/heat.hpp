#pragma once

// Markov generators on metric measure spaces and the associated heat flows
// acting on measures. Convention throughout: functions evolve by du/dt = Lu,
// measures by the adjoint flow, and L has zero row sums with detailed balance
// against the reference masses.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "riccilab/geometry.hpp"
#include "riccilab/mmspace.hpp"

namespace ricci {

// The generator is stored through its mass-symmetrization
//   B = M^(1/2) L M^(-1/2),
// which is symmetric negative semidefinite; L = M^(-1/2) B M^(1/2).
struct HeatModel {
    int n = 0;
    std::string kind;  // "graph" or "sturm"
    double eps = 0.0;  // kernel bandwidth for graph models
    std::vector<double> mass;
    bool sparse = false;
    Eigen::MatrixXd B;
    Eigen::SparseMatrix<double> Bs;

    struct Spectral {
        Eigen::VectorXd lam;
        Eigen::MatrixXd V;
    };
    mutable std::shared_ptr<const Spectral> spectral;  // dense path cache
};

struct GraphGeneratorOptions {
    double eps = 0.0;             // 0 = (mean nearest-neighbor distance)^2
    double kernel_cutoff = 1e-12; // sparse path drops kernel ratios below this
    int dense_limit = 2000;
    bool require_connected = true;
};

// Gaussian-kernel generator with the symmetric degree normalization
//   K_ij = exp(-d_ij^2 / (4 eps)),  q_i = sum_j K_ij m_j,  A = K / (q_i q_j),
//   d_i = sum_j A_ij m_j,           L_ij = A_ij m_j / (eps sqrt(d_i d_j)),
// diagonal set so rows sum to zero. Detailed balance against m is exact.
HeatModel build_generator_graph(const MetricView& view, const GraphGeneratorOptions& opts = {});
HeatModel build_generator_graph(const FiniteMMSpace& space, const GraphGeneratorOptions& opts = {});

// Finite-volume generator of (1/w) d/dr (w du/dr) on a radial grid, nodes at
// cell midpoints, reflecting at both ends (no flux where w vanishes).
HeatModel build_generator_sturm(const std::function<double(double)>& weight,
                                const RadialGrid& grid);

struct FlowOptions {
    int lanczos_cap = 600;
    double lanczos_tol = 1e-11;
    bool clamp_negative = true;  // clip tiny negative masses and renormalize
};

// Evolve a measure for each time in ts (one Krylov basis per start vector on
// the sparse path, shared across times; dense path uses the cached spectrum).
std::vector<ProbMeasure> heat_measure(const HeatModel& model, const ProbMeasure& mu0,
                                      const std::vector<double>& ts, const FlowOptions& opts = {});
ProbMeasure heat_measure(const HeatModel& model, const ProbMeasure& mu0, double t,
                         const FlowOptions& opts = {});

// B applied to a vector; tests use this for row-sum and balance checks.
std::vector<double> apply_B(const HeatModel& model, const std::vector<double>& x);

// Eigenvalues of B (equivalently of L), dense models only.
std::vector<double> dense_spectrum(const HeatModel& model);

double mean_nn_distance(const MetricView& view);

// Law of the radial process with generator d^2/ds^2 + (N/s) d/ds started at
// the node nearest r0, at each requested time.
struct RadialLaw {
    double N = 0.0;
    double r0 = 0.0;
    RadialGrid grid;
    std::vector<double> node_r;
    std::vector<double> t;
    std::vector<std::vector<double>> nu;  // per time: mass per cell
    std::vector<double> first_moment;
    std::vector<double> second_moment;
    std::vector<double> boundary_mass;  // mass sitting in the outermost cell
};

RadialLaw bessel_radial_law(double N, double r0, const std::vector<double>& ts,
                            const RadialGrid& grid, const FlowOptions& opts = {});

struct VertexHeatOptions {
    double subcell = 0.0;     // 0 = auto from the smallest time
    int max_fine_cells = 20000;
    FlowOptions flow;
};

// Heat flow of the vertex Dirac on a cone: the radial law is computed on a
// refinement of the cone's radial grid (so aggregation onto cone cells is
// exact) and spread over fibers proportionally to the base masses.
std::vector<ProbMeasure> vertex_heat_measure(const ConeSpace& cone, const std::vector<double>& ts,
                                             const VertexHeatOptions& opts = {});
ProbMeasure vertex_heat_measure(const ConeSpace& cone, double t,
                                const VertexHeatOptions& opts = {});

// Point the spectral disk cache at a directory ("" disables it). Dense
// eigendecompositions are stored keyed by a hash of the generator.
void set_spectral_cache_dir(const std::string& dir);

}  // namespace ricci
