#pragma once

// Optimal transport: exact solver on dense bipartite costs, entropic solver
// with marginal rounding, coupling bounds on cones, and dual lower bounds.

#include <vector>

#include "riccilab/geometry.hpp"
#include "riccilab/mmspace.hpp"

namespace ricci {

struct CouplingEntry {
    int i = 0;
    int j = 0;
    double w = 0.0;
};

struct Coupling {
    int rows = 0;
    int cols = 0;
    std::vector<CouplingEntry> entries;

    std::vector<double> row_marginal() const;
    std::vector<double> col_marginal() const;
    double cost(const std::vector<double>& c) const;  // c row-major, rows x cols
};

struct OTResult {
    double cost = 0.0;
    Coupling plan;
    std::vector<double> u, v;  // dual potentials, u_i + v_j <= c_ij
    double duality_gap = 0.0;
    int pivots = 0;
    bool converged = false;
};

// Minimize sum c_ij pi_ij over couplings of (supply, demand). Zero-mass rows
// and columns are dropped internally; demand is rescaled to match the supply
// total exactly. Throws if the pivot cap is hit.
OTResult exact_ot(const std::vector<double>& cost, int ns, int nt, std::vector<double> supply,
                  std::vector<double> demand);

struct WpOptions {
    double prune_rel = 1e-15;  // drop support weights below prune_rel * max weight
};

// W_p distance (not the p-th power). Supports with a single point short-cut
// to the forced coupling.
double wp_distance(const MetricView& view, const ProbMeasure& mu, const ProbMeasure& nu, double p,
                   const WpOptions& opts = {});
double w1(const FiniteMMSpace& space, const ProbMeasure& mu, const ProbMeasure& nu);
double w2(const FiniteMMSpace& space, const ProbMeasure& mu, const ProbMeasure& nu);

struct SinkhornOptions {
    double tol = 1e-8;  // L1 marginal error of the unrounded plan
    int max_iter = 5000;
};

struct SinkhornResult {
    double raw_cost = 0.0;      // cost of the entropic plan, marginals only approximate
    double rounded_cost = 0.0;  // plan rounded to exact marginals; >= the exact optimum
    double marginal_error = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> f, g;  // potentials, plan_ij = exp((f_i+g_j-c_ij)/eps) mu_i nu_j
};

// Log-domain entropic transport. epsilon = +infinity yields the product
// coupling. mu, nu must be strictly positive (prune beforehand).
SinkhornResult sinkhorn(const std::vector<double>& cost, int ns, int nt,
                        const std::vector<double>& mu, const std::vector<double>& nu,
                        double epsilon, const SinkhornOptions& opts = {});

// Squared-distance cost of the independent coupling mu (x) nu on a flat cone,
// evaluated through the factorization
//   E d^2 = E r^2 + E s^2 - 2 sum_{x,y} S_mu(x) S_nu(y) cos(d_X(x,y) ^ pi),
// S(x) = sum over layers of w_(l,x) r_l. Upper bounds W2^2.
double product_coupling_cost(const ConeSpace& cone, const ProbMeasure& mu, const ProbMeasure& nu);

// Largest |phi(i)-phi(j)| / d(i,j) over point pairs. Exhaustive when
// n^2 <= max_pairs, otherwise seeded random pairs (max_pairs of them).
double verify_lipschitz(const MetricView& view, const std::vector<double>& phi,
                        long long max_pairs = 4000000, std::uint64_t seed = 2026);

struct KRBound {
    double value = 0.0;          // lower bound on W1(mu, nu)
    double lip_measured = 0.0;   // measured constant of phi
    double lip_normalizer = 0.0; // the constant actually divided by
};

// Kantorovich-Rubinstein lower bound (sum phi dmu - sum phi dnu) / L with
// L = max(lip_claimed, measured constant), so the bound stays valid even if
// the claim is off.
KRBound kr_dual_bound(const MetricView& view, const ProbMeasure& mu, const ProbMeasure& nu,
                      const std::vector<double>& phi, double lip_claimed,
                      long long max_pairs = 4000000);

// Radial projection test function on a flat cone: phi(s,y) = s cos(d_X(x0,y)^pi),
// phi(vertex) = 0. 1-Lipschitz for the cone metric.
std::vector<double> cone_dual_function(const ConeSpace& cone, int x0_base);

// W_p between two discrete distributions on the line, by merging quantile
// functions. Weights are normalized internally.
double wasserstein_1d(const std::vector<double>& x, const std::vector<double>& wx,
                      const std::vector<double>& y, const std::vector<double>& wy, double p = 2.0);

}  // namespace ricci
