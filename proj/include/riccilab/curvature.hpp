#pragma once

// Short-time curvature estimators from heat-flow contraction, contraction and
// variance checks, and the flat-cone vertex dichotomy.

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "riccilab/geometry.hpp"
#include "riccilab/heat.hpp"
#include "riccilab/mmspace.hpp"
#include "riccilab/transport.hpp"

namespace ricci {

struct ThetaOptions {
    double finite_rms_tol = 0.05;      // gate: fit rms <= tol * max(1, |theta|)
    double v_cap = 100.0;              // |v| beyond this is never "finite"
    double divergent_slope_tol = 0.1;  // gate: log-log slope of v within -0.5 +- tol
    WpOptions wp;
    FlowOptions flow;
};

struct ThetaEstimate {
    enum class Kind { finite, divergent, inconclusive };
    int x = 0, y = 0;
    double d = 0.0;
    std::vector<double> t, w2, v;  // v(t) = -log(W2/d) / t
    double theta = 0.0;            // intercept of the linear fit v = theta + beta t
    double beta = 0.0;
    double rms = 0.0;
    double v_slope = 0.0;           // log-log slope of v (set when all v > 0)
    double defect_exponent = 0.0;   // log-log slope of d^2 - W2^2 (when positive)
    Kind kind = Kind::inconclusive;
};

// Contraction-rate estimate for one pair: evolve both Diracs, take exact W2 at
// each time, extrapolate the rate to t=0. A sqrt(t) defect shows up as
// v ~ t^(-1/2) and is classified divergent.
ThetaEstimate theta_plus_estimate(const HeatModel& model, const MetricView& view, int x, int y,
                                  const std::vector<double>& ts, const ThetaOptions& opts = {});

struct ThetaStarOptions {
    int max_pairs = 12;           // pair budget inside the ball
    double min_separation = 0.0;  // 0 = radius / 4
    std::uint64_t seed = 7;
    ThetaOptions theta;
};

struct ThetaStarEstimate {
    double value = 0.0;  // max theta over finite pairs
    bool divergent = false;
    int finite_pairs = 0, divergent_pairs = 0, inconclusive_pairs = 0;
    std::vector<ThetaEstimate> details;
};

// Local supremum: theta_plus over sampled pairs inside the ball around x.
// Flows are computed once per endpoint.
ThetaStarEstimate theta_star_estimate(const HeatModel& model, const MetricView& view, int x,
                                      double radius, const std::vector<double>& ts,
                                      const ThetaStarOptions& opts = {});

struct ContractionReport {
    double K = 0.0;
    std::vector<std::pair<int, int>> pairs;
    std::vector<double> t;
    std::vector<std::vector<double>> ratio;  // [pair][time] W2 / (e^{-Kt} d)
    double worst_ratio = 0.0;
};

ContractionReport contraction_check(const HeatModel& model, const MetricView& view, double K,
                                    const std::vector<std::pair<int, int>>& pairs,
                                    const std::vector<double>& ts, const WpOptions& wp = {},
                                    const FlowOptions& flow = {});

struct VarianceBoundReport {
    int x = 0;
    double N = 0.0;
    std::vector<double> t, spread_sq, bound, ratio;  // spread_sq = sum_i nu_i d(i,x)^2
    double worst_ratio = 0.0;
};

// W2(flow of a Dirac, the Dirac)^2 against the dimension bound 2 N t; the
// squared distance to a Dirac is the forced coupling, so this side is exact.
VarianceBoundReport variance_bound_check(const HeatModel& model, const MetricView& view, int x,
                                         double N, const std::vector<double>& ts,
                                         const FlowOptions& flow = {});

enum class DichotomyCase { distance_preserving, sqrt_defect, inconclusive };

struct DichotomyOptions {
    double eps = 0.0;             // graph bandwidth; 0 = eps_mult * (fiber spacing)^2
    double eps_mult = 1.5;
    double radial_h = 0.0;        // grid recipe: cell height, 0 = fiber spacing / 3
    double width = 0.0;           // grid recipe: reach past r0, 0 = auto from eps and t
    double exponent_lo = 0.45, exponent_hi = 0.55;
    double coeff_rel_tol = 0.20;  // |a_est/a - 1| gate for the sqrt-defect branch
    double g_rms_tol = 2e-3;      // through-origin fit residual, relative to d
    double g_max_tol = 0.15;      // raw |g - d| cap, relative to d
    double w2_tol = 5e-2;         // upper-bound certificate: cost <= d^2 (1 + tol)
    double a_tol_floor = 1e-8;
    bool half_resolution = true;  // embed a coarsened rerun and require agreement
    FlowOptions flow;
};

struct DichotomyReport {
    DichotomyCase outcome = DichotomyCase::inconclusive;
    int x0 = 0;          // base point of the marked fiber
    double d = 0.0;      // realized distance from the marked node to the vertex
    double a = 0.0;      // cosine potential of the base at x0
    double a_tol = 0.0;  // resolution uncertainty of a, from base subsampling
    double a_est = 0.0;  // defect amplitude: intercept of D_up/(2 d c_t) against sqrt(t)
    double exponent = 0.0, exponent_r2 = 0.0;
    std::vector<double> t;
    std::vector<double> d_up;   // d^2 - product_coupling_cost(nu_x, nu_o)
    std::vector<double> g;      // dual lower bound on W1(nu_x, nu_o)
    std::vector<double> c_t;    // first radial moment of the vertex law
    std::vector<double> ex_r2;  // second radial moment of the marked-point flow
    std::vector<double> eo_s2;  // second radial moment of the vertex law
    double g_slope = 0.0, g_rms = 0.0, g_max = 0.0;
    bool w2_certified = false;
    double w2_margin = 0.0;  // max over t of bound / d^2 - 1
    std::string w2_method;
    double eps = 0.0;
    int cone_points = 0;
    double flow_edge_mass = 0.0;  // worst outermost-layer mass of the graph flow
    std::vector<std::string> warnings;
    bool half_resolution_ran = false;
    bool half_resolution_agrees = true;
    std::shared_ptr<DichotomyReport> half;
};

// Radial grid sized for the dichotomy run: cell height about a third of the
// fiber spacing at r0, refined near the vertex so that the aggregated vertex
// law keeps an accurate first moment, and extended past r0 far enough that
// boundary truncation is below the observables' noise floor.
RadialGrid dichotomy_grid(const FiniteMMSpace& base, double N, double r0,
                          const std::vector<double>& t_grid, const DichotomyOptions& opts = {});

// Decide between the two vertex behaviors of the flat cone: either transport
// from the marked point p0 = (r0, x0) to the evolving vertex measure keeps the
// full distance up to O(t) (tested through the dual lower bound g), or it
// shows a sqrt(t) defect with amplitude 2 a d c_N. The vertex flow is the
// radial law pushed onto the cone; the marked-point flow is a kernel graph
// flow on the cone's point set. Both bound curves are published.
DichotomyReport cone_dichotomy(const ConeSpace& cone, int x0_base, double r0,
                               const std::vector<double>& t_grid,
                               const DichotomyOptions& opts = {});

struct SandwichReport {
    std::vector<double> t, lower_g, w2_exact, upper_product;  // upper = sqrt(product cost)
    double worst_violation = 0.0;  // max over t of max(g - W2, W2 - upper)
    double lip_measured = 0.0;
    bool ok = false;
};

// On a cone small enough for exact OT, check dual lower bound <= exact W2 <=
// product-coupling upper bound at every time, all three routes independent.
SandwichReport sandwich_check(const ConeSpace& cone, int x0_base, double r0,
                              const std::vector<double>& ts, double graph_eps = 0.0,
                              const FlowOptions& flow = {});

}  // namespace ricci
