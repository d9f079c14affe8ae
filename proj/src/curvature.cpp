#include "riccilab/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

#include "riccilab/functionals.hpp"

namespace ricci {

namespace {

void check_times(const std::vector<double>& ts, std::size_t min_count, const char* who) {
    require(ts.size() >= min_count,
            std::string(who) + ": need at least " + std::to_string(min_count) + " times");
    double prev = 0.0;
    for (double t : ts)
        require(t > prev, std::string(who) + ": times must be positive and strictly increasing"),
            prev = t;
}

ThetaEstimate theta_from_flows(const MetricView& view, int x, int y, const std::vector<double>& ts,
                               const std::vector<ProbMeasure>& fx,
                               const std::vector<ProbMeasure>& fy, const ThetaOptions& opts) {
    ThetaEstimate est;
    est.x = x;
    est.y = y;
    est.d = view.dist(x, y);
    require(est.d > 0.0, "theta estimate: coincident points");
    est.t = ts;
    est.w2.resize(ts.size());
    est.v.resize(ts.size());
    bool v_pos = true, defect_pos = true;
    std::vector<double> defect(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        double w2 = wp_distance(view, fx[i], fy[i], 2.0, opts.wp);
        if (!(w2 > est.d * 1e-12)) {
            std::ostringstream msg;
            msg << "theta estimate: W2 underflow at t=" << ts[i] << " (W2=" << w2 << ", d=" << est.d
                << "); the pair is too close for the model bandwidth, increase the separation "
                   "or shrink the smallest time";
            throw std::runtime_error(msg.str());
        }
        est.w2[i] = w2;
        est.v[i] = -std::log(w2 / est.d) / ts[i];
        if (!(est.v[i] > 0.0)) v_pos = false;
        defect[i] = est.d * est.d - w2 * w2;
        if (!(defect[i] > 0.0)) defect_pos = false;
    }

    LinearFit lf = fit_line(ts, est.v);
    est.theta = lf.intercept;
    est.beta = lf.slope;
    est.rms = lf.rms_residual;
    if (v_pos) est.v_slope = fit_power_law(ts, est.v).slope;
    if (defect_pos) est.defect_exponent = fit_power_law(ts, defect).slope;

    double v_max = 0.0;
    for (double v : est.v) v_max = std::max(v_max, std::abs(v));
    // a linear-in-t rate extrapolates cleanly; a sqrt(t) blow-up never fits a
    // line well over a log-spaced decade, so the order below is safe
    if (v_max <= opts.v_cap && est.rms <= opts.finite_rms_tol * std::max(1.0, std::abs(est.theta)))
        est.kind = ThetaEstimate::Kind::finite;
    else if (v_pos && std::abs(est.v_slope + 0.5) <= opts.divergent_slope_tol)
        est.kind = ThetaEstimate::Kind::divergent;
    else
        est.kind = ThetaEstimate::Kind::inconclusive;
    return est;
}

}  // namespace

ThetaEstimate theta_plus_estimate(const HeatModel& model, const MetricView& view, int x, int y,
                                  const std::vector<double>& ts, const ThetaOptions& opts) {
    require(x >= 0 && x < model.n && y >= 0 && y < model.n,
            "theta_plus_estimate: point out of range");
    require(x != y, "theta_plus_estimate: x == y");
    check_times(ts, 6, "theta_plus_estimate");
    auto fx = heat_measure(model, dirac(model.n, x), ts, opts.flow);
    auto fy = heat_measure(model, dirac(model.n, y), ts, opts.flow);
    return theta_from_flows(view, x, y, ts, fx, fy, opts);
}

ThetaStarEstimate theta_star_estimate(const HeatModel& model, const MetricView& view, int x,
                                      double radius, const std::vector<double>& ts,
                                      const ThetaStarOptions& opts) {
    require(x >= 0 && x < view.n, "theta_star_estimate: center out of range");
    require(radius > 0.0, "theta_star_estimate: radius > 0");
    require(opts.max_pairs >= 1, "theta_star_estimate: max_pairs >= 1");
    check_times(ts, 6, "theta_star_estimate");

    std::vector<int> ball;
    for (int i = 0; i < view.n; ++i)
        if (i == x || view.dist(x, i) <= radius) ball.push_back(i);
    require(ball.size() >= 3,
            "theta_star_estimate: ball must contain at least 2 points besides the center");

    double min_sep = opts.min_separation > 0.0 ? opts.min_separation : radius / 4.0;
    std::vector<std::pair<int, int>> cand;
    for (std::size_t a = 0; a < ball.size(); ++a)
        for (std::size_t b = a + 1; b < ball.size(); ++b)
            if (view.dist(ball[a], ball[b]) >= min_sep) cand.emplace_back(ball[a], ball[b]);
    require(!cand.empty(), "theta_star_estimate: no pair clears the separation floor");

    std::mt19937_64 rng(mix_seed(opts.seed, 0x7a57));
    std::shuffle(cand.begin(), cand.end(), rng);
    if (static_cast<int>(cand.size()) > opts.max_pairs) cand.resize(opts.max_pairs);
    std::sort(cand.begin(), cand.end());

    std::map<int, std::vector<ProbMeasure>> flow_of;
    auto flows = [&](int p) -> const std::vector<ProbMeasure>& {
        auto it = flow_of.find(p);
        if (it == flow_of.end())
            it = flow_of.emplace(p, heat_measure(model, dirac(model.n, p), ts, opts.theta.flow))
                     .first;
        return it->second;
    };

    ThetaStarEstimate out;
    out.value = -std::numeric_limits<double>::infinity();
    for (const auto& [p, q] : cand) {
        ThetaEstimate est = theta_from_flows(view, p, q, ts, flows(p), flows(q), opts.theta);
        switch (est.kind) {
            case ThetaEstimate::Kind::finite:
                ++out.finite_pairs;
                out.value = std::max(out.value, est.theta);
                break;
            case ThetaEstimate::Kind::divergent:
                ++out.divergent_pairs;
                out.divergent = true;
                break;
            default:
                ++out.inconclusive_pairs;
                break;
        }
        out.details.push_back(std::move(est));
    }
    if (out.finite_pairs == 0) out.value = std::numeric_limits<double>::quiet_NaN();
    return out;
}

ContractionReport contraction_check(const HeatModel& model, const MetricView& view, double K,
                                    const std::vector<std::pair<int, int>>& pairs,
                                    const std::vector<double>& ts, const WpOptions& wp,
                                    const FlowOptions& flow) {
    require(!pairs.empty(), "contraction_check: no pairs");
    require(!ts.empty(), "contraction_check: no times");
    for (double t : ts) require(t >= 0.0, "contraction_check: times must be nonnegative");

    ContractionReport rep;
    rep.K = K;
    rep.pairs = pairs;
    rep.t = ts;
    rep.ratio.assign(pairs.size(), std::vector<double>(ts.size(), 0.0));

    std::map<int, std::vector<ProbMeasure>> flow_of;
    auto flows = [&](int p) -> const std::vector<ProbMeasure>& {
        auto it = flow_of.find(p);
        if (it == flow_of.end())
            it = flow_of.emplace(p, heat_measure(model, dirac(model.n, p), ts, flow)).first;
        return it->second;
    };

    for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
        auto [x, y] = pairs[pi];
        require(x >= 0 && x < model.n && y >= 0 && y < model.n && x != y,
                "contraction_check: bad pair");
        double d = view.dist(x, y);
        require(d > 0.0, "contraction_check: coincident pair");
        for (std::size_t q = 0; q < ts.size(); ++q) {
            double w2 = wp_distance(view, flows(x)[q], flows(y)[q], 2.0, wp);
            double r = w2 / (std::exp(-K * ts[q]) * d);
            rep.ratio[pi][q] = r;
            rep.worst_ratio = std::max(rep.worst_ratio, r);
        }
    }
    return rep;
}

VarianceBoundReport variance_bound_check(const HeatModel& model, const MetricView& view, int x,
                                         double N, const std::vector<double>& ts,
                                         const FlowOptions& flow) {
    require(x >= 0 && x < model.n, "variance_bound_check: point out of range");
    require(N >= 1.0, "variance_bound_check: N >= 1");
    check_times(ts, 1, "variance_bound_check");

    auto flows = heat_measure(model, dirac(model.n, x), ts, flow);
    VarianceBoundReport rep;
    rep.x = x;
    rep.N = N;
    rep.t = ts;
    for (std::size_t q = 0; q < ts.size(); ++q) {
        double spread = 0.0;
        for (int i = 0; i < model.n; ++i) {
            double di = view.dist(i, x);
            spread += flows[q].w[i] * di * di;
        }
        double bound = 2.0 * N * ts[q];
        rep.spread_sq.push_back(spread);
        rep.bound.push_back(bound);
        rep.ratio.push_back(spread / bound);
        rep.worst_ratio = std::max(rep.worst_ratio, spread / bound);
    }
    return rep;
}

RadialGrid dichotomy_grid(const FiniteMMSpace& base, double N, double r0,
                          const std::vector<double>& t_grid, const DichotomyOptions& opts) {
    require(base.n >= 2, "dichotomy_grid: base too small");
    require(N >= 1.0, "dichotomy_grid: N >= 1");
    require(r0 > 0.0, "dichotomy_grid: r0 > 0");
    check_times(t_grid, 1, "dichotomy_grid");

    double fiber = r0 * mean_nn_distance(view_of(base));
    double h = opts.radial_h > 0.0 ? opts.radial_h : fiber / 3.0;
    double eps = opts.eps > 0.0 ? opts.eps : opts.eps_mult * fiber * fiber;
    double t_lo = t_grid.front(), t_hi = t_grid.back();
    double sig_hi = std::sqrt(2.0 * (N + 1.0) * t_hi);
    double sig_lo = std::sqrt(2.0 * (N + 1.0) * t_lo);
    double W = opts.width > 0.0 ? opts.width : std::max(10.0 * sig_hi, 6.0 * std::sqrt(eps + t_hi));
    double R = r0 + W;

    // geometric head so the aggregated vertex law keeps its first moment
    std::vector<double> edges{0.0};
    double e = 0.0, step = std::min(h, sig_lo / 8.0);
    while (step < h * (1.0 - 1e-12) && e + step < 0.9 * R) {
        e += step;
        edges.push_back(e);
        step = std::min(step * 1.3, h);
    }
    int k = std::max(edges.size() > 1 ? 1 : 2, static_cast<int>(std::ceil((R - e) / h)));
    double hu = (R - e) / k;
    for (int i = 1; i <= k; ++i) edges.push_back(e + hu * i);
    edges.back() = R;
    return custom_grid(std::move(edges));
}

namespace {

// cos potential of the base at x0 over the even or odd index subsample; the
// spread of these against the full value estimates the quadrature error of a
double subset_potential(const FiniteMMSpace& base, int x0, int parity) {
    double num = 0.0, den = 0.0;
    for (int y = parity; y < base.n; y += 2) {
        num += base.mass[y] * std::cos(std::min(base.d(x0, y), kPi));
        den += base.mass[y];
    }
    return den > 0.0 ? num / den : 0.0;
}

DichotomyReport dichotomy_single(const ConeSpace& cone, int x0_base, double r0,
                                 const std::vector<double>& ts, const DichotomyOptions& opts) {
    DichotomyReport rep;
    rep.x0 = x0_base;
    rep.t = ts;
    rep.cone_points = cone.n_points();

    int l0 = 0;
    for (int l = 1; l < cone.layers(); ++l)
        if (std::abs(cone.node_r[l] - r0) < std::abs(cone.node_r[l0] - r0)) l0 = l;
    const int p0 = cone.index_of(l0, x0_base);
    const double d = cone.node_r[l0];
    rep.d = d;
    require(d > 0.0, "cone_dichotomy: marked node sits at the vertex");

    double fiber = d * mean_nn_distance(view_of(cone.base));
    rep.eps = opts.eps > 0.0 ? opts.eps : opts.eps_mult * fiber * fiber;

    MetricView view = cone.metric_view();
    GraphGeneratorOptions gopt;
    gopt.eps = rep.eps;
    HeatModel model = build_generator_graph(view, gopt);
    std::vector<ProbMeasure> nu_x = heat_measure(model, dirac(model.n, p0), ts, opts.flow);

    VertexHeatOptions vopt;
    vopt.flow = opts.flow;
    std::vector<ProbMeasure> nu_o = vertex_heat_measure(cone, ts, vopt);

    rep.a = cos_potential(cone.base, x0_base);
    double dev = std::max(std::abs(rep.a - subset_potential(cone.base, x0_base, 0)),
                          std::abs(rep.a - subset_potential(cone.base, x0_base, 1)));
    rep.a_tol = std::max(3.0 * dev, opts.a_tol_floor);

    std::vector<double> phi = cone_dual_function(cone, x0_base);
    double lip = std::max(1.0, verify_lipschitz(view, phi));

    const std::size_t nt = ts.size();
    const double dd = d * d;
    rep.d_up.resize(nt);
    rep.g.resize(nt);
    rep.c_t.resize(nt);
    rep.ex_r2.resize(nt);
    rep.eo_s2.resize(nt);
    const int last_layer = cone.layers() - 1;
    double worst_bound = 0.0;
    for (std::size_t q = 0; q < nt; ++q) {
        double pcc = product_coupling_cost(cone, nu_x[q], nu_o[q]);
        rep.d_up[q] = dd - pcc;

        double ex2 = 0.0, c1 = 0.0, s2 = 0.0, gx = 0.0, go = 0.0;
        for (int p = 0; p < cone.n_points(); ++p) {
            double r = cone.radius_of(p);
            ex2 += nu_x[q].w[p] * r * r;
            c1 += nu_o[q].w[p] * r;
            s2 += nu_o[q].w[p] * r * r;
            gx += nu_x[q].w[p] * phi[p];
            go += nu_o[q].w[p] * phi[p];
        }
        rep.ex_r2[q] = ex2;
        rep.c_t[q] = c1;
        rep.eo_s2[q] = s2;
        rep.g[q] = (gx - go) / lip;

        double edge = 0.0;
        for (int b = 0; b < cone.nb(); ++b) edge += nu_x[q].w[cone.index_of(last_layer, b)];
        rep.flow_edge_mass = std::max(rep.flow_edge_mass, edge);

        double tri = std::sqrt(ex2) + std::sqrt(s2);
        double bound = std::min(pcc, tri * tri);
        if (bound / dd >= worst_bound) {
            worst_bound = bound / dd;
            rep.w2_method = pcc <= tri * tri ? "product-coupling" : "moment-triangle";
        }
    }
    rep.w2_margin = worst_bound - 1.0;
    rep.w2_certified = rep.w2_margin <= opts.w2_tol;
    if (!rep.w2_certified)
        rep.warnings.push_back("no coupling bound certifies W2 <= d within tolerance");

    // through-origin fit of g - d against t (the distance-preserving signature)
    double stt = 0.0, stg = 0.0;
    for (std::size_t q = 0; q < nt; ++q) {
        stt += ts[q] * ts[q];
        stg += ts[q] * (rep.g[q] - d);
    }
    rep.g_slope = stg / stt;
    double ss = 0.0;
    for (std::size_t q = 0; q < nt; ++q) {
        double resid = rep.g[q] - d - rep.g_slope * ts[q];
        ss += resid * resid;
        rep.g_max = std::max(rep.g_max, std::abs(rep.g[q] - d));
    }
    rep.g_rms = std::sqrt(ss / static_cast<double>(nt));

    for (std::size_t q = 0; q < nt; ++q)
        if (rep.g[q] > d * (1.0 + 1e-3)) {
            rep.warnings.push_back("dual lower bound exceeds the vertex distance "
                                   "(discretization failure)");
            break;
        }
    const bool pre_clean = rep.warnings.empty();

    bool dup_pos = true;
    double dup_min = std::numeric_limits<double>::infinity();
    for (double v : rep.d_up) {
        dup_pos = dup_pos && v > 0.0;
        dup_min = std::min(dup_min, v);
    }
    if (dup_pos) {
        LinearFit pf = fit_power_law(ts, rep.d_up);
        rep.exponent = pf.slope;
        rep.exponent_r2 = pf.r_squared;
        // D_up / (2 d c_t) = a + O(sqrt(t)); the intercept in sqrt(t) strips
        // the subleading term instead of folding it into the amplitude
        std::vector<double> sq(nt), yy(nt);
        for (std::size_t q = 0; q < nt; ++q) {
            sq[q] = std::sqrt(ts[q]);
            yy[q] = rep.d_up[q] / (2.0 * d * rep.c_t[q]);
        }
        rep.a_est = fit_line(sq, yy).intercept;
    }

    if (rep.a <= rep.a_tol) {
        bool fit_ok = rep.g_rms <= opts.g_rms_tol * d && rep.g_max <= opts.g_max_tol * d;
        if (!fit_ok)
            rep.warnings.push_back("g(t) does not track the distance linearly in t");
        rep.outcome = fit_ok && pre_clean ? DichotomyCase::distance_preserving
                                          : DichotomyCase::inconclusive;
    } else {
        if (!dup_pos && dup_min < -1e-3 * dd)
            rep.warnings.push_back("negative defect beyond tolerance (discretization failure)");
        bool expo_ok = dup_pos && rep.exponent >= opts.exponent_lo &&
                       rep.exponent <= opts.exponent_hi;
        bool coeff_ok = dup_pos && std::abs(rep.a_est - rep.a) <= opts.coeff_rel_tol * rep.a;
        if (dup_pos && !expo_ok)
            rep.warnings.push_back("defect exponent outside the sqrt window");
        if (dup_pos && !coeff_ok)
            rep.warnings.push_back("defect amplitude off the predicted 2 a d c sqrt(t)");
        rep.outcome = dup_pos && expo_ok && coeff_ok && pre_clean
                          ? DichotomyCase::sqrt_defect
                          : DichotomyCase::inconclusive;
    }
    return rep;
}

}  // namespace

DichotomyReport cone_dichotomy(const ConeSpace& cone, int x0_base, double r0,
                               const std::vector<double>& t_grid, const DichotomyOptions& opts) {
    require(cone.K == 0.0, "cone_dichotomy: flat cone required");
    require(x0_base >= 0 && x0_base < cone.nb(), "cone_dichotomy: x0 out of range");
    require(r0 > 0.0 && r0 < cone.max_radius(), "cone_dichotomy: r0 must lie inside the grid");
    check_times(t_grid, 4, "cone_dichotomy");

    DichotomyReport rep = dichotomy_single(cone, x0_base, r0, t_grid, opts);

    if (opts.half_resolution && cone.base.n >= 8) {
        FiniteMMSpace base_half = make_half_resolution(cone.base);
        DichotomyOptions oh = opts;
        oh.half_resolution = false;
        oh.eps = 0.0;  // re-derive bandwidth and grid from the coarser fibers
        oh.radial_h = 0.0;
        oh.width = 0.0;
        RadialGrid gh = dichotomy_grid(base_half, cone.N, r0, t_grid, oh);
        ConeSpace cone_half = build_cone(base_half, 0.0, cone.N, gh);
        DichotomyReport half = dichotomy_single(cone_half, x0_base / 2, r0, t_grid, oh);
        rep.half_resolution_ran = true;
        rep.half_resolution_agrees = half.outcome == rep.outcome;
        rep.half = std::make_shared<DichotomyReport>(std::move(half));
        if (!rep.half_resolution_agrees) {
            rep.outcome = DichotomyCase::inconclusive;
            rep.warnings.push_back("half-resolution rerun disagrees; downgraded to inconclusive");
        }
    }
    return rep;
}

SandwichReport sandwich_check(const ConeSpace& cone, int x0_base, double r0,
                              const std::vector<double>& ts, double graph_eps,
                              const FlowOptions& flow) {
    require(cone.K == 0.0, "sandwich_check: flat cone required");
    require(cone.n_points() <= 4000, "sandwich_check: cone too large for exact transport");
    require(x0_base >= 0 && x0_base < cone.nb(), "sandwich_check: x0 out of range");
    check_times(ts, 1, "sandwich_check");

    int l0 = 0;
    for (int l = 1; l < cone.layers(); ++l)
        if (std::abs(cone.node_r[l] - r0) < std::abs(cone.node_r[l0] - r0)) l0 = l;
    const int p0 = cone.index_of(l0, x0_base);
    const double d = cone.node_r[l0];

    MetricView view = cone.metric_view();
    GraphGeneratorOptions gopt;
    gopt.eps = graph_eps;
    HeatModel model = build_generator_graph(view, gopt);
    auto nu_x = heat_measure(model, dirac(model.n, p0), ts, flow);
    VertexHeatOptions vopt;
    vopt.flow = flow;
    auto nu_o = vertex_heat_measure(cone, ts, vopt);
    std::vector<double> phi = cone_dual_function(cone, x0_base);

    SandwichReport rep;
    rep.t = ts;
    for (std::size_t q = 0; q < ts.size(); ++q) {
        KRBound kr = kr_dual_bound(view, nu_x[q], nu_o[q], phi, 1.0);
        rep.lip_measured = std::max(rep.lip_measured, kr.lip_measured);
        double w2 = wp_distance(view, nu_x[q], nu_o[q], 2.0);
        double upper = std::sqrt(product_coupling_cost(cone, nu_x[q], nu_o[q]));
        rep.lower_g.push_back(kr.value);
        rep.w2_exact.push_back(w2);
        rep.upper_product.push_back(upper);
        rep.worst_violation =
            std::max({rep.worst_violation, kr.value - w2, w2 - upper});
    }
    rep.ok = rep.worst_violation <= 1e-7 * std::max(1.0, d);
    return rep;
}

}  // namespace ricci
