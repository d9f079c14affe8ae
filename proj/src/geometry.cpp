#include "riccilab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace ricci {

double s_kappa(double kappa, double theta) {
    if (kappa > 0.0) {
        double rk = std::sqrt(kappa);
        return std::sin(rk * theta) / rk;
    }
    if (kappa < 0.0) {
        double rk = std::sqrt(-kappa);
        return std::sinh(rk * theta) / rk;
    }
    return theta;
}

double c_kappa(double kappa, double theta) {
    if (kappa > 0.0) return std::cos(std::sqrt(kappa) * theta);
    if (kappa < 0.0) return std::cosh(std::sqrt(-kappa) * theta);
    return 1.0;
}

double sigma_coeff(double t, double kappa, double theta) {
    require(t >= 0.0 && t <= 1.0, "sigma_coeff: t in [0,1]");
    require(theta >= 0.0, "sigma_coeff: theta >= 0");
    double kt2 = kappa * theta * theta;
    if (kt2 == 0.0) return t;
    if (kt2 >= kPi * kPi) return std::numeric_limits<double>::infinity();
    return s_kappa(kappa, t * theta) / s_kappa(kappa, theta);
}

double tau_coeff(double t, double K, double N, double theta) {
    require(N > 1.0, "tau_coeff: N > 1");
    double s = sigma_coeff(t, K / (N - 1.0), theta);
    if (std::isinf(s)) return s;
    return std::pow(t, 1.0 / N) * std::pow(s, 1.0 - 1.0 / N);
}

RadialGrid custom_grid(std::vector<double> edges) {
    require(edges.size() >= 3, "radial grid: need at least 2 cells");
    require(edges.front() == 0.0, "radial grid: first edge must be 0");
    for (std::size_t i = 1; i < edges.size(); ++i)
        require(std::isfinite(edges[i]) && edges[i] > edges[i - 1],
                "radial grid: edges must increase");
    RadialGrid g;
    g.edges = std::move(edges);
    return g;
}

RadialGrid linear_grid(int cells, double rmax) {
    require(cells >= 2 && rmax > 0.0, "linear_grid: bad parameters");
    std::vector<double> e(cells + 1);
    for (int i = 0; i <= cells; ++i) e[i] = rmax * i / cells;
    e[0] = 0.0;
    return custom_grid(std::move(e));
}

RadialGrid geometric_grid(int cells, double first, double rmax) {
    require(cells >= 2, "geometric_grid: need >= 2 cells");
    require(first > 0.0 && rmax > first, "geometric_grid: need 0 < first < rmax");
    std::vector<double> e(cells + 1);
    e[0] = 0.0;
    double rho = std::pow(rmax / first, 1.0 / (cells - 1));
    for (int i = 1; i <= cells; ++i) e[i] = first * std::pow(rho, i - 1);
    e[cells] = rmax;
    return custom_grid(std::move(e));
}

RadialGrid parse_grid(const std::string& spec) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ':')) parts.push_back(tok);
    require(!parts.empty(), "parse_grid: empty spec");
    try {
        if (parts[0] == "lin") {
            require(parts.size() == 3, "parse_grid: expected lin:m:R");
            return linear_grid(std::stoi(parts[1]), std::stod(parts[2]));
        }
        if (parts[0] == "geo") {
            require(parts.size() == 4, "parse_grid: expected geo:m:a:b");
            return geometric_grid(std::stoi(parts[1]), std::stod(parts[2]), std::stod(parts[3]));
        }
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::exception&) {
        throw std::invalid_argument("parse_grid: malformed numbers in '" + spec + "'");
    }
    throw std::invalid_argument("parse_grid: unknown grid kind '" + parts[0] + "'");
}

double ConeSpace::radius_of(int idx) const {
    if (idx == 0) return 0.0;
    if (is_far_pole(idx)) return kPi / std::sqrt(K);
    return node_r[(idx - 1) / nb()];
}

int ConeSpace::base_of(int idx) const {
    if (idx == 0 || is_far_pole(idx)) return -1;
    return (idx - 1) % nb();
}

double ConeSpace::max_radius() const { return grid.rmax(); }

double ConeSpace::dist(int i, int j) const {
    if (i == j) return 0.0;
    double r = radius_of(i), s = radius_of(j);
    int bi = base_of(i), bj = base_of(j);
    double cd = (bi < 0 || bj < 0) ? 0.0 : base_cos[static_cast<std::size_t>(bi) * nb() + bj];
    if (K == 0.0) {
        if (bi < 0) return s;
        if (bj < 0) return r;
        double v = r * r + s * s - 2.0 * r * s * cd;
        return std::sqrt(std::max(0.0, v));
    }
    double rk = std::sqrt(K);
    double arg = std::cos(rk * r) * std::cos(rk * s) + std::sin(rk * r) * std::sin(rk * s) * cd;
    return std::acos(std::clamp(arg, -1.0, 1.0)) / rk;
}

FiniteMMSpace ConeSpace::as_finite(long long point_cap) const {
    const int n = n_points();
    require(n <= point_cap, "ConeSpace::as_finite: " + std::to_string(n) +
                                " points exceeds the materialization cap");
    std::vector<double> d(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double v = dist(i, j);
            d[static_cast<std::size_t>(i) * n + j] = v;
            d[static_cast<std::size_t>(j) * n + i] = v;
        }
    FiniteMMSpace s = make_space(n, std::move(d), mass,
                                 (K == 0.0 ? std::string("cone_") : std::string("suspension_")) +
                                     base.name);
    return s;
}

MetricView ConeSpace::metric_view() const {
    MetricView v;
    v.n = n_points();
    v.mass = &mass;
    const ConeSpace* c = this;
    v.dist = [c](int i, int j) { return c->dist(i, j); };
    return v;
}

ConeSpace build_cone(const FiniteMMSpace& base, double K, double N, const RadialGrid& grid) {
    require(base.n >= 1, "build_cone: empty base");
    require(K >= 0.0, "build_cone: K >= 0");
    require(N >= 1.0, "build_cone: N >= 1");
    require(grid.cells() >= 2, "build_cone: need at least 2 radial cells");

    ConeSpace c;
    c.base = base;
    c.K = K;
    c.N = N;
    c.grid = grid;
    c.base_clamped = base.diameter() > kPi + 1e-9;

    if (K > 0.0) {
        double rp = kPi / std::sqrt(K);
        require(grid.rmax() <= rp + 1e-9, "build_cone: grid exceeds pi/sqrt(K)");
        c.has_far_pole = grid.rmax() >= rp - 1e-9;
    }

    const int cells = grid.cells();
    c.radial_cell_mass.resize(cells);
    auto w = [&](double r) { return std::pow(std::max(0.0, s_kappa(K, r)), N); };
    for (int k = 0; k < cells; ++k)
        c.radial_cell_mass[k] = integrate(w, grid.edges[k], grid.edges[k + 1], 1e-12).value;

    int interior = cells - 1 - (c.has_far_pole ? 1 : 0);
    require(interior >= 1, "build_cone: grid leaves no interior layer");
    c.node_r.resize(interior);
    for (int l = 0; l < interior; ++l)
        c.node_r[l] = 0.5 * (grid.edges[l + 1] + grid.edges[l + 2]);

    const int nb = base.n;
    c.base_cos.resize(static_cast<std::size_t>(nb) * nb);
    for (int i = 0; i < nb; ++i)
        for (int j = 0; j < nb; ++j)
            c.base_cos[static_cast<std::size_t>(i) * nb + j] =
                std::cos(std::min(base.d(i, j), kPi));

    const double base_total = base.total_mass();
    c.mass.assign(c.n_points(), 0.0);
    c.mass[0] = c.radial_cell_mass[0] * base_total;
    for (int l = 0; l < interior; ++l)
        for (int x = 0; x < nb; ++x)
            c.mass[c.index_of(l, x)] = c.radial_cell_mass[l + 1] * base.mass[x];
    if (c.has_far_pole) c.mass.back() = c.radial_cell_mass[cells - 1] * base_total;
    double total = std::accumulate(c.mass.begin(), c.mass.end(), 0.0);
    require(total > 0.0, "build_cone: degenerate cone measure");
    for (double& v : c.mass) v /= total;
    return c;
}

ConeSpace suspension(const FiniteMMSpace& base, double N, const RadialGrid& grid) {
    require(grid.rmax() <= kPi + 1e-9, "suspension: grid must lie in [0, pi]");
    return build_cone(base, 1.0, N, grid);
}

ProbMeasure homothety_pushforward(const ConeSpace& cone, const ProbMeasure& mu, double lambda,
                                  double* clipped) {
    require(cone.K == 0.0, "homothety_pushforward: flat cones only");
    require(lambda > 0.0, "homothety_pushforward: lambda > 0");
    require(mu.n() == cone.n_points(), "homothety_pushforward: measure size mismatch");

    const auto& E = cone.grid.edges;
    const int cells = cone.grid.cells();
    const int nb = cone.nb();
    const double base_total = cone.base.total_mass();
    std::vector<double> out(cone.n_points(), 0.0);
    double clipped_mass = 0.0;

    // weight w of source cell c with base index x (x = -1 for the vertex,
    // meaning base mass spread proportionally to m_X)
    auto deposit = [&](int target_cell, double w, int x) {
        if (target_cell == 0) {
            out[0] += w;
            return;
        }
        int layer = target_cell - 1;
        if (x >= 0) {
            out[cone.index_of(layer, x)] += w;
        } else {
            for (int b = 0; b < nb; ++b)
                out[cone.index_of(layer, b)] += w * cone.base.mass[b] / base_total;
        }
    };

    for (int idx = 0; idx < cone.n_points(); ++idx) {
        double w = mu.w[idx];
        if (w == 0.0) continue;
        int cell = (idx == 0) ? 0 : (idx - 1) / nb + 1;
        int x = cone.base_of(idx);
        double a = lambda * E[cell], b = lambda * E[cell + 1];
        double len = b - a;
        // spread [a,b) over the grid by overlap length
        int c0 = static_cast<int>(std::upper_bound(E.begin(), E.end(), a) - E.begin()) - 1;
        c0 = std::clamp(c0, 0, cells - 1);
        double placed = 0.0;
        for (int cc = c0; cc < cells && E[cc] < b; ++cc) {
            double lo = std::max(a, E[cc]);
            double hi = std::min(b, E[cc + 1]);
            if (hi <= lo) continue;
            double frac = (hi - lo) / len;
            deposit(cc, w * frac, x);
            placed += w * frac;
        }
        double rest = w - placed;
        if (rest > 0.0) {
            // image extends past the last edge; park it in the last cell
            deposit(cells - 1, rest, x);
            clipped_mass += rest;
        }
    }
    if (clipped) *clipped = clipped_mass;
    return make_measure(std::move(out));
}

ComparisonProfile bishop_gromov_check(const FiniteMMSpace& space, int x0, double K, double N,
                                      const std::vector<double>& r_grid) {
    require(x0 >= 0 && x0 < space.n, "bishop_gromov_check: x0 out of range");
    require(N >= 1.0, "bishop_gromov_check: N >= 1");
    require(!r_grid.empty(), "bishop_gromov_check: empty r grid");
    for (std::size_t i = 1; i < r_grid.size(); ++i)
        require(r_grid[i] > r_grid[i - 1], "bishop_gromov_check: r grid must increase");
    if (N > 1.0 && K > 0.0)
        require(r_grid.back() <= kPi * std::sqrt((N - 1.0) / K) + 1e-9,
                "bishop_gromov_check: r grid exceeds the model diameter");

    auto model_w = [&](double t) {
        if (N == 1.0) return 1.0;
        return std::pow(std::max(0.0, s_kappa(K / (N - 1.0), t)), N - 1.0);
    };

    ComparisonProfile p;
    p.r = r_grid;
    p.R = r_grid.back();
    const int m = static_cast<int>(r_grid.size());
    p.v.resize(m);
    p.model_volume.resize(m);
    p.model_sphere.resize(m);
    const double total = space.total_mass();

    for (int k = 0; k < m; ++k) {
        double vol = 0.0;
        for (int y = 0; y < space.n; ++y)
            if (space.d(x0, y) <= r_grid[k] + 1e-12) vol += space.mass[y];
        p.v[k] = vol / total;
        if (p.v[k] == 0.0) ++p.empty_balls;
        p.model_volume[k] = integrate(model_w, 0.0, r_grid[k], 1e-12).value;
        p.model_sphere[k] = model_w(r_grid[k]);
    }
    require(p.v.back() > 0.0, "bishop_gromov_check: empty ball at R");
    require(p.model_volume.back() > 0.0, "bishop_gromov_check: degenerate model volume at R");

    p.margin.resize(m);
    p.worst_margin = std::numeric_limits<double>::infinity();
    for (int k = 0; k < m; ++k) {
        p.margin[k] = p.v[k] / p.v.back() - p.model_volume[k] / p.model_volume.back();
        p.worst_margin = std::min(p.worst_margin, p.margin[k]);
        p.max_abs_margin = std::max(p.max_abs_margin, std::abs(p.margin[k]));
    }

    p.shell.assign(m, 0.0);
    for (int k = 0; k < m; ++k) {
        int lo = std::max(0, k - 1), hi = std::min(m - 1, k + 1);
        double dr = p.r[hi] - p.r[lo];
        if (dr > 0.0) p.shell[k] = (p.v[hi] - p.v[lo]) / dr;
    }
    return p;
}

}  // namespace ricci
