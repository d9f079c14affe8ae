#include "riccilab/mmspace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace ricci {

double FiniteMMSpace::total_mass() const {
    return std::accumulate(mass.begin(), mass.end(), 0.0);
}

double FiniteMMSpace::diameter() const {
    double d = 0.0;
    for (double v : dist) d = std::max(d, v);
    return d;
}

FiniteMMSpace make_space(int n, std::vector<double> dist, std::vector<double> mass,
                         std::string name) {
    require(n >= 1, "make_space: need at least one point");
    require(dist.size() == static_cast<std::size_t>(n) * n, "make_space: dist size != n*n");
    require(mass.size() == static_cast<std::size_t>(n), "make_space: mass size != n");
    for (double v : dist)
        require(std::isfinite(v) && v >= 0.0, "make_space: distances must be finite and >= 0");
    for (int i = 0; i < n; ++i) {
        require(dist[static_cast<std::size_t>(i) * n + i] == 0.0, "make_space: nonzero diagonal");
        for (int j = i + 1; j < n; ++j)
            require(dist[static_cast<std::size_t>(i) * n + j] ==
                        dist[static_cast<std::size_t>(j) * n + i],
                    "make_space: asymmetric distance table");
    }
    double total = 0.0;
    for (double v : mass) {
        require(std::isfinite(v) && v >= 0.0, "make_space: masses must be finite and >= 0");
        total += v;
    }
    require(total > 0.0, "make_space: total mass must be positive");
    FiniteMMSpace s;
    s.n = n;
    s.dist = std::move(dist);
    s.mass = std::move(mass);
    s.name = std::move(name);
    return s;
}

namespace {

void record(ValidationReport& rep, bool strict, const std::string& inv, const std::string& detail,
            double magnitude) {
    if (strict) throw std::runtime_error("validate_space: " + inv + ": " + detail);
    // one entry per invariant, keep the worst offender
    for (auto& v : rep.violations) {
        if (v.invariant == inv) {
            if (magnitude > v.magnitude) {
                v.magnitude = magnitude;
                v.detail = detail;
            }
            return;
        }
    }
    rep.violations.push_back({inv, detail, magnitude});
}

}  // namespace

ValidationReport validate_space(const FiniteMMSpace& space, bool strict, std::uint64_t seed) {
    ValidationReport rep;
    const int n = space.n;
    const double scale = std::max(1.0, space.diameter());
    const double tol = 1e-9 * scale;

    if (space.dist.size() != static_cast<std::size_t>(n) * n)
        record(rep, strict, "shape", "dist table is not n*n", 1.0);
    if (space.mass.size() != static_cast<std::size_t>(n))
        record(rep, strict, "shape", "mass vector is not length n", 1.0);
    if (!rep.ok()) return rep;

    for (int i = 0; i < n; ++i) {
        double dii = space.d(i, i);
        if (std::abs(dii) > 0.0)
            record(rep, strict, "zero-diagonal", "dist[" + std::to_string(i) + "][same] != 0",
                   std::abs(dii));
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double a = space.d(i, j), b = space.d(j, i);
            if (!(std::isfinite(a)) || a < 0.0)
                record(rep, strict, "nonnegative", "bad entry at (" + std::to_string(i) + "," +
                       std::to_string(j) + ")", std::abs(a));
            if (a != b)
                record(rep, strict, "symmetry", "dist(" + std::to_string(i) + "," +
                       std::to_string(j) + ") != transpose", std::abs(a - b));
        }

    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        if (!(space.mass[i] >= 0.0) || !std::isfinite(space.mass[i]))
            record(rep, strict, "mass-nonnegative", "mass[" + std::to_string(i) + "]",
                   std::abs(space.mass[i]));
        else
            total += space.mass[i];
    }
    if (!(total > 0.0)) record(rep, strict, "mass-positive-total", "total mass <= 0", 1.0);

    auto check_triple = [&](int i, int j, int k) {
        double lhs = space.d(i, k);
        double rhs = space.d(i, j) + space.d(j, k);
        if (lhs > rhs + tol)
            record(rep, strict, "triangle",
                   "d(" + std::to_string(i) + "," + std::to_string(k) + ") > d(.," +
                       std::to_string(j) + ") + d(" + std::to_string(j) + ",.)",
                   lhs - rhs);
    };

    if (n <= 512) {
        rep.triangle_exhaustive = true;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                for (int k = 0; k < n; ++k) {
                    if (k == i || k == j) continue;
                    check_triple(i, j, k);
                    ++rep.triangle_triples_checked;
                }
            }
    } else {
        std::mt19937_64 rng(mix_seed(seed, 7));
        std::uniform_int_distribution<int> pick(0, n - 1);
        const std::size_t samples = 100000;
        for (std::size_t s = 0; s < samples; ++s) {
            int i, j, k;
            do {
                i = pick(rng), j = pick(rng), k = pick(rng);
            } while (i == j || j == k || i == k);
            check_triple(i, j, k);
            ++rep.triangle_triples_checked;
        }
    }
    return rep;
}

double ProbMeasure::sum() const { return std::accumulate(w.begin(), w.end(), 0.0); }

int ProbMeasure::support_size(double tol) const {
    int c = 0;
    for (double v : w)
        if (v > tol) ++c;
    return c;
}

ProbMeasure dirac(int n, int at) {
    require(at >= 0 && at < n, "dirac: index out of range");
    ProbMeasure m;
    m.w.assign(n, 0.0);
    m.w[at] = 1.0;
    return m;
}

ProbMeasure uniform_measure(int n) {
    require(n >= 1, "uniform_measure: empty");
    ProbMeasure m;
    m.w.assign(n, 1.0 / n);
    return m;
}

ProbMeasure mass_measure(const FiniteMMSpace& space) {
    std::vector<double> w = space.mass;
    return make_measure(std::move(w));
}

ProbMeasure make_measure(std::vector<double> weights) {
    double total = 0.0;
    for (double& v : weights) {
        require(std::isfinite(v) && v >= -1e-12, "make_measure: negative weight");
        if (v < 0.0) v = 0.0;
        total += v;
    }
    require(total > 0.0, "make_measure: zero total weight");
    for (double& v : weights) v /= total;
    ProbMeasure m;
    m.w = std::move(weights);
    return m;
}

double DistanceHistogram::total() const {
    return std::accumulate(masses.begin(), masses.end(), 0.0);
}

DistanceHistogram distance_histogram(const FiniteMMSpace& space, const ProbMeasure& mu, int bins,
                                     double lo, double hi) {
    require(bins >= 1, "distance_histogram: bins >= 1");
    require(hi > lo, "distance_histogram: empty range");
    require(mu.n() == space.n, "distance_histogram: measure size mismatch");
    DistanceHistogram h;
    h.edges.resize(bins + 1);
    for (int b = 0; b <= bins; ++b) h.edges[b] = lo + (hi - lo) * b / bins;
    h.masses.assign(bins, 0.0);
    const double width = (hi - lo) / bins;
    for (int i = 0; i < space.n; ++i) {
        if (mu.w[i] == 0.0) continue;
        for (int j = 0; j < space.n; ++j) {
            double d = std::clamp(space.d(i, j), lo, hi);
            int b = std::min(bins - 1, static_cast<int>((d - lo) / width));
            h.masses[b] += mu.w[i] * mu.w[j];
        }
    }
    return h;
}

// Raw-mass variant: bin masses sum to (total mass)^2, diagonal included.
DistanceHistogram distance_histogram(const FiniteMMSpace& space, int bins, double lo, double hi) {
    require(bins >= 1, "distance_histogram: bins >= 1");
    require(hi > lo, "distance_histogram: empty range");
    DistanceHistogram h;
    h.edges.resize(bins + 1);
    for (int b = 0; b <= bins; ++b) h.edges[b] = lo + (hi - lo) * b / bins;
    h.masses.assign(bins, 0.0);
    const double width = (hi - lo) / bins;
    for (int i = 0; i < space.n; ++i) {
        if (space.mass[i] == 0.0) continue;
        for (int j = 0; j < space.n; ++j) {
            double d = std::clamp(space.d(i, j), lo, hi);
            int b = std::min(bins - 1, static_cast<int>((d - lo) / width));
            h.masses[b] += space.mass[i] * space.mass[j];
        }
    }
    return h;
}

DistanceHistogram distance_histogram(const FiniteMMSpace& space, int bins) {
    double hi = space.diameter();
    if (hi <= 0.0) hi = 1.0;
    return distance_histogram(space, bins, 0.0, hi);
}

FiniteMMSpace circle(double circumference, int n) {
    require(circumference > 0.0, "circle: circumference must be positive");
    require(n >= 3, "circle: need n >= 3");
    const double h = circumference / n;
    std::vector<double> dist(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            int k = j - i;
            double d = std::min(k, n - k) * h;
            dist[static_cast<std::size_t>(i) * n + j] = d;
            dist[static_cast<std::size_t>(j) * n + i] = d;
        }
    FiniteMMSpace s = make_space(n, std::move(dist), std::vector<double>(n, 1.0 / n), "circle");
    const double R = circumference / (2.0 * kPi);
    s.coords.resize(n);
    for (int i = 0; i < n; ++i) {
        double th = 2.0 * kPi * i / n;
        s.coords[i] = {R * std::cos(th), R * std::sin(th), 0.0};
    }
    return s;
}

FiniteMMSpace interval_model(double N, int n) {
    require(N >= 1.0, "interval_model: N >= 1");
    require(n >= 2, "interval_model: n >= 2");
    const double h = kPi / n;
    std::vector<double> nodes(n), mass(n);
    auto w = [N](double t) { return std::pow(std::sin(t), N - 1.0); };
    for (int i = 0; i < n; ++i) {
        nodes[i] = (i + 0.5) * h;
        mass[i] = integrate(w, i * h, (i + 1) * h, 1e-13).value;
    }
    // sin^{N-1} is symmetric about pi/2; enforce the reversal symmetry exactly
    for (int i = 0; i < n / 2; ++i) {
        double m = 0.5 * (mass[i] + mass[n - 1 - i]);
        mass[i] = mass[n - 1 - i] = m;
    }
    double total = std::accumulate(mass.begin(), mass.end(), 0.0);
    for (double& v : mass) v /= total;
    std::vector<double> dist(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double d = nodes[j] - nodes[i];
            dist[static_cast<std::size_t>(i) * n + j] = d;
            dist[static_cast<std::size_t>(j) * n + i] = d;
        }
    FiniteMMSpace s = make_space(n, std::move(dist), std::move(mass), "interval_model");
    s.coords.resize(n);
    for (int i = 0; i < n; ++i) s.coords[i] = {nodes[i], 0.0, 0.0};
    return s;
}

FiniteMMSpace sphere_fibonacci(int N, double radius, int n) {
    require(radius > 0.0, "sphere_fibonacci: radius must be positive");
    require(N == 1 || N == 2, "sphere_fibonacci: only N in {1,2}; higher spheres via suspension");
    if (N == 1) {
        FiniteMMSpace s = circle(2.0 * kPi * radius, n);
        s.name = "sphere1";
        return s;
    }
    require(n >= 12, "sphere_fibonacci: need n >= 12 for N=2");
    // Fibonacci lattice: z strides uniformly, azimuth advances by the golden angle.
    const double ga = kPi * (3.0 - std::sqrt(5.0));
    std::vector<std::array<double, 3>> pts(n);
    for (int i = 0; i < n; ++i) {
        double z = 1.0 - (2.0 * i + 1.0) / n;
        double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        double phi = ga * i;
        pts[i] = {rho * std::cos(phi), rho * std::sin(phi), z};
    }
    std::vector<double> dist(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double dot = pts[i][0] * pts[j][0] + pts[i][1] * pts[j][1] + pts[i][2] * pts[j][2];
            double d = radius * std::acos(std::clamp(dot, -1.0, 1.0));
            dist[static_cast<std::size_t>(i) * n + j] = d;
            dist[static_cast<std::size_t>(j) * n + i] = d;
        }
    FiniteMMSpace s = make_space(n, std::move(dist), std::vector<double>(n, 1.0 / n), "sphere2");
    s.coords.resize(n);
    for (int i = 0; i < n; ++i)
        s.coords[i] = {radius * pts[i][0], radius * pts[i][1], radius * pts[i][2]};
    return s;
}

FiniteMMSpace product_space(const FiniteMMSpace& X, const FiniteMMSpace& Y, int size_cap) {
    require(X.n >= 1 && Y.n >= 1, "product_space: empty factor");
    require(static_cast<long long>(X.n) * Y.n <= size_cap,
            "product_space: size cap exceeded (" + std::to_string(X.n) + "x" +
                std::to_string(Y.n) + " > " + std::to_string(size_cap) + ")");
    const int n = X.n * Y.n;
    std::vector<double> dist(static_cast<std::size_t>(n) * n, 0.0);
    std::vector<double> mass(n);
    for (int ix = 0; ix < X.n; ++ix)
        for (int iy = 0; iy < Y.n; ++iy) mass[ix * Y.n + iy] = X.mass[ix] * Y.mass[iy];
    double total = std::accumulate(mass.begin(), mass.end(), 0.0);
    for (double& v : mass) v /= total;
    for (int a = 0; a < n; ++a) {
        int ax = a / Y.n, ay = a % Y.n;
        for (int b = a + 1; b < n; ++b) {
            int bx = b / Y.n, by = b % Y.n;
            double d = std::hypot(X.d(ax, bx), Y.d(ay, by));
            dist[static_cast<std::size_t>(a) * n + b] = d;
            dist[static_cast<std::size_t>(b) * n + a] = d;
        }
    }
    return make_space(n, std::move(dist), std::move(mass),
                      X.name.empty() || Y.name.empty() ? "product" : X.name + "x" + Y.name);
}

FiniteMMSpace make_half_resolution(const FiniteMMSpace& space) {
    require(space.n >= 4, "make_half_resolution: space too small");
    std::vector<int> idx;
    for (int i = 0; i < space.n; i += 2) idx.push_back(i);
    const int n = static_cast<int>(idx.size());
    std::vector<double> dist(static_cast<std::size_t>(n) * n, 0.0), mass(n);
    double tot = 0.0;
    for (int i = 0; i < n; ++i) {
        tot += (mass[i] = space.mass[idx[i]]);
        for (int j = 0; j < n; ++j) dist[static_cast<std::size_t>(i) * n + j] = space.d(idx[i], idx[j]);
    }
    require(tot > 0.0, "make_half_resolution: degenerate masses");
    for (double& v : mass) v /= tot;
    return make_space(n, std::move(dist), std::move(mass),
                      space.name.empty() ? "half" : space.name + "_half");
}

MetricView view_of(const FiniteMMSpace& space) {
    MetricView v;
    v.n = space.n;
    v.mass = &space.mass;
    const FiniteMMSpace* p = &space;
    v.dist = [p](int i, int j) { return p->d(i, j); };
    return v;
}

}  // namespace ricci
