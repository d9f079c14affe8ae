#include "riccilab/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "riccilab/common.hpp"

namespace ricci {

double KernelFunction::operator()(double d) const {
    switch (kind) {
        case Kind::id:
            return d;
        case Kind::square:
            return d * d;
        case Kind::cos:
            return std::cos(std::min(d, kPi));  // the functional only sees d ^ pi
        case Kind::custom: {
            if (d <= xs.front()) return ys.front();
            if (d >= xs.back()) return ys.back();
            auto it = std::upper_bound(xs.begin(), xs.end(), d);
            std::size_t k = static_cast<std::size_t>(it - xs.begin());
            double t = (d - xs[k - 1]) / (xs[k] - xs[k - 1]);
            return ys[k - 1] + t * (ys[k] - ys[k - 1]);
        }
    }
    return 0.0;
}

std::string KernelFunction::name() const {
    switch (kind) {
        case Kind::id:
            return "id";
        case Kind::square:
            return "square";
        case Kind::cos:
            return "cos";
        case Kind::custom:
            return "custom";
    }
    return "?";
}

KernelFunction KernelFunction::identity() { return {}; }

KernelFunction KernelFunction::square() {
    KernelFunction f;
    f.kind = Kind::square;
    return f;
}

KernelFunction KernelFunction::cosine() {
    KernelFunction f;
    f.kind = Kind::cos;
    return f;
}

KernelFunction KernelFunction::custom(std::vector<double> xs, std::vector<double> ys) {
    require(xs.size() == ys.size() && xs.size() >= 2, "custom kernel: need >= 2 nodes");
    for (std::size_t i = 1; i < xs.size(); ++i)
        require(xs[i] > xs[i - 1], "custom kernel: nodes must increase");
    bool up = true, down = true;
    for (std::size_t i = 1; i < ys.size(); ++i) {
        if (ys[i] < ys[i - 1]) up = false;
        if (ys[i] > ys[i - 1]) down = false;
    }
    require(up || down, "custom kernel: values must be monotone");
    KernelFunction f;
    f.kind = Kind::custom;
    f.xs = std::move(xs);
    f.ys = std::move(ys);
    return f;
}

double m_f(const MetricView& view, const KernelFunction& f) {
    const int n = view.n;
    const std::vector<double>& m = *view.mass;
    double total = 0.0;
    for (double v : m) total += v;
    require(total > 0.0, "m_f: zero total mass");

    double acc = 0.0, diag = 0.0;
    for (int i = 0; i < n; ++i) {
        if (m[i] == 0.0) continue;
        diag += m[i] * m[i] * f(0.0);
        double row = 0.0;
        for (int j = i + 1; j < n; ++j) {
            if (m[j] == 0.0) continue;
            row += m[j] * f(view.dist(i, j));
        }
        acc += m[i] * row;
    }
    return (2.0 * acc + diag) / (total * total);
}

double m_f(const FiniteMMSpace& space, const KernelFunction& f) {
    return m_f(view_of(space), f);
}

double m_f(const ConeSpace& cone, const KernelFunction& f) {
    return m_f(cone.metric_view(), f);
}

namespace {

// Composite Gauss-Legendre on [0,pi], panel count doubled until stable.
double model_average(const std::function<double(double)>& g, int quad_points) {
    const QuadRule& rule = gauss_legendre(16);
    auto sweep = [&](int panels) {
        double acc = 0.0;
        double h = kPi / panels;
        for (int p = 0; p < panels; ++p) {
            double a = p * h, mid = a + 0.5 * h, half = 0.5 * h;
            for (std::size_t q = 0; q < rule.nodes.size(); ++q)
                acc += rule.weights[q] * half * g(mid + half * rule.nodes[q]);
        }
        return acc;
    };
    int panels = std::max(4, quad_points / 16);
    if (panels % 2 == 1) ++panels;  // keep the pi/2 symmetry of the panels
    double prev = sweep(panels);
    for (int it = 0; it < 10; ++it) {
        panels *= 2;
        double cur = sweep(panels);
        if (std::abs(cur - prev) <= 1e-14 * std::max(1.0, std::abs(cur))) return cur;
        prev = cur;
    }
    return prev;
}

}  // namespace

double m_f_star(double N, const KernelFunction& f, int quad_points) {
    require(N >= 1.0, "m_f_star: N >= 1");
    require(quad_points >= 64, "m_f_star: quad_points >= 64");
    auto w = [&](double t) { return std::pow(std::sin(t), N - 1.0); };
    double denom = model_average(w, quad_points);
    double numer = model_average([&](double t) { return f(t) * w(t); }, quad_points);
    return numer / denom;
}

double cos_potential(const FiniteMMSpace& space, int x0) {
    require(x0 >= 0 && x0 < space.n, "cos_potential: x0 out of range");
    double total = space.total_mass();
    double acc = 0.0;
    for (int j = 0; j < space.n; ++j)
        acc += space.mass[j] * std::cos(std::min(space.d(x0, j), kPi));
    return acc / total;
}

std::vector<double> cos_potential_all(const FiniteMMSpace& space) {
    std::vector<double> out(space.n);
    for (int i = 0; i < space.n; ++i) out[i] = cos_potential(space, i);
    return out;
}

double entropy(const ProbMeasure& mu, const std::vector<double>& ref_mass) {
    require(mu.n() == static_cast<int>(ref_mass.size()), "entropy: size mismatch");
    double acc = 0.0;
    for (int i = 0; i < mu.n(); ++i) {
        double w = mu.w[i];
        if (w <= 0.0) continue;
        if (ref_mass[i] <= 0.0) return std::numeric_limits<double>::infinity();
        acc += w * std::log(w / ref_mass[i]);
    }
    return acc;
}

double entropy(const ProbMeasure& mu, const FiniteMMSpace& space) {
    return entropy(mu, space.mass);
}

RigidityReport rigidity_report(const FiniteMMSpace& space, const KernelFunction& f, double N,
                               int bins) {
    require(bins >= 8, "rigidity_report: need >= 8 bins");
    RigidityReport rep;
    rep.bins = bins;
    rep.m_value = m_f(space, f);
    rep.m_star = m_f_star(N, f);
    rep.gap = rep.m_star - rep.m_value;

    // distances beyond pi clamp into the last bin and register as mismatch there
    DistanceHistogram h = distance_histogram(space, bins, 0.0, kPi);
    double total2 = h.total();

    auto w = [&](double t) { return std::pow(std::sin(t), N - 1.0); };
    double denom = integrate(w, 0.0, kPi, 1e-12).value;
    double l1 = 0.0;
    for (int k = 0; k < bins; ++k) {
        double q = h.masses[k] / total2;
        double p = integrate(w, h.edges[k], h.edges[k + 1], 1e-10).value / denom;
        l1 += std::abs(q - p);
    }
    rep.hist_l1 = l1;
    return rep;
}

}  // namespace ricci
