#include <cmath>
#include <random>

#include "doctest.h"
#include "ot_oracle.hpp"
#include "riccilab/transport.hpp"

using namespace ricci;

namespace {

// Random balanced instance with ns, nt in [1, cap].
struct Instance {
    int ns, nt;
    std::vector<double> cost, supply, demand;
};

Instance random_instance(std::mt19937_64& rng, int cap) {
    std::uniform_int_distribution<int> size(1, cap);
    std::uniform_real_distribution<double> U(0.05, 1.0);
    std::uniform_real_distribution<double> C(0.0, 10.0);
    Instance ins;
    ins.ns = size(rng);
    ins.nt = size(rng);
    ins.cost.resize(static_cast<std::size_t>(ins.ns) * ins.nt);
    for (double& c : ins.cost) c = C(rng);
    double su = 0.0, de = 0.0;
    for (int i = 0; i < ins.ns; ++i) {
        ins.supply.push_back(U(rng));
        su += ins.supply.back();
    }
    for (int j = 0; j < ins.nt; ++j) {
        ins.demand.push_back(U(rng));
        de += ins.demand.back();
    }
    for (double& v : ins.demand) v *= su / de;
    return ins;
}

}  // namespace

TEST_SUITE("transport") {

TEST_CASE("exact solver agrees with the enumeration oracle") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const Instance ins = random_instance(rng, 4);
        const OTResult res = exact_ot(ins.cost, ins.ns, ins.nt, ins.supply, ins.demand);
        const double ref = ricci_test::ot_oracle(ins.cost, ins.ns, ins.nt, ins.supply, ins.demand);
        CHECK(res.converged);
        CHECK(std::abs(res.cost - ref) <= 1e-10);
        CHECK(res.duality_gap <= 1e-9);

        const auto rm = res.plan.row_marginal();
        const auto cm = res.plan.col_marginal();
        for (int i = 0; i < ins.ns; ++i) CHECK(std::abs(rm[i] - ins.supply[i]) <= 1e-10);
        for (int j = 0; j < ins.nt; ++j) CHECK(std::abs(cm[j] - ins.demand[j]) <= 1e-10);
        for (const auto& e : res.plan.entries) CHECK(e.w >= -1e-12);
    }
}

TEST_CASE("exact solver drops zero-mass points, rejects unbalanced totals") {
    const std::vector<double> cost = {1.0, 2.0, 3.0, 0.5};
    const OTResult res = exact_ot(cost, 2, 2, {1.0, 0.0}, {0.5, 0.5});
    // Row 1 is empty: everything ships from row 0 at cost 0.5*1 + 0.5*2.
    CHECK(res.cost == doctest::Approx(1.5));
    CHECK_THROWS(exact_ot(cost, 2, 2, {1.0, 1.0}, {10.0, 10.0}));
}

TEST_CASE("wp distance equals the quantile merge on the line") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const int n = 40;
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) xs[i] = 3.0 * i / (n - 1.0) + 0.1 * U(rng);
    std::sort(xs.begin(), xs.end());
    std::vector<double> mass(n, 1.0);
    MetricView line;
    line.n = n;
    line.mass = &mass;
    line.dist = [&xs](int i, int j) { return std::abs(xs[i] - xs[j]); };

    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> a(n), b(n);
        for (int i = 0; i < n; ++i) {
            a[i] = U(rng);
            b[i] = U(rng);
        }
        const ProbMeasure mu = make_measure(a), nu = make_measure(b);
        for (double p : {1.0, 2.0}) {
            const double direct = wp_distance(line, mu, nu, p);
            const double merged = wasserstein_1d(xs, mu.w, xs, nu.w, p);
            CHECK(direct == doctest::Approx(merged).epsilon(1e-10));
        }
    }
}

TEST_CASE("wasserstein_1d closed forms") {
    CHECK(wasserstein_1d({0.0}, {1.0}, {2.5}, {1.0}, 2.0) == doctest::Approx(2.5));
    // Translating every atom by c moves the distance to exactly c.
    const std::vector<double> x = {0.0, 1.0, 3.0}, w = {0.2, 0.5, 0.3};
    std::vector<double> y = x;
    for (double& v : y) v += 0.7;
    CHECK(wasserstein_1d(x, w, y, w, 2.0) == doctest::Approx(0.7));
    CHECK(wasserstein_1d(x, w, y, w, 1.0) == doctest::Approx(0.7));
}

TEST_CASE("two diracs are forced") {
    const FiniteMMSpace s = circle(2 * kPi, 16);
    const MetricView v = view_of(s);
    CHECK(wp_distance(v, dirac(16, 0), dirac(16, 4), 2.0) == doctest::Approx(s.d(0, 4)));
    CHECK(wp_distance(v, dirac(16, 3), dirac(16, 3), 2.0) == doctest::Approx(0.0));
}

TEST_CASE("sinkhorn rounds to a valid upper bound") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        const Instance ins = random_instance(rng, 4);
        // Strictly positive marginals are required; random_instance guarantees it.
        const double exact = exact_ot(ins.cost, ins.ns, ins.nt, ins.supply, ins.demand).cost;
        double mean_c = 0.0;
        for (double c : ins.cost) mean_c += c;
        mean_c /= static_cast<double>(ins.cost.size());
        const SinkhornResult sr =
            sinkhorn(ins.cost, ins.ns, ins.nt, ins.supply, ins.demand, 0.05 * mean_c + 1e-3);
        CHECK(sr.rounded_cost >= exact - 1e-12);
        CHECK(sr.marginal_error <= 1e-6);
    }
}

TEST_CASE("sinkhorn approaches the exact cost as epsilon shrinks") {
    std::mt19937_64 rng(5);
    const Instance ins = random_instance(rng, 4);
    const double exact = exact_ot(ins.cost, ins.ns, ins.nt, ins.supply, ins.demand).cost;
    double mean_c = 0.0;
    for (double c : ins.cost) mean_c += c;
    mean_c /= static_cast<double>(ins.cost.size());
    double su = 0.0;
    for (double v : ins.supply) su += v;
    const SinkhornResult tight =
        sinkhorn(ins.cost, ins.ns, ins.nt, ins.supply, ins.demand, 0.005 * mean_c);
    CHECK(tight.converged);
    CHECK(tight.rounded_cost >= exact - 1e-12);
    CHECK(tight.rounded_cost <= exact + 0.05 * mean_c * su + 1e-9);
}

TEST_CASE("product coupling cost matches the double sum") {
    const FiniteMMSpace base = circle(2 * kPi * 0.8, 8);
    const ConeSpace cone = build_cone(base, 0.0, 1.0, linear_grid(5, 2.0));
    const int n = cone.n_points();
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<double> a(n), b(n);
    for (int i = 0; i < n; ++i) {
        a[i] = U(rng);
        b[i] = U(rng);
    }
    const ProbMeasure mu = make_measure(a), nu = make_measure(b);
    double direct = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double d = cone.dist(i, j);
            direct += mu.w[i] * nu.w[j] * d * d;
        }
    CHECK(product_coupling_cost(cone, mu, nu) == doctest::Approx(direct).epsilon(1e-11));
}

TEST_CASE("lipschitz verification and dual lower bounds") {
    const FiniteMMSpace s = circle(2 * kPi, 48);
    const MetricView v = view_of(s);
    // d(., 0) has constant exactly 1 on a geodesic space.
    std::vector<double> phi(s.n);
    for (int i = 0; i < s.n; ++i) phi[i] = s.d(i, 0);
    CHECK(verify_lipschitz(v, phi) == doctest::Approx(1.0).epsilon(1e-12));

    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<double> a(s.n), b(s.n);
    for (int i = 0; i < s.n; ++i) {
        a[i] = U(rng);
        b[i] = U(rng);
    }
    const ProbMeasure mu = make_measure(a), nu = make_measure(b);
    const double d1 = w1(s, mu, nu), d2 = w2(s, mu, nu);
    const KRBound kr = kr_dual_bound(v, mu, nu, phi, 1.0);
    CHECK(kr.value <= d1 + 1e-10);
    CHECK(d1 <= d2 + 1e-10);
    // An understated claim must not inflate the bound.
    const KRBound cheat = kr_dual_bound(v, mu, nu, phi, 0.25);
    CHECK(cheat.lip_normalizer >= kr.lip_measured - 1e-12);
    CHECK(cheat.value <= d1 + 1e-10);
}

TEST_CASE("cone dual function is 1-lipschitz") {
    const FiniteMMSpace base = circle(2 * kPi * 2.0 / 3.0, 16);
    const ConeSpace cone = build_cone(base, 0.0, 1.0, linear_grid(8, 2.5));
    const std::vector<double> phi = cone_dual_function(cone, 3);
    CHECK(phi[cone.vertex()] == doctest::Approx(0.0));
    CHECK(verify_lipschitz(cone.metric_view(), phi) <= 1.0 + 1e-9);
    // At the marked fiber the function is the radius itself.
    const int p = cone.index_of(4, 3);
    CHECK(phi[p] == doctest::Approx(cone.radius_of(p)));
}

}  // TEST_SUITE
