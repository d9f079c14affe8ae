#include <cmath>

#include "doctest.h"
#include "riccilab/geometry.hpp"

using namespace ricci;

TEST_SUITE("geometry") {

TEST_CASE("comparison functions and distortion coefficients") {
    CHECK(s_kappa(1.0, 0.7) == doctest::Approx(std::sin(0.7)));
    CHECK(s_kappa(-1.0, 0.7) == doctest::Approx(std::sinh(0.7)));
    CHECK(s_kappa(0.0, 0.7) == doctest::Approx(0.7));
    // Continuity across kappa = 0.
    CHECK(s_kappa(1e-12, 0.7) == doctest::Approx(0.7).epsilon(1e-10));
    CHECK(s_kappa(-1e-12, 0.7) == doctest::Approx(0.7).epsilon(1e-10));
    CHECK(c_kappa(1.0, 0.7) == doctest::Approx(std::cos(0.7)));
    CHECK(c_kappa(0.0, 0.7) == doctest::Approx(1.0));

    // sigma^(t)_kappa(theta) = s_kappa(t theta) / s_kappa(theta).
    CHECK(sigma_coeff(0.5, 1.0, kPi / 2) ==
          doctest::Approx(std::sin(kPi / 4) / std::sin(kPi / 2)));
    CHECK(sigma_coeff(0.3, 0.0, 2.0) == doctest::Approx(0.3));
    CHECK(std::isinf(sigma_coeff(0.5, 1.0, kPi + 0.1)));

    // tau collapses to t in the flat case for every N.
    CHECK(tau_coeff(0.4, 0.0, 3.0, 1.3) == doctest::Approx(0.4));
    const double t = 0.5, K = 2.0, N = 3.0, th = 1.0;
    const double sig = sigma_coeff(t, K / (N - 1), th);
    CHECK(tau_coeff(t, K, N, th) ==
          doctest::Approx(std::pow(t, 1.0 / N) * std::pow(sig, 1.0 - 1.0 / N)));
}

TEST_CASE("radial grids") {
    const RadialGrid lin = linear_grid(10, 2.0);
    CHECK(lin.cells() == 10);
    CHECK(lin.edges.front() == 0.0);
    CHECK(lin.rmax() == doctest::Approx(2.0));
    CHECK(lin.edges[3] == doctest::Approx(0.6));

    const RadialGrid geo = geometric_grid(20, 0.01, 4.0);
    CHECK(geo.cells() == 20);
    CHECK(geo.edges[1] == doctest::Approx(0.01));
    CHECK(geo.rmax() == doctest::Approx(4.0));
    for (int i = 1; i < 20; ++i) CHECK(geo.edges[i + 1] > geo.edges[i]);

    CHECK(parse_grid("lin:10:2.0").edges == lin.edges);
    CHECK(parse_grid("geo:20:0.01:4.0").edges == geo.edges);
    CHECK_THROWS(parse_grid("bogus:1:2"));
    CHECK_THROWS(custom_grid({0.0, 0.5, 0.4}));
    CHECK_THROWS(custom_grid({0.1, 0.5}));  // must start at 0
}

TEST_CASE("flat cone over the full circle is the plane") {
    const FiniteMMSpace base = circle(2 * kPi, 24);
    const ConeSpace cone = build_cone(base, 0.0, 1.0, linear_grid(12, 3.0));
    CHECK_FALSE(cone.has_far_pole);
    CHECK(cone.layers() == 11);  // first cell is the vertex
    CHECK(cone.n_points() == 1 + 11 * 24);

    // Planar law of cosines against the polar embedding.
    for (int l = 0; l < cone.layers(); l += 3)
        for (int m = 0; m < cone.layers(); m += 4)
            for (int x = 0; x < 24; x += 5)
                for (int y = 0; y < 24; y += 7) {
                    const double r = cone.node_r[l], s = cone.node_r[m];
                    const double ang = base.d(x, y);  // arc = angle, already <= pi
                    const double expect =
                        std::sqrt(std::max(0.0, r * r + s * s - 2 * r * s * std::cos(ang)));
                    CHECK(cone.dist(cone.index_of(l, x), cone.index_of(m, y)) ==
                          doctest::Approx(expect).epsilon(1e-12));
                }

    // Vertex distances are plain radii.
    CHECK(cone.dist(cone.vertex(), cone.index_of(5, 7)) == doctest::Approx(cone.node_r[5]));
    CHECK(cone.radius_of(cone.vertex()) == 0.0);
    CHECK(cone.base_of(cone.vertex()) == -1);
    CHECK(cone.base_of(cone.index_of(2, 9)) == 9);

    // Mass: vertex owns the first radial cell, here r dr on [0, 0.25].
    double total_mass = 0.0;
    for (double m : cone.mass) total_mass += m;
    CHECK(total_mass == doctest::Approx(1.0));
    const double cell0 = 0.25 * 0.25 / 2.0, all = 3.0 * 3.0 / 2.0;
    CHECK(cone.mass[0] == doctest::Approx(cell0 / all));

    // The materialized table passes strict validation.
    const FiniteMMSpace flat = cone.as_finite();
    CHECK(flat.n == cone.n_points());
    CHECK(validate_space(flat).ok());
}

TEST_CASE("suspension collapses the far pole") {
    const FiniteMMSpace base = circle(2 * kPi, 16);
    const ConeSpace susp = suspension(base, 1.0, linear_grid(24, kPi));
    CHECK(susp.has_far_pole);
    CHECK(susp.K == doctest::Approx(1.0));
    CHECK(susp.layers() == 22);  // first cell is the vertex, last the pole
    CHECK(susp.n_points() == 1 + 22 * 16 + 1);
    CHECK(susp.radius_of(susp.far_pole()) == doctest::Approx(kPi));
    CHECK(susp.dist(susp.vertex(), susp.far_pole()) == doctest::Approx(kPi));
    // Pole-to-point distance is the complementary radius.
    const int p = susp.index_of(10, 3);
    CHECK(susp.dist(p, susp.far_pole()) == doctest::Approx(kPi - susp.radius_of(p)));

    // Pole mass = model mass of the last cell, here sin(r) on [e_{m-1}, pi] over 2.
    const double lo = susp.grid.edges[susp.grid.cells() - 1];
    CHECK(susp.mass[susp.far_pole()] ==
          doctest::Approx((std::cos(lo) + 1.0) / 2.0).epsilon(1e-9));

    // Suspension of a circle is a 2-sphere: spot-check the spherical law of
    // cosines with colatitude r and longitude the base angle.
    const int a = susp.index_of(4, 2), b = susp.index_of(15, 9);
    const double r1 = susp.radius_of(a), r2 = susp.radius_of(b);
    const double ang = base.d(2, 9);
    const double expect = std::acos(std::clamp(
        std::cos(r1) * std::cos(r2) + std::sin(r1) * std::sin(r2) * std::cos(ang), -1.0, 1.0));
    CHECK(susp.dist(a, b) == doctest::Approx(expect).epsilon(1e-12));

    CHECK(validate_space(susp.as_finite()).ok());
}

TEST_CASE("homothety pushforward scales the radial coordinate") {
    const FiniteMMSpace base = circle(2 * kPi, 16);
    const ConeSpace cone = build_cone(base, 0.0, 1.0, linear_grid(40, 4.0));

    // A measure sitting in a band of layers.
    std::vector<double> w(cone.n_points(), 0.0);
    for (int l = 18; l < 22; ++l)
        for (int x = 0; x < 16; ++x) w[cone.index_of(l, x)] = 1.0;
    const ProbMeasure mu = make_measure(w);

    auto radial_mean = [&](const ProbMeasure& m) {
        double e = 0.0;
        for (int i = 0; i < cone.n_points(); ++i) e += m.w[i] * cone.radius_of(i);
        return e;
    };

    double clipped = 0.0;
    const ProbMeasure same = homothety_pushforward(cone, mu, 1.0, &clipped);
    for (int i = 0; i < cone.n_points(); ++i)
        CHECK(same.w[i] == doctest::Approx(mu.w[i]).epsilon(1e-12));
    CHECK(clipped == doctest::Approx(0.0));

    const ProbMeasure half = homothety_pushforward(cone, mu, 0.5, &clipped);
    CHECK(half.sum() == doctest::Approx(1.0));
    CHECK(clipped == doctest::Approx(0.0));
    const double h = 0.1;  // cell width
    CHECK(std::abs(radial_mean(half) - 0.5 * radial_mean(mu)) <= h);

    // Pushing far past the rim clips mass into the last cell.
    const ProbMeasure big = homothety_pushforward(cone, mu, 2.5, &clipped);
    CHECK(big.sum() == doctest::Approx(1.0));
    CHECK(clipped > 0.5);
}

TEST_CASE("volume comparison profile on the unit sphere") {
    const FiniteMMSpace s = sphere_fibonacci(2, 1.0, 800);
    std::vector<double> rg;
    for (int k = 0; k <= 20; ++k) rg.push_back(0.35 + k * (kPi - 0.35) / 20.0);
    const ComparisonProfile prof = bishop_gromov_check(s, 0, 1.0, 2.0, rg);
    CHECK(prof.empty_balls == 0);
    CHECK(prof.worst_margin >= -2e-2);
    CHECK(prof.max_abs_margin <= 2e-2);
    // Ball mass is nondecreasing and reaches 1 at r = pi.
    for (std::size_t i = 1; i < prof.v.size(); ++i) CHECK(prof.v[i] >= prof.v[i - 1]);
    CHECK(prof.v.back() == doctest::Approx(1.0));
}

TEST_CASE("positive curvature cone with an interior grid keeps no far pole") {
    const FiniteMMSpace base = circle(2 * kPi, 12);
    const ConeSpace cone = build_cone(base, 1.0, 2.0, linear_grid(10, 2.0));
    CHECK_FALSE(cone.has_far_pole);  // 2.0 < pi
    CHECK(cone.max_radius() == doctest::Approx(2.0));
    CHECK(cone.node_r.back() < 2.0);
    CHECK_THROWS(build_cone(base, 1.0, 2.0, linear_grid(10, 3.5)));  // beyond pi/sqrt(K)
}

}  // TEST_SUITE
