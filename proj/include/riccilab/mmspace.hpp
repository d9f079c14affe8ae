#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "riccilab/common.hpp"

namespace ricci {

// Finite metric measure space: symmetric distance table plus a nonnegative
// mass vector. All algorithms consume only dist and mass; coords and labels
// are advisory metadata.
struct FiniteMMSpace {
    int n = 0;
    std::vector<double> dist;   // row-major n*n
    std::vector<double> mass;   // size n
    std::vector<std::string> labels;                // empty or size n
    std::vector<std::array<double, 3>> coords;      // empty or size n
    std::string name;

    double d(int i, int j) const { return dist[static_cast<std::size_t>(i) * n + j]; }
    void set_d(int i, int j, double v) {
        dist[static_cast<std::size_t>(i) * n + j] = v;
        dist[static_cast<std::size_t>(j) * n + i] = v;
    }
    double total_mass() const;
    double diameter() const;
};

// Rejects NaN, negative masses/distances, nonzero diagonal and asymmetry
// outright; triangle inequality is left to validate_space.
FiniteMMSpace make_space(int n, std::vector<double> dist, std::vector<double> mass,
                         std::string name = "");

struct Violation {
    std::string invariant;
    std::string detail;
    double magnitude = 0.0;
};

struct ValidationReport {
    std::vector<Violation> violations;
    std::size_t triangle_triples_checked = 0;
    bool triangle_exhaustive = false;
    bool ok() const { return violations.empty(); }
};

// Exhaustive triangle check for n <= 512, sampled (>= 1e5 seeded triples)
// above. strict throws on the first violation found.
ValidationReport validate_space(const FiniteMMSpace& space, bool strict = false,
                                std::uint64_t seed = 12345);

// Probability measure over a space's points.
struct ProbMeasure {
    std::vector<double> w;

    int n() const { return static_cast<int>(w.size()); }
    double sum() const;
    // Number of entries above the threshold.
    int support_size(double tol = 0.0) const;
};

ProbMeasure dirac(int n, int at);
ProbMeasure uniform_measure(int n);
// Normalized copy of the space's mass vector.
ProbMeasure mass_measure(const FiniteMMSpace& space);
// Validates nonnegativity (>= -1e-12, clamped) and renormalizes to sum 1.
ProbMeasure make_measure(std::vector<double> weights);

struct DistanceHistogram {
    std::vector<double> edges;   // size bins+1, on [lo, hi]
    std::vector<double> masses;  // size bins, pair-mass per bin
    double total() const;
};

// m (x) m weighted histogram of pairwise distances, diagonal included.
// Default range [0, diameter]; an explicit range clamps distances into it.
DistanceHistogram distance_histogram(const FiniteMMSpace& space, int bins);
DistanceHistogram distance_histogram(const FiniteMMSpace& space, int bins, double lo, double hi);
DistanceHistogram distance_histogram(const FiniteMMSpace& space, const ProbMeasure& mu, int bins,
                                     double lo, double hi);

// Model space generators. All outputs pass validate_space in strict mode.
FiniteMMSpace circle(double circumference, int n);
FiniteMMSpace interval_model(double N, int n);
FiniteMMSpace sphere_fibonacci(int N, double radius, int n);
FiniteMMSpace product_space(const FiniteMMSpace& X, const FiniteMMSpace& Y,
                            int size_cap = 5000);

// Even-index subsample with renormalized masses; resolution-robustness reruns
// use this as the coarse stand-in for the same space.
FiniteMMSpace make_half_resolution(const FiniteMMSpace& space);

// Lightweight metric access used where a full distance table would not fit.
struct MetricView {
    int n = 0;
    const std::vector<double>* mass = nullptr;
    std::function<double(int, int)> dist;
};

MetricView view_of(const FiniteMMSpace& space);

}  // namespace ricci
