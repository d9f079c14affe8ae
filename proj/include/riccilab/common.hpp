#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ricci {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Gauss-Legendre nodes and weights on [-1,1], computed once per order and cached.
struct QuadRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const QuadRule& gauss_legendre(int order);

struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0;  // |last panel refinement delta|
    int panels = 0;
};

// Composite Gauss-Legendre with panel doubling until successive values agree.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double rel_tol = 1e-12, int max_doublings = 14);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms_residual = 0.0;
    double max_residual = 0.0;
    double r_squared = 0.0;
};
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Fits y = c * x^p via regression on (log x, log y); all inputs must be positive.
LinearFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

// Rank correlation with average ranks on ties.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

// FNV-1a, used for config fingerprints.
std::uint64_t fnv1a64(const std::string& s);
std::string hex64(std::uint64_t v);

// Deterministic stream seeding: splitmix of (seed, stream) so parallel
// consumers never share a generator.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// Deterministic static partition; fn(i) must only write state owned by index i.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, int threads = 1);

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace ricci
