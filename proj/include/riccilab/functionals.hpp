#pragma once

// Mean-distance functionals, sharp model values, cosine potentials,
// relative entropy, and rigidity diagnostics.

#include <string>
#include <vector>

#include "riccilab/geometry.hpp"
#include "riccilab/mmspace.hpp"

namespace ricci {

// Scalar function applied to distances. Custom kernels are piecewise linear
// on a strictly increasing node table and must be monotone; evaluation clamps
// to the table range.
struct KernelFunction {
    enum class Kind { id, square, cos, custom };
    Kind kind = Kind::id;
    std::vector<double> xs;
    std::vector<double> ys;

    double operator()(double d) const;
    std::string name() const;

    static KernelFunction identity();
    static KernelFunction square();
    static KernelFunction cosine();
    static KernelFunction custom(std::vector<double> xs, std::vector<double> ys);
};

// Mean value of f(d) under the product of the normalized reference measure
// with itself. Diagonal pairs are included.
double m_f(const MetricView& view, const KernelFunction& f);
double m_f(const FiniteMMSpace& space, const KernelFunction& f);
double m_f(const ConeSpace& cone, const KernelFunction& f);

// Sharp comparison value: the mean of f under the distance law of the
// N-model, i.e. integral of f(t) sin^(N-1)(t) over [0,pi], normalized.
// quad_points sets the initial composite quadrature resolution.
double m_f_star(double N, const KernelFunction& f, int quad_points = 128);

// Average of cos(d(x0, .) ^ pi) against the normalized reference measure.
double cos_potential(const FiniteMMSpace& space, int x0);
std::vector<double> cos_potential_all(const FiniteMMSpace& space);

// Relative entropy of mu with respect to the raw reference masses:
// sum mu_i log(mu_i / m_i), with 0 log 0 = 0 and +infinity whenever mu
// charges a point of zero reference mass.
double entropy(const ProbMeasure& mu, const std::vector<double>& ref_mass);
double entropy(const ProbMeasure& mu, const FiniteMMSpace& space);

// How far a space sits from the N-model: gap of M_f below/above the sharp
// value, and the L1 mismatch between the distance law and the model law
// sin^(N-1) on [0,pi] (distance mass beyond pi counts fully as mismatch).
struct RigidityReport {
    double m_value = 0.0;
    double m_star = 0.0;
    double gap = 0.0;  // m_star - m_value
    double hist_l1 = 0.0;
    int bins = 0;
};

RigidityReport rigidity_report(const FiniteMMSpace& space, const KernelFunction& f, double N,
                               int bins = 64);

}  // namespace ricci
