#pragma once

#include <string>
#include <vector>

#include "riccilab/mmspace.hpp"

namespace ricci {

// Comparison functions: sin/linear/sinh branches, continuous in kappa at 0.
double s_kappa(double kappa, double theta);
// theta-derivative of s_kappa.
double c_kappa(double kappa, double theta);

// Distortion coefficient sigma^(t)_kappa(theta); +infinity when
// kappa*theta^2 >= pi^2 (returned as std::numeric_limits infinity).
double sigma_coeff(double t, double kappa, double theta);

// tau^(t)_{K,N}(theta) = t^{1/N} * sigma^(t)_{K/(N-1)}(theta)^{1-1/N}; N > 1.
double tau_coeff(double t, double K, double N, double theta);

// Radial cell partition: edges[0] = 0 < edges[1] < ... < edges[m].
struct RadialGrid {
    std::vector<double> edges;
    int cells() const { return static_cast<int>(edges.size()) - 1; }
    double rmax() const { return edges.back(); }
};

RadialGrid linear_grid(int cells, double rmax);
// Geometric spacing: edges 0, first, first*rho, ..., rmax.
RadialGrid geometric_grid(int cells, double first, double rmax);
RadialGrid custom_grid(std::vector<double> edges);
// "lin:m:R" or "geo:m:a:b".
RadialGrid parse_grid(const std::string& spec);

// Cone over a base space. Point 0 is the collapsed vertex (the whole first
// radial cell); interior points are (layer, base point) with the layer node
// at its cell midpoint; for K>0 a grid reaching pi/sqrt(K) collapses the last
// cell to a far pole. Distances are computed on demand; the full table is
// only materialized through as_finite.
struct ConeSpace {
    FiniteMMSpace base;
    double K = 0.0;
    double N = 1.0;
    RadialGrid grid;
    bool has_far_pole = false;
    bool base_clamped = false;       // base diameter exceeded pi, cos(d ^ pi) clamp active
    std::vector<double> node_r;      // per interior layer
    std::vector<double> radial_cell_mass;  // per grid cell, integral of s_K(r)^N
    std::vector<double> mass;        // per cone point, total 1
    std::vector<double> base_cos;    // cos(d_X ^ pi), row-major nb*nb

    int nb() const { return base.n; }
    int layers() const { return static_cast<int>(node_r.size()); }
    int n_points() const { return 1 + layers() * nb() + (has_far_pole ? 1 : 0); }
    int vertex() const { return 0; }
    int far_pole() const { return has_far_pole ? n_points() - 1 : -1; }
    int index_of(int layer, int x) const { return 1 + layer * nb() + x; }
    bool is_vertex(int idx) const { return idx == 0; }
    bool is_far_pole(int idx) const { return has_far_pole && idx == n_points() - 1; }
    // Radius of the point (0 at vertex, pi/sqrt(K) at the far pole).
    double radius_of(int idx) const;
    // Base index, or -1 for vertex / far pole.
    int base_of(int idx) const;
    double dist(int i, int j) const;
    double max_radius() const;

    FiniteMMSpace as_finite(long long point_cap = 9000) const;
    MetricView metric_view() const;
};

ConeSpace build_cone(const FiniteMMSpace& base, double K, double N, const RadialGrid& grid);
// (1,N)-cone on a grid over [0, pi].
ConeSpace suspension(const FiniteMMSpace& base, double N, const RadialGrid& grid);

// Pushforward of mu under (s,y) -> (lambda*s, y) on a flat cone, spreading
// each radial cell uniformly and re-collecting by overlap length. Mass pushed
// past the last edge stays in the last cell and is reported via clipped.
ProbMeasure homothety_pushforward(const ConeSpace& cone, const ProbMeasure& mu, double lambda,
                                  double* clipped = nullptr);

struct ComparisonProfile {
    std::vector<double> r;
    std::vector<double> v;             // closed-ball mass
    std::vector<double> model_volume;  // integral_0^r s_{K/(N-1)}^{N-1}
    std::vector<double> margin;        // v(r)/v(R) - model ratio
    std::vector<double> shell;         // symmetric difference quotient of v (diagnostic only)
    std::vector<double> model_sphere;  // s_{K/(N-1)}(r)^{N-1}
    double R = 0.0;
    double worst_margin = 0.0;
    double max_abs_margin = 0.0;
    int empty_balls = 0;
};

ComparisonProfile bishop_gromov_check(const FiniteMMSpace& space, int x0, double K, double N,
                                      const std::vector<double>& r_grid);

}  // namespace ricci
