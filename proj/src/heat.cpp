#include "riccilab/heat.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>

#include "riccilab/common.hpp"

namespace ricci {

namespace {

std::string g_cache_dir;

std::uint64_t hash_bytes(std::uint64_t h, const void* data, std::size_t len) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t model_hash(const HeatModel& m) {
    std::uint64_t h = 1469598103934665603ULL;
    h = hash_bytes(h, m.kind.data(), m.kind.size());
    h = hash_bytes(h, &m.n, sizeof(m.n));
    h = hash_bytes(h, &m.eps, sizeof(m.eps));
    h = hash_bytes(h, m.mass.data(), m.mass.size() * sizeof(double));
    if (!m.sparse) h = hash_bytes(h, m.B.data(), static_cast<std::size_t>(m.n) * m.n * sizeof(double));
    return h;
}

bool load_spectral(const std::string& path, int n, HeatModel::Spectral& s) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::uint64_t magic = 0;
    std::int64_t fn = 0;
    in.read(reinterpret_cast<char*>(&magic), sizeof(magic));
    in.read(reinterpret_cast<char*>(&fn), sizeof(fn));
    if (!in || magic != 0x52435350454331ULL || fn != n) return false;
    s.lam.resize(n);
    s.V.resize(n, n);
    in.read(reinterpret_cast<char*>(s.lam.data()), n * sizeof(double));
    in.read(reinterpret_cast<char*>(s.V.data()), static_cast<std::streamsize>(
                                                     static_cast<std::size_t>(n) * n * sizeof(double)));
    return static_cast<bool>(in);
}

void store_spectral(const std::string& path, const HeatModel::Spectral& s) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) return;
        std::uint64_t magic = 0x52435350454331ULL;
        std::int64_t n = s.lam.size();
        out.write(reinterpret_cast<const char*>(&magic), sizeof(magic));
        out.write(reinterpret_cast<const char*>(&n), sizeof(n));
        out.write(reinterpret_cast<const char*>(s.lam.data()), n * sizeof(double));
        out.write(reinterpret_cast<const char*>(s.V.data()),
                  static_cast<std::streamsize>(static_cast<std::size_t>(n) * n * sizeof(double)));
        if (!out) return;
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
}

const HeatModel::Spectral& dense_spectral(const HeatModel& m) {
    if (m.spectral) return *m.spectral;
    auto s = std::make_shared<HeatModel::Spectral>();
    std::string cache_path;
    if (!g_cache_dir.empty()) {
        cache_path = g_cache_dir + "/spectral_" + hex64(model_hash(m)) + ".bin";
        if (load_spectral(cache_path, m.n, *s)) {
            m.spectral = s;
            return *m.spectral;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.B);
    require(es.info() == Eigen::Success, "heat: eigendecomposition failed");
    s->lam = es.eigenvalues();
    s->V = es.eigenvectors();
    if (!cache_path.empty()) store_spectral(cache_path, *s);
    m.spectral = s;
    return *m.spectral;
}

// exp(t T) e_1 for the Lanczos tridiagonal, via its small dense spectrum
Eigen::VectorXd expm_tridiag_e1(const std::vector<double>& alpha, const std::vector<double>& beta,
                                double t) {
    const int k = static_cast<int>(alpha.size());
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) {
        T(i, i) = alpha[i];
        if (i + 1 < k) T(i, i + 1) = T(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    Eigen::VectorXd coeff = es.eigenvectors().row(0).transpose();
    Eigen::VectorXd scaled(k);
    for (int i = 0; i < k; ++i) scaled(i) = coeff(i) * std::exp(t * es.eigenvalues()(i));
    return es.eigenvectors() * scaled;
}

// One Krylov basis per start vector, shared across all requested times.
void lanczos_expm(const Eigen::SparseMatrix<double>& B, const Eigen::VectorXd& w0,
                  const std::vector<double>& ts, const FlowOptions& opts,
                  std::vector<Eigen::VectorXd>& out) {
    const int n = static_cast<int>(w0.size());
    const double nrm = w0.norm();
    out.assign(ts.size(), Eigen::VectorXd::Zero(n));
    if (nrm == 0.0) return;
    const int cap = std::min(opts.lanczos_cap, n);
    double tmax = 0.0;
    for (double t : ts) tmax = std::max(tmax, t);

    Eigen::MatrixXd V(n, cap);
    std::vector<double> alpha, beta;
    V.col(0) = w0 / nrm;
    int k = 0;
    bool happy = false;
    while (k < cap) {
        Eigen::VectorXd u = B * V.col(k);
        double a = V.col(k).dot(u);
        alpha.push_back(a);
        u -= a * V.col(k);
        if (k > 0) u -= beta[k - 1] * V.col(k - 1);
        // full reorthogonalization keeps the basis usable at large k
        u -= V.leftCols(k + 1) * (V.leftCols(k + 1).transpose() * u);
        double b = u.norm();
        ++k;
        if (b <= 1e-14 * nrm) {
            happy = true;
            break;
        }
        if (k < cap) {
            beta.push_back(b);
            V.col(k) = u / b;
        } else {
            beta.push_back(b);
        }
        if (k % 30 == 0 || k == cap) {
            Eigen::VectorXd e = expm_tridiag_e1(alpha, std::vector<double>(beta.begin(),
                                                                           beta.begin() + (k - 1)),
                                                tmax);
            // residual gauged against the surviving solution norm; a strongly
            // decaying flow shrinks ||e|| exponentially and an absolute gate
            // stops while the Krylov reach still sits inside the support
            double err = std::abs(beta[k - 1] * e(k - 1)) / std::max(e.norm(), 1e-280);
            if (err < opts.lanczos_tol) break;
        }
    }
    const int kk = static_cast<int>(alpha.size());
    std::vector<double> bet(beta.begin(), beta.begin() + (kk - 1));
    for (std::size_t q = 0; q < ts.size(); ++q) {
        Eigen::VectorXd e = expm_tridiag_e1(alpha, bet, ts[q]);
        out[q] = nrm * (V.leftCols(kk) * e);
    }
    (void)happy;
}

}  // namespace

void set_spectral_cache_dir(const std::string& dir) { g_cache_dir = dir; }

double mean_nn_distance(const MetricView& view) {
    require(view.n >= 2, "mean_nn_distance: need >= 2 points");
    double acc = 0.0;
    for (int i = 0; i < view.n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (int j = 0; j < view.n; ++j) {
            if (j == i) continue;
            best = std::min(best, view.dist(i, j));
        }
        acc += best;
    }
    return acc / view.n;
}

HeatModel build_generator_graph(const MetricView& view, const GraphGeneratorOptions& opts) {
    const int n = view.n;
    require(n >= 2, "build_generator_graph: need >= 2 points");
    const std::vector<double>& m = *view.mass;
    for (double v : m) require(v > 0.0, "build_generator_graph: masses must be positive");

    HeatModel model;
    model.n = n;
    model.kind = "graph";
    model.mass = m;
    double eps = opts.eps;
    if (eps <= 0.0) {
        double nn = mean_nn_distance(view);
        eps = nn * nn;
    }
    require(eps > 0.0, "build_generator_graph: eps > 0");
    model.eps = eps;

    if (n <= opts.dense_limit) {
        model.sparse = false;
        Eigen::MatrixXd Km(n, n);
        for (int i = 0; i < n; ++i) {
            Km(i, i) = 1.0;
            for (int j = i + 1; j < n; ++j) {
                double d = view.dist(i, j);
                double k = std::exp(-d * d / (4.0 * eps));
                Km(i, j) = k;
                Km(j, i) = k;
            }
        }
        Eigen::VectorXd q(n), deg(n);
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j < n; ++j) s += Km(i, j) * m[j];
            q(i) = s;
        }
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j < n; ++j) s += Km(i, j) / (q(i) * q(j)) * m[j];
            deg(i) = s;
        }
        model.B.resize(n, n);
        for (int i = 0; i < n; ++i) {
            double diag = 0.0;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                double lij = Km(i, j) / (q(i) * q(j)) * m[j] / (eps * std::sqrt(deg(i) * deg(j)));
                model.B(i, j) = lij * std::sqrt(m[i] / m[j]);
                diag -= lij;
            }
            model.B(i, i) = diag;
        }
        // symmetrize away the last rounding bit
        model.B = 0.5 * (model.B + model.B.transpose()).eval();
        return model;
    }

    model.sparse = true;
    const double dcut2 = -4.0 * eps * std::log(opts.kernel_cutoff);
    auto kernel = [&](int i, int j, double& k) {
        double d = view.dist(i, j);
        if (d * d > dcut2) return false;
        k = std::exp(-d * d / (4.0 * eps));
        return true;
    };

    // wide bandwidths keep most pairs above the cutoff, so edge lists would
    // dwarf the matrix itself; stream the normalization sums pair by pair and
    // assemble straight into compressed storage
    std::vector<double> q(n), deg(n);
    for (int i = 0; i < n; ++i) q[i] = m[i];  // self kernel is 1
    double k = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (kernel(i, j, k)) {
                q[i] += k * m[j];
                q[j] += k * m[i];
            }
    for (int i = 0; i < n; ++i) deg[i] = m[i] / (q[i] * q[i]);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (kernel(i, j, k)) {
                deg[i] += k / (q[i] * q[j]) * m[j];
                deg[j] += k / (q[j] * q[i]) * m[i];
            }

    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int u) {
        while (parent[u] != u) {
            parent[u] = parent[parent[u]];
            u = parent[u];
        }
        return u;
    };
    Eigen::VectorXi per_col = Eigen::VectorXi::Ones(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double d = view.dist(i, j);
            if (d * d > dcut2) continue;
            ++per_col(i);
            ++per_col(j);
            parent[find(i)] = find(j);
        }
    if (opts.require_connected)
        for (int i = 0; i < n; ++i)
            require(find(i) == find(0),
                    "build_generator_graph: kernel graph is disconnected at this bandwidth");

    model.Bs.resize(n, n);
    model.Bs.reserve(per_col);
    std::vector<double> diag(n, 0.0);
    for (int i = 0; i < n; ++i) {
        // columns fill with ascending rows: earlier outer loops contributed
        // rows below i, the diagonal lands here, then j > i follows
        model.Bs.insert(i, i) = 0.0;
        for (int j = i + 1; j < n; ++j)
            if (kernel(i, j, k)) {
                double v = k * std::sqrt(m[i] * m[j]) /
                           (q[i] * q[j] * eps * std::sqrt(deg[i] * deg[j]));
                model.Bs.insert(i, j) = v;
                model.Bs.insert(j, i) = v;
                diag[i] -= v * std::sqrt(m[j] / m[i]);
                diag[j] -= v * std::sqrt(m[i] / m[j]);
            }
    }
    for (int i = 0; i < n; ++i) model.Bs.coeffRef(i, i) = diag[i];
    model.Bs.makeCompressed();
    return model;
}

HeatModel build_generator_graph(const FiniteMMSpace& space, const GraphGeneratorOptions& opts) {
    return build_generator_graph(view_of(space), opts);
}

HeatModel build_generator_sturm(const std::function<double(double)>& weight,
                                const RadialGrid& grid) {
    const int n = grid.cells();
    require(n >= 2, "build_generator_sturm: need >= 2 cells");
    HeatModel model;
    model.n = n;
    model.kind = "sturm";

    std::vector<double> node(n), mass(n);
    for (int k = 0; k < n; ++k) {
        node[k] = 0.5 * (grid.edges[k] + grid.edges[k + 1]);
        mass[k] = integrate(weight, grid.edges[k], grid.edges[k + 1], 1e-12).value;
        require(mass[k] > 0.0, "build_generator_sturm: cell with zero weight mass");
    }
    model.mass = mass;

    // conductance through interior edges gives exact detailed balance; the
    // dense limit is generous because stiff grids (tiny cells) need the full
    // spectrum rather than a Krylov approximation
    model.sparse = n > 2048;
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::MatrixXd Bd;
    if (!model.sparse) Bd = Eigen::MatrixXd::Zero(n, n);
    std::vector<double> diag(n, 0.0);
    for (int k = 0; k + 1 < n; ++k) {
        double cond = weight(grid.edges[k + 1]) / (node[k + 1] - node[k]);
        double l_right = cond / mass[k];      // L_{k,k+1}
        double l_left = cond / mass[k + 1];   // L_{k+1,k}
        double b = cond / std::sqrt(mass[k] * mass[k + 1]);
        diag[k] -= l_right;
        diag[k + 1] -= l_left;
        if (model.sparse) {
            trip.push_back({k, k + 1, b});
            trip.push_back({k + 1, k, b});
        } else {
            Bd(k, k + 1) = b;
            Bd(k + 1, k) = b;
        }
    }
    if (model.sparse) {
        for (int k = 0; k < n; ++k) trip.push_back({k, k, diag[k]});
        model.Bs.resize(n, n);
        model.Bs.setFromTriplets(trip.begin(), trip.end());
    } else {
        for (int k = 0; k < n; ++k) Bd(k, k) = diag[k];
        model.B = Bd;
    }
    return model;
}

std::vector<double> apply_B(const HeatModel& model, const std::vector<double>& x) {
    require(static_cast<int>(x.size()) == model.n, "apply_B: size mismatch");
    Eigen::Map<const Eigen::VectorXd> xv(x.data(), model.n);
    Eigen::VectorXd y = model.sparse ? Eigen::VectorXd(model.Bs * xv) : Eigen::VectorXd(model.B * xv);
    return std::vector<double>(y.data(), y.data() + model.n);
}

std::vector<double> dense_spectrum(const HeatModel& model) {
    require(!model.sparse, "dense_spectrum: dense models only");
    const auto& s = dense_spectral(model);
    return std::vector<double>(s.lam.data(), s.lam.data() + model.n);
}

std::vector<ProbMeasure> heat_measure(const HeatModel& model, const ProbMeasure& mu0,
                                      const std::vector<double>& ts, const FlowOptions& opts) {
    require(mu0.n() == model.n, "heat_measure: measure size mismatch");
    for (double t : ts) require(t >= 0.0, "heat_measure: t >= 0");
    const double total0 = mu0.sum();
    require(total0 > 0.0, "heat_measure: zero start measure");

    Eigen::VectorXd w0(model.n);
    for (int i = 0; i < model.n; ++i) {
        if (mu0.w[i] != 0.0)
            require(model.mass[i] > 0.0, "heat_measure: start charges a zero-mass point");
        w0(i) = model.mass[i] > 0.0 ? mu0.w[i] / std::sqrt(model.mass[i]) : 0.0;
    }

    std::vector<Eigen::VectorXd> wt(ts.size());
    if (model.sparse) {
        lanczos_expm(model.Bs, w0, ts, opts, wt);
    } else {
        const auto& sp = dense_spectral(model);
        Eigen::VectorXd proj = sp.V.transpose() * w0;
        for (std::size_t q = 0; q < ts.size(); ++q) {
            Eigen::VectorXd scaled(model.n);
            for (int i = 0; i < model.n; ++i) scaled(i) = proj(i) * std::exp(ts[q] * sp.lam(i));
            wt[q] = sp.V * scaled;
        }
    }

    std::vector<ProbMeasure> out(ts.size());
    for (std::size_t q = 0; q < ts.size(); ++q) {
        std::vector<double> nu(model.n);
        double tot = 0.0;
        for (int i = 0; i < model.n; ++i) {
            double v = std::sqrt(std::max(0.0, model.mass[i])) * wt[q](i);
            if (opts.clamp_negative) v = std::max(0.0, v);
            nu[i] = v;
            tot += v;
        }
        require(tot > 0.0, "heat_measure: flow lost all mass");
        for (double& v : nu) v *= total0 / tot;
        out[q].w = std::move(nu);
    }
    return out;
}

ProbMeasure heat_measure(const HeatModel& model, const ProbMeasure& mu0, double t,
                         const FlowOptions& opts) {
    return heat_measure(model, mu0, std::vector<double>{t}, opts)[0];
}

RadialLaw bessel_radial_law(double N, double r0, const std::vector<double>& ts,
                            const RadialGrid& grid, const FlowOptions& opts) {
    require(N >= 0.0, "bessel_radial_law: N >= 0");
    require(r0 >= 0.0 && r0 <= grid.rmax(), "bessel_radial_law: r0 inside the grid");
    RadialLaw law;
    law.N = N;
    law.r0 = r0;
    law.grid = grid;
    law.t = ts;

    HeatModel model = build_generator_sturm([N](double r) { return std::pow(r, N); }, grid);
    const int n = model.n;
    law.node_r.resize(n);
    for (int k = 0; k < n; ++k) law.node_r[k] = 0.5 * (grid.edges[k] + grid.edges[k + 1]);

    int start = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k)
        if (std::abs(law.node_r[k] - r0) < best) {
            best = std::abs(law.node_r[k] - r0);
            start = k;
        }
    ProbMeasure delta = dirac(n, start);

    std::vector<ProbMeasure> flows = heat_measure(model, delta, ts, opts);
    for (const ProbMeasure& nu : flows) {
        double m1 = 0.0, m2 = 0.0;
        for (int k = 0; k < n; ++k) {
            m1 += nu.w[k] * law.node_r[k];
            m2 += nu.w[k] * law.node_r[k] * law.node_r[k];
        }
        law.nu.push_back(nu.w);
        law.first_moment.push_back(m1);
        law.second_moment.push_back(m2);
        law.boundary_mass.push_back(nu.w[n - 1]);
    }
    return law;
}

std::vector<ProbMeasure> vertex_heat_measure(const ConeSpace& cone, const std::vector<double>& ts,
                                             const VertexHeatOptions& opts) {
    require(!ts.empty(), "vertex_heat_measure: no times");
    double tmin = *std::min_element(ts.begin(), ts.end());
    require(tmin > 0.0, "vertex_heat_measure: t > 0");

    double h = opts.subcell;
    if (h <= 0.0) h = std::sqrt(2.0 * tmin) / 16.0;

    // refine the cone's radial cells so aggregation back is exact
    const auto& E = cone.grid.edges;
    std::vector<double> fine = {0.0};
    std::vector<int> parent_of_cell;  // fine cell -> cone cell
    for (std::size_t c = 0; c + 1 < E.size(); ++c) {
        double w = E[c + 1] - E[c];
        int pieces = std::max(1, static_cast<int>(std::ceil(w / h)));
        if (static_cast<long long>(fine.size()) + pieces > opts.max_fine_cells)
            pieces = std::max(1, static_cast<int>(opts.max_fine_cells - fine.size()));
        for (int p = 1; p <= pieces; ++p) {
            fine.push_back(E[c] + w * p / pieces);
            parent_of_cell.push_back(static_cast<int>(c));
        }
        fine.back() = E[c + 1];
    }

    RadialGrid fgrid = custom_grid(fine);
    const double K = cone.K, N = cone.N;
    auto weight = [K, N](double r) { return std::pow(std::max(0.0, s_kappa(K, r)), N); };
    HeatModel model = build_generator_sturm(weight, fgrid);
    ProbMeasure delta = dirac(model.n, 0);
    std::vector<ProbMeasure> flows = heat_measure(model, delta, ts, opts.flow);

    const int nb = cone.nb();
    const double base_total = cone.base.total_mass();
    const int cells = cone.grid.cells();
    std::vector<ProbMeasure> out(ts.size());
    for (std::size_t q = 0; q < ts.size(); ++q) {
        std::vector<double> w(cone.n_points(), 0.0);
        for (int fc = 0; fc < model.n; ++fc) {
            int cc = parent_of_cell[fc];
            double mass = flows[q].w[fc];
            if (mass == 0.0) continue;
            if (cc == 0) {
                w[0] += mass;
            } else if (cone.has_far_pole && cc == cells - 1) {
                w[cone.far_pole()] += mass;
            } else {
                for (int b = 0; b < nb; ++b)
                    w[cone.index_of(cc - 1, b)] += mass * cone.base.mass[b] / base_total;
            }
        }
        out[q] = make_measure(std::move(w));
    }
    return out;
}

ProbMeasure vertex_heat_measure(const ConeSpace& cone, double t, const VertexHeatOptions& opts) {
    return vertex_heat_measure(cone, std::vector<double>{t}, opts)[0];
}

}  // namespace ricci
