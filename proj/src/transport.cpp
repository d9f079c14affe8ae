#include "riccilab/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "riccilab/common.hpp"

namespace ricci {

std::vector<double> Coupling::row_marginal() const {
    std::vector<double> r(rows, 0.0);
    for (const auto& e : entries) r[e.i] += e.w;
    return r;
}

std::vector<double> Coupling::col_marginal() const {
    std::vector<double> c(cols, 0.0);
    for (const auto& e : entries) c[e.j] += e.w;
    return c;
}

double Coupling::cost(const std::vector<double>& c) const {
    double acc = 0.0;
    for (const auto& e : entries) acc += e.w * c[static_cast<std::size_t>(e.i) * cols + e.j];
    return acc;
}

namespace {

// Primal network simplex specialized to dense transportation problems.
// Tree rooted at source 0; potentials satisfy rc = c - pi[tail] + pi[head] = 0
// on tree arcs. All supplies and demands must be strictly positive.
class TransportSimplex {
public:
    TransportSimplex(const std::vector<double>& cost, int ns, int nt,
                     const std::vector<double>& a, const std::vector<double>& b)
        : c_(cost), ns_(ns), nt_(nt), n_(ns + nt), a_(a), b_(b) {
        pred_.assign(n_, -1);
        pred_arc_.assign(n_, -1);
        pred_dir_.assign(n_, 0);
        flow_.assign(n_, 0.0);
        depth_.assign(n_, 0);
        pi_.assign(n_, 0.0);
        kids_.assign(n_, {});
    }

    void run(OTResult& out) {
        init_northwest();
        double maxc = 0.0;
        for (double v : c_) maxc = std::max(maxc, std::abs(v));
        const double eps_enter = 1e-13 * std::max(1.0, maxc);
        const long long n_arcs = static_cast<long long>(ns_) * nt_;
        const long long block =
            std::max<long long>(64, static_cast<long long>(std::sqrt(static_cast<double>(n_arcs))));
        const long long pivot_cap = 20000 + 30LL * n_;

        long long pos = 0;
        long long pivots = 0;
        bool optimal = false;
        while (!optimal) {
            long long best = -1;
            double best_rc = -eps_enter;
            long long scanned = 0;
            while (scanned < n_arcs) {
                long long stop = std::min(block, n_arcs - scanned);
                for (long long s = 0; s < stop; ++s) {
                    long long k = pos;
                    pos = (pos + 1 == n_arcs) ? 0 : pos + 1;
                    ++scanned;
                    int i = static_cast<int>(k / nt_);
                    int j = static_cast<int>(k % nt_);
                    double rc = c_[k] - pi_[i] + pi_[ns_ + j];
                    if (rc < best_rc) {
                        best_rc = rc;
                        best = k;
                    }
                }
                if (best >= 0) break;
            }
            if (best < 0) {
                optimal = true;
                break;
            }
            if (++pivots > pivot_cap)
                throw std::runtime_error("exact_ot: pivot cap exceeded, instance too degenerate");
            pivot(best, best_rc);
        }

        out.pivots = static_cast<int>(pivots);
        out.converged = optimal;
        out.cost = 0.0;
        out.plan.rows = ns_;
        out.plan.cols = nt_;
        for (int x = 0; x < n_; ++x) {
            if (pred_[x] < 0) continue;
            long long k = pred_arc_[x];
            if (flow_[x] > 0.0) {
                int i = static_cast<int>(k / nt_);
                int j = static_cast<int>(k % nt_);
                out.plan.entries.push_back({i, j, flow_[x]});
                out.cost += flow_[x] * c_[k];
            }
        }
        out.u.resize(ns_);
        out.v.resize(nt_);
        for (int i = 0; i < ns_; ++i) out.u[i] = pi_[i];
        for (int j = 0; j < nt_; ++j) out.v[j] = -pi_[ns_ + j];
        double dual = 0.0;
        for (int i = 0; i < ns_; ++i) dual += a_[i] * out.u[i];
        for (int j = 0; j < nt_; ++j) dual += b_[j] * out.v[j];
        out.duality_gap = out.cost - dual;
    }

private:
    void attach(int node, int parent, long long arc, int dir, double fl) {
        pred_[node] = parent;
        pred_arc_[node] = arc;
        pred_dir_[node] = dir;
        flow_[node] = fl;
        kids_[parent].push_back(node);
    }

    void detach_from_parent(int node) {
        auto& k = kids_[pred_[node]];
        auto it = std::find(k.begin(), k.end(), node);
        k.erase(it);
    }

    // Staircase initial basis: spanning tree with ns+nt-1 arcs.
    void init_northwest() {
        struct Used {
            int i, j;
            double f;
        };
        std::vector<Used> used;
        used.reserve(n_ - 1);
        int i = 0, j = 0;
        double arem = a_[0], brem = b_[0];
        while (true) {
            double t = std::min(arem, brem);
            used.push_back({i, j, t});
            arem -= t;
            brem -= t;
            if (i == ns_ - 1 && j == nt_ - 1) break;
            if (arem <= 0.0 && i < ns_ - 1) {
                ++i;
                arem = a_[i];
            } else if (j < nt_ - 1) {
                ++j;
                brem = b_[j];
            } else {
                ++i;
                arem = a_[i];
            }
        }

        std::vector<std::vector<std::pair<int, long long>>> adj(n_);
        for (const auto& u : used) {
            long long k = static_cast<long long>(u.i) * nt_ + u.j;
            adj[u.i].push_back({ns_ + u.j, k});
            adj[ns_ + u.j].push_back({u.i, k});
        }
        std::vector<std::pair<long long, double>> flow_of;
        flow_of.reserve(used.size());
        for (const auto& u : used)
            flow_of.push_back({static_cast<long long>(u.i) * nt_ + u.j, u.f});
        std::sort(flow_of.begin(), flow_of.end());
        auto lookup = [&](long long k) {
            auto it = std::lower_bound(flow_of.begin(), flow_of.end(), std::make_pair(k, -1.0));
            return it->second;
        };

        pred_[0] = -1;
        depth_[0] = 0;
        pi_[0] = 0.0;
        std::vector<int> stack = {0};
        std::vector<char> seen(n_, 0);
        seen[0] = 1;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (auto [w, k] : adj[u]) {
                if (seen[w]) continue;
                seen[w] = 1;
                bool u_is_source = u < ns_;
                // arcs run source -> target; dir is +1 when the child is the tail
                int dir = (w < ns_) ? +1 : -1;
                attach(w, u, k, dir, lookup(k));
                depth_[w] = depth_[u] + 1;
                pi_[w] = u_is_source ? pi_[u] - c_[k] : pi_[u] + c_[k];
                stack.push_back(w);
            }
        }
        for (int x = 0; x < n_; ++x)
            if (!seen[x]) throw std::logic_error("exact_ot: initial basis is not spanning");
    }

    void pivot(long long e, double rc_e) {
        int u = static_cast<int>(e / nt_);
        int v = ns_ + static_cast<int>(e % nt_);

        int x = u, y = v;
        while (x != y) {
            if (depth_[x] > depth_[y])
                x = pred_[x];
            else if (depth_[y] > depth_[x])
                y = pred_[y];
            else {
                x = pred_[x];
                y = pred_[y];
            }
        }
        const int apex = x;

        // theta flows around the cycle u -> v via e; on the u side it runs
        // from the apex down to u, on the v side from v up to the apex
        double theta = std::numeric_limits<double>::infinity();
        int leave = -1, leave_side = 0;
        for (int w = u; w != apex; w = pred_[w])
            if (pred_dir_[w] == +1 && flow_[w] < theta) {
                theta = flow_[w];
                leave = w;
                leave_side = 1;
            }
        for (int w = v; w != apex; w = pred_[w])
            if (pred_dir_[w] == -1 && flow_[w] <= theta) {
                theta = flow_[w];
                leave = w;
                leave_side = 2;
            }
        if (leave < 0) throw std::logic_error("exact_ot: unbounded pivot cycle");

        for (int w = u; w != apex; w = pred_[w]) flow_[w] += (pred_dir_[w] == -1) ? theta : -theta;
        for (int w = v; w != apex; w = pred_[w]) flow_[w] += (pred_dir_[w] == +1) ? theta : -theta;
        flow_[leave] = 0.0;

        if (leave_side == 1)
            rehang(u, v, e, +1, theta, leave, rc_e);
        else
            rehang(v, u, e, -1, theta, leave, -rc_e);
    }

    // Reverse the path new_root .. cut, attach new_root below outside_parent
    // through the entering arc, then refresh depth and potentials of the
    // re-hung subtree.
    void rehang(int new_root, int outside_parent, long long arc, int dir, double fl, int cut,
                double dpi) {
        std::vector<int> path;
        for (int w = new_root;; w = pred_[w]) {
            path.push_back(w);
            if (w == cut) break;
        }
        struct Old {
            int pred;
            long long arc;
            int dir;
            double flow;
        };
        std::vector<Old> old(path.size());
        for (std::size_t k = 0; k < path.size(); ++k)
            old[k] = {pred_[path[k]], pred_arc_[path[k]], pred_dir_[path[k]], flow_[path[k]]};
        for (int w : path) detach_from_parent(w);

        attach(new_root, outside_parent, arc, dir, fl);
        for (std::size_t k = 1; k < path.size(); ++k)
            attach(path[k], path[k - 1], old[k - 1].arc, -old[k - 1].dir, old[k - 1].flow);

        std::vector<int> stack = {new_root};
        depth_[new_root] = depth_[outside_parent] + 1;
        while (!stack.empty()) {
            int w = stack.back();
            stack.pop_back();
            pi_[w] += dpi;
            for (int kid : kids_[w]) {
                depth_[kid] = depth_[w] + 1;
                stack.push_back(kid);
            }
        }
    }

    const std::vector<double>& c_;
    int ns_, nt_, n_;
    std::vector<double> a_, b_;
    // tree arrays indexed by node; sources are 0..ns-1, targets ns..ns+nt-1
    std::vector<int> pred_, pred_dir_, depth_;
    std::vector<long long> pred_arc_;
    std::vector<double> flow_, pi_;
    std::vector<std::vector<int>> kids_;
};

}  // namespace

OTResult exact_ot(const std::vector<double>& cost, int ns, int nt, std::vector<double> supply,
                  std::vector<double> demand) {
    require(ns >= 1 && nt >= 1, "exact_ot: empty marginal");
    require(static_cast<long long>(ns) * nt == static_cast<long long>(cost.size()),
            "exact_ot: cost size mismatch");
    require(static_cast<int>(supply.size()) == ns && static_cast<int>(demand.size()) == nt,
            "exact_ot: marginal size mismatch");

    double sa = std::accumulate(supply.begin(), supply.end(), 0.0);
    double sb = std::accumulate(demand.begin(), demand.end(), 0.0);
    require(sa > 0.0 && sb > 0.0, "exact_ot: zero-mass marginal");
    require(std::abs(sa - sb) <= 1e-9 * std::max(sa, sb),
            "exact_ot: supply and demand totals differ");

    double maxa = *std::max_element(supply.begin(), supply.end());
    double maxb = *std::max_element(demand.begin(), demand.end());
    std::vector<int> si, tj;
    for (int i = 0; i < ns; ++i)
        if (supply[i] > 1e-15 * maxa) si.push_back(i);
    for (int j = 0; j < nt; ++j)
        if (demand[j] > 1e-15 * maxb) tj.push_back(j);

    const int rs = static_cast<int>(si.size()), rt = static_cast<int>(tj.size());
    std::vector<double> a(rs), b(rt), c(static_cast<std::size_t>(rs) * rt);
    double ra = 0.0, rb = 0.0;
    for (int i = 0; i < rs; ++i) ra += (a[i] = supply[si[i]]);
    for (int j = 0; j < rt; ++j) rb += (b[j] = demand[tj[j]]);
    for (double& v : b) v *= ra / rb;  // match totals exactly on the reduced instance
    for (int i = 0; i < rs; ++i)
        for (int j = 0; j < rt; ++j)
            c[static_cast<std::size_t>(i) * rt + j] =
                cost[static_cast<std::size_t>(si[i]) * nt + tj[j]];

    OTResult red;
    TransportSimplex solver(c, rs, rt, a, b);
    solver.run(red);

    OTResult out;
    out.cost = red.cost;
    out.duality_gap = red.duality_gap;
    out.pivots = red.pivots;
    out.converged = red.converged;
    out.plan.rows = ns;
    out.plan.cols = nt;
    out.plan.entries.reserve(red.plan.entries.size());
    for (const auto& e : red.plan.entries) out.plan.entries.push_back({si[e.i], tj[e.j], e.w});
    out.u.assign(ns, 0.0);
    out.v.assign(nt, 0.0);
    for (int i = 0; i < rs; ++i) out.u[si[i]] = red.u[i];
    for (int j = 0; j < rt; ++j) out.v[tj[j]] = red.v[j];
    // pruned rows and columns get the tightest feasible dual value
    for (int j = 0; j < nt; ++j) {
        if (std::find(tj.begin(), tj.end(), j) != tj.end()) continue;
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < rs; ++i)
            best = std::min(best, cost[static_cast<std::size_t>(si[i]) * nt + j] - out.u[si[i]]);
        out.v[j] = best;
    }
    for (int i = 0; i < ns; ++i) {
        if (std::find(si.begin(), si.end(), i) != si.end()) continue;
        double best = std::numeric_limits<double>::infinity();
        for (int j = 0; j < rt; ++j)
            best = std::min(best, cost[static_cast<std::size_t>(i) * nt + tj[j]] - out.v[tj[j]]);
        out.u[i] = best;
    }
    return out;
}

namespace {

struct Support {
    std::vector<int> idx;
    std::vector<double> w;
};

Support prune_support(const ProbMeasure& mu, double rel) {
    double mx = 0.0;
    for (double v : mu.w) mx = std::max(mx, v);
    require(mx > 0.0, "transport: zero measure");
    Support s;
    double tot = 0.0;
    for (int i = 0; i < mu.n(); ++i)
        if (mu.w[i] > rel * mx) {
            s.idx.push_back(i);
            s.w.push_back(mu.w[i]);
            tot += mu.w[i];
        }
    for (double& v : s.w) v /= tot;
    return s;
}

}  // namespace

double wp_distance(const MetricView& view, const ProbMeasure& mu, const ProbMeasure& nu, double p,
                   const WpOptions& opts) {
    require(p >= 1.0, "wp_distance: p >= 1");
    require(mu.n() == view.n && nu.n() == view.n, "wp_distance: measure size mismatch");
    Support a = prune_support(mu, opts.prune_rel);
    Support b = prune_support(nu, opts.prune_rel);

    auto forced = [&](int x, const Support& other) {
        double acc = 0.0;
        for (std::size_t k = 0; k < other.idx.size(); ++k)
            acc += other.w[k] * std::pow(view.dist(x, other.idx[k]), p);
        return std::pow(acc, 1.0 / p);
    };
    if (a.idx.size() == 1) return forced(a.idx[0], b);
    if (b.idx.size() == 1) return forced(b.idx[0], a);

    const int ns = static_cast<int>(a.idx.size()), nt = static_cast<int>(b.idx.size());
    std::vector<double> cost(static_cast<std::size_t>(ns) * nt);
    for (int i = 0; i < ns; ++i)
        for (int j = 0; j < nt; ++j)
            cost[static_cast<std::size_t>(i) * nt + j] = std::pow(view.dist(a.idx[i], b.idx[j]), p);
    OTResult r = exact_ot(cost, ns, nt, a.w, b.w);
    return std::pow(std::max(0.0, r.cost), 1.0 / p);
}

double w1(const FiniteMMSpace& space, const ProbMeasure& mu, const ProbMeasure& nu) {
    return wp_distance(view_of(space), mu, nu, 1.0);
}

double w2(const FiniteMMSpace& space, const ProbMeasure& mu, const ProbMeasure& nu) {
    return wp_distance(view_of(space), mu, nu, 2.0);
}

SinkhornResult sinkhorn(const std::vector<double>& cost, int ns, int nt,
                        const std::vector<double>& mu, const std::vector<double>& nu,
                        double epsilon, const SinkhornOptions& opts) {
    require(ns >= 1 && nt >= 1, "sinkhorn: empty marginal");
    require(static_cast<long long>(ns) * nt == static_cast<long long>(cost.size()),
            "sinkhorn: cost size mismatch");
    require(epsilon > 0.0, "sinkhorn: epsilon > 0");

    std::vector<double> a(mu), b(nu);
    double sa = std::accumulate(a.begin(), a.end(), 0.0);
    double sb = std::accumulate(b.begin(), b.end(), 0.0);
    require(sa > 0.0 && sb > 0.0, "sinkhorn: zero-mass marginal");
    require(std::abs(sa - sb) <= 1e-9 * std::max(sa, sb),
            "sinkhorn: supply and demand totals differ");
    for (double& v : a) {
        require(v > 0.0, "sinkhorn: marginals must be strictly positive");
        v /= sa;
    }
    for (double& v : b) {
        require(v > 0.0, "sinkhorn: marginals must be strictly positive");
        v /= sb;
    }

    SinkhornResult res;
    res.f.assign(ns, 0.0);
    res.g.assign(nt, 0.0);
    std::vector<double> la(ns), lb(nt);
    for (int i = 0; i < ns; ++i) la[i] = std::log(a[i]);
    for (int j = 0; j < nt; ++j) lb[j] = std::log(b[j]);

    auto plan_entry = [&](int i, int j) {
        if (std::isinf(epsilon)) return a[i] * b[j];
        return std::exp((res.f[i] + res.g[j] - cost[static_cast<std::size_t>(i) * nt + j]) /
                        epsilon) *
               a[i] * b[j];
    };
    auto row_error = [&]() {
        double err = 0.0;
        for (int i = 0; i < ns; ++i) {
            double r = 0.0;
            for (int j = 0; j < nt; ++j) r += plan_entry(i, j);
            err += std::abs(r - a[i]);
        }
        return err;
    };

    if (std::isinf(epsilon)) {
        res.converged = true;
        res.marginal_error = 0.0;
    } else {
        std::vector<double> tmp(std::max(ns, nt));
        auto lse = [&](int count) {
            double mx = -std::numeric_limits<double>::infinity();
            for (int k = 0; k < count; ++k) mx = std::max(mx, tmp[k]);
            if (std::isinf(mx)) return mx;
            double s = 0.0;
            for (int k = 0; k < count; ++k) s += std::exp(tmp[k] - mx);
            return mx + std::log(s);
        };
        for (res.iterations = 1; res.iterations <= opts.max_iter; ++res.iterations) {
            for (int i = 0; i < ns; ++i) {
                const double* ci = &cost[static_cast<std::size_t>(i) * nt];
                for (int j = 0; j < nt; ++j) tmp[j] = (res.g[j] - ci[j]) / epsilon + lb[j];
                res.f[i] = -epsilon * lse(nt);
            }
            for (int j = 0; j < nt; ++j) {
                for (int i = 0; i < ns; ++i)
                    tmp[i] =
                        (res.f[i] - cost[static_cast<std::size_t>(i) * nt + j]) / epsilon + la[i];
                res.g[j] = -epsilon * lse(ns);
            }
            if (res.iterations % 5 == 0 || res.iterations == opts.max_iter) {
                res.marginal_error = row_error();
                if (res.marginal_error <= opts.tol) {
                    res.converged = true;
                    break;
                }
            }
        }
        if (!res.converged) res.marginal_error = row_error();
    }

    // raw cost, then marginal rounding: scale rows into mu, columns into nu,
    // and patch the residual with a rank-one term, so the result is the cost
    // of a genuine coupling
    std::vector<double> rsum(ns, 0.0), csum(nt, 0.0);
    double raw = 0.0;
    for (int i = 0; i < ns; ++i)
        for (int j = 0; j < nt; ++j) {
            double p = plan_entry(i, j);
            raw += p * cost[static_cast<std::size_t>(i) * nt + j];
            rsum[i] += p;
        }

    std::vector<double> alpha(ns), beta(nt);
    for (int i = 0; i < ns; ++i) alpha[i] = rsum[i] > 0.0 ? std::min(1.0, a[i] / rsum[i]) : 0.0;
    for (int j = 0; j < nt; ++j) {
        double cs = 0.0;
        for (int i = 0; i < ns; ++i) cs += alpha[i] * plan_entry(i, j);
        csum[j] = cs;
        beta[j] = cs > 0.0 ? std::min(1.0, b[j] / cs) : 0.0;
    }
    std::vector<double> er(ns, 0.0), ec(nt, 0.0);
    double cost_y = 0.0;
    for (int i = 0; i < ns; ++i) {
        double ry = 0.0;
        for (int j = 0; j < nt; ++j) {
            double y = alpha[i] * plan_entry(i, j) * beta[j];
            ry += y;
            cost_y += y * cost[static_cast<std::size_t>(i) * nt + j];
            ec[j] += y;
        }
        er[i] = std::max(0.0, a[i] - ry);
    }
    for (int j = 0; j < nt; ++j) ec[j] = std::max(0.0, b[j] - ec[j]);
    double S = std::accumulate(er.begin(), er.end(), 0.0);
    double Sc = std::accumulate(ec.begin(), ec.end(), 0.0);
    if (S > 0.0 && Sc > 0.0) {
        double patch = 0.0;
        for (int i = 0; i < ns; ++i) {
            if (er[i] == 0.0) continue;
            double row = 0.0;
            for (int j = 0; j < nt; ++j)
                row += ec[j] * cost[static_cast<std::size_t>(i) * nt + j];
            patch += er[i] * row;
        }
        cost_y += patch / Sc;
    }
    // iteration ran on probability vectors; costs go back to the caller's units
    res.raw_cost = raw * sa;
    res.rounded_cost = cost_y * sa;
    return res;
}

double product_coupling_cost(const ConeSpace& cone, const ProbMeasure& mu, const ProbMeasure& nu) {
    require(cone.K == 0.0, "product_coupling_cost: flat cones only");
    require(mu.n() == cone.n_points() && nu.n() == cone.n_points(),
            "product_coupling_cost: measure size mismatch");
    const int nb = cone.nb();
    auto radial_sq = [&](const ProbMeasure& m) {
        double acc = 0.0;
        for (int i = 1; i < cone.n_points(); ++i) {
            double r = cone.radius_of(i);
            acc += m.w[i] * r * r;
        }
        return acc;
    };
    auto first_moment_by_fiber = [&](const ProbMeasure& m) {
        std::vector<double> s(nb, 0.0);
        for (int i = 1; i < cone.n_points(); ++i) s[cone.base_of(i)] += m.w[i] * cone.radius_of(i);
        return s;
    };
    double r2 = radial_sq(mu) + radial_sq(nu);
    std::vector<double> sm = first_moment_by_fiber(mu), sn = first_moment_by_fiber(nu);
    double cross = 0.0;
    for (int x = 0; x < nb; ++x) {
        if (sm[x] == 0.0) continue;
        double row = 0.0;
        for (int y = 0; y < nb; ++y) row += sn[y] * cone.base_cos[static_cast<std::size_t>(x) * nb + y];
        cross += sm[x] * row;
    }
    return r2 - 2.0 * cross;
}

double verify_lipschitz(const MetricView& view, const std::vector<double>& phi,
                        long long max_pairs, std::uint64_t seed) {
    require(static_cast<int>(phi.size()) == view.n, "verify_lipschitz: size mismatch");
    const int n = view.n;
    double best = 0.0;
    auto check = [&](int i, int j) {
        double d = view.dist(i, j);
        if (d <= 0.0) return;
        best = std::max(best, std::abs(phi[i] - phi[j]) / d);
    };
    if (static_cast<long long>(n) * n <= max_pairs) {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) check(i, j);
    } else {
        std::mt19937_64 rng(mix_seed(seed, 41));
        std::uniform_int_distribution<int> pick(0, n - 1);
        for (long long k = 0; k < max_pairs; ++k) check(pick(rng), pick(rng));
    }
    return best;
}

KRBound kr_dual_bound(const MetricView& view, const ProbMeasure& mu, const ProbMeasure& nu,
                      const std::vector<double>& phi, double lip_claimed, long long max_pairs) {
    require(lip_claimed > 0.0, "kr_dual_bound: positive Lipschitz claim required");
    require(mu.n() == view.n && nu.n() == view.n, "kr_dual_bound: measure size mismatch");
    KRBound b;
    b.lip_measured = verify_lipschitz(view, phi, max_pairs);
    b.lip_normalizer = std::max(lip_claimed, b.lip_measured);
    double acc = 0.0;
    for (int i = 0; i < view.n; ++i) acc += (mu.w[i] - nu.w[i]) * phi[i];
    b.value = acc / b.lip_normalizer;
    return b;
}

std::vector<double> cone_dual_function(const ConeSpace& cone, int x0_base) {
    require(cone.K == 0.0, "cone_dual_function: flat cones only");
    require(x0_base >= 0 && x0_base < cone.nb(), "cone_dual_function: base index out of range");
    std::vector<double> phi(cone.n_points(), 0.0);
    const int nb = cone.nb();
    for (int i = 1; i < cone.n_points(); ++i)
        phi[i] = cone.radius_of(i) *
                 cone.base_cos[static_cast<std::size_t>(x0_base) * nb + cone.base_of(i)];
    return phi;
}

double wasserstein_1d(const std::vector<double>& x, const std::vector<double>& wx,
                      const std::vector<double>& y, const std::vector<double>& wy, double p) {
    require(p >= 1.0, "wasserstein_1d: p >= 1");
    require(x.size() == wx.size() && y.size() == wy.size(), "wasserstein_1d: size mismatch");
    auto pack = [](const std::vector<double>& v, const std::vector<double>& w) {
        std::vector<std::pair<double, double>> out;
        double tot = 0.0;
        for (std::size_t k = 0; k < v.size(); ++k)
            if (w[k] > 0.0) {
                out.push_back({v[k], w[k]});
                tot += w[k];
            }
        require(tot > 0.0, "wasserstein_1d: zero measure");
        std::sort(out.begin(), out.end());
        for (auto& e : out) e.second /= tot;
        return out;
    };
    auto A = pack(x, wx), B = pack(y, wy);

    double acc = 0.0, u = 0.0;
    std::size_t i = 0, j = 0;
    double ca = A[0].second, cb = B[0].second;
    while (i < A.size() && j < B.size()) {
        double next = std::min(ca, cb);
        double seg = next - u;
        if (seg > 0.0) acc += seg * std::pow(std::abs(A[i].first - B[j].first), p);
        u = next;
        if (ca <= cb) {
            ++i;
            if (i < A.size()) ca += A[i].second;
        } else {
            ++j;
            if (j < B.size()) cb += B[j].second;
        }
    }
    return std::pow(acc, 1.0 / p);
}

}  // namespace ricci
