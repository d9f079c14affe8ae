#pragma once

// Independent reference for tiny transport problems: every vertex of the
// transportation polytope is supported on a spanning tree of the bipartite
// graph, so enumerating all arc subsets of size ns+nt-1 and resolving the
// flows by leaf peeling visits the exact optimum. Exponential, for tests only.

#include <cmath>
#include <limits>
#include <vector>

namespace ricci_test {

inline double ot_oracle(const std::vector<double>& cost, int ns, int nt,
                        const std::vector<double>& supply, const std::vector<double>& demand) {
    const int arcs = ns * nt;
    const int basis = ns + nt - 1;
    const int nodes = ns + nt;
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> comb(basis);
    for (int i = 0; i < basis; ++i) comb[i] = i;
    while (true) {
        std::vector<double> need(nodes);
        for (int i = 0; i < ns; ++i) need[i] = supply[i];
        for (int j = 0; j < nt; ++j) need[ns + j] = demand[j];
        std::vector<char> done(basis, 0);
        double total = 0.0;
        bool feasible = true;
        for (int remaining = basis; remaining > 0; --remaining) {
            int leaf_arc = -1, leaf_node = -1;
            for (int v = 0; v < nodes && leaf_arc < 0; ++v) {
                int cnt = 0, last = -1;
                for (int k = 0; k < basis; ++k) {
                    if (done[k]) continue;
                    const int r = comb[k] / nt, c = ns + comb[k] % nt;
                    if (r == v || c == v) {
                        ++cnt;
                        last = k;
                    }
                }
                if (cnt == 1) {
                    leaf_arc = last;
                    leaf_node = v;
                }
            }
            if (leaf_arc < 0) {  // a cycle, not a tree
                feasible = false;
                break;
            }
            const double f = need[leaf_node];
            if (f < -1e-12) {  // basis is infeasible
                feasible = false;
                break;
            }
            const int r = comb[leaf_arc] / nt, c = comb[leaf_arc] % nt;
            need[r] -= f;
            need[ns + c] -= f;
            total += std::max(0.0, f) * cost[static_cast<std::size_t>(r) * nt + c];
            done[leaf_arc] = 1;
        }
        if (feasible) {
            for (double v : need)
                if (std::abs(v) > 1e-9) {
                    feasible = false;
                    break;
                }
        }
        if (feasible && total < best) best = total;

        int i = basis - 1;
        while (i >= 0 && comb[i] == arcs - basis + i) --i;
        if (i < 0) break;
        ++comb[i];
        for (int j = i + 1; j < basis; ++j) comb[j] = comb[j - 1] + 1;
    }
    return best;
}

}  // namespace ricci_test
