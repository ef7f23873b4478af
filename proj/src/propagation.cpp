#include "coopeq/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "coopeq/errors.hpp"

namespace coopeq {

PropagationMatrix make_uniform_w(int n) {
    if (n < 1) throw InputError("propagation matrix needs at least one agent");
    PropagationMatrix W;
    W.n = n;
    W.w.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n),
               1.0 / static_cast<double>(n));
    return W;
}

PropagationMatrix make_offdiagonal_w(int n) {
    if (n < 2) throw InputError("off-diagonal propagation matrix needs at least two agents");
    PropagationMatrix W;
    W.n = n;
    W.w.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n),
               1.0 / static_cast<double>(n - 1));
    for (int i = 0; i < n; ++i) {
        W.w[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
            static_cast<std::size_t>(i)] = 0.0;
    }
    return W;
}

PropagationMatrix w_from_rows(const std::vector<std::vector<double>>& rows) {
    const int n = static_cast<int>(rows.size());
    if (n < 1) throw InputError("propagation matrix needs at least one row");
    PropagationMatrix W;
    W.n = n;
    W.w.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != n) {
            throw InputError("propagation matrix must be square");
        }
        for (double v : row) {
            if (!std::isfinite(v)) throw InputError("non-finite propagation weight");
            W.w.push_back(v);
        }
    }
    return W;
}

PropagationMatrix w_from_flat(int n, std::vector<double> flat) {
    if (n < 1) throw InputError("propagation matrix needs at least one row");
    if (static_cast<std::int64_t>(flat.size()) !=
        static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n)) {
        throw InputError("propagation matrix must be square");
    }
    for (double v : flat) {
        if (!std::isfinite(v)) throw InputError("non-finite propagation weight");
    }
    PropagationMatrix W;
    W.n = n;
    W.w = std::move(flat);
    return W;
}

namespace {

// Directed graph with edge j -> i whenever w_ij > 0.
std::vector<std::vector<int>> propagation_graph(const PropagationMatrix& W) {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(W.n));
    for (int j = 0; j < W.n; ++j) {
        for (int i = 0; i < W.n; ++i) {
            if (W.at(i, j) > 0.0) adj[static_cast<std::size_t>(j)].push_back(i);
        }
    }
    return adj;
}

// Kosaraju scc labeling; ids are assigned deterministically.
std::vector<int> strongly_connected_components(const std::vector<std::vector<int>>& adj,
                                               int* num_components) {
    const int n = static_cast<int>(adj.size());
    std::vector<std::vector<int>> radj(static_cast<std::size_t>(n));
    for (int u = 0; u < n; ++u) {
        for (int v : adj[static_cast<std::size_t>(u)]) {
            radj[static_cast<std::size_t>(v)].push_back(u);
        }
    }

    std::vector<int> order;
    order.reserve(static_cast<std::size_t>(n));
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (int start = 0; start < n; ++start) {
        if (seen[static_cast<std::size_t>(start)]) continue;
        // Iterative DFS recording finish order.
        std::vector<std::pair<int, std::size_t>> stack{{start, 0}};
        seen[static_cast<std::size_t>(start)] = 1;
        while (!stack.empty()) {
            auto& [u, next] = stack.back();
            if (next < adj[static_cast<std::size_t>(u)].size()) {
                const int v = adj[static_cast<std::size_t>(u)][next++];
                if (!seen[static_cast<std::size_t>(v)]) {
                    seen[static_cast<std::size_t>(v)] = 1;
                    stack.emplace_back(v, 0);
                }
            } else {
                order.push_back(u);
                stack.pop_back();
            }
        }
    }

    std::vector<int> comp(static_cast<std::size_t>(n), -1);
    int c = 0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        if (comp[static_cast<std::size_t>(*it)] != -1) continue;
        std::vector<int> stack{*it};
        comp[static_cast<std::size_t>(*it)] = c;
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (int v : radj[static_cast<std::size_t>(u)]) {
                if (comp[static_cast<std::size_t>(v)] == -1) {
                    comp[static_cast<std::size_t>(v)] = c;
                    stack.push_back(v);
                }
            }
        }
        ++c;
    }
    *num_components = c;
    return comp;
}

// Period of one scc: gcd over its internal edges u -> v of
// |level(u) + 1 - level(v)| with BFS levels. 0 means the component carries no
// cycle at all.
int component_period(const std::vector<std::vector<int>>& adj, const std::vector<int>& comp,
                     int target, int start) {
    const int n = static_cast<int>(adj.size());
    std::vector<int> level(static_cast<std::size_t>(n), -1);
    std::queue<int> q;
    q.push(start);
    level[static_cast<std::size_t>(start)] = 0;
    while (!q.empty()) {
        const int u = q.front();
        q.pop();
        for (int v : adj[static_cast<std::size_t>(u)]) {
            if (comp[static_cast<std::size_t>(v)] != target) continue;
            if (level[static_cast<std::size_t>(v)] == -1) {
                level[static_cast<std::size_t>(v)] = level[static_cast<std::size_t>(u)] + 1;
                q.push(v);
            }
        }
    }
    int g = 0;
    for (int u = 0; u < n; ++u) {
        if (comp[static_cast<std::size_t>(u)] != target) continue;
        for (int v : adj[static_cast<std::size_t>(u)]) {
            if (comp[static_cast<std::size_t>(v)] != target) continue;
            const int d = level[static_cast<std::size_t>(u)] + 1 - level[static_cast<std::size_t>(v)];
            g = std::gcd(g, std::abs(d));
        }
    }
    return g;
}

}  // namespace

ValidationReport validate_w(const PropagationMatrix& W) {
    if (W.n < 1 ||
        static_cast<std::int64_t>(W.w.size()) !=
            static_cast<std::int64_t>(W.n) * static_cast<std::int64_t>(W.n)) {
        throw InputError("propagation matrix must be square and non-empty");
    }

    ValidationReport rep;
    rep.nonnegative = true;
    for (double v : W.w) {
        if (!(v >= 0.0)) {
            rep.nonnegative = false;
            break;
        }
    }
    if (!rep.nonnegative) rep.failures.push_back("negative entry");

    rep.column_stochastic = true;
    for (int j = 0; j < W.n; ++j) {
        double s = 0.0;
        for (int i = 0; i < W.n; ++i) s += W.at(i, j);
        if (std::abs(s - 1.0) > kColumnSumTol) {
            rep.column_stochastic = false;
            rep.failures.push_back("column " + std::to_string(j + 1) + " sums to " +
                                   std::to_string(s));
            break;
        }
    }

    const auto adj = propagation_graph(W);
    int num_components = 0;
    const auto comp = strongly_connected_components(adj, &num_components);
    rep.irreducible = (num_components == 1);
    if (!rep.irreducible) {
        rep.failures.push_back("reducible: " + std::to_string(num_components) +
                               " strongly connected components");
    }

    rep.aperiodic = true;
    std::vector<int> first_node(static_cast<std::size_t>(num_components), -1);
    for (int u = 0; u < W.n; ++u) {
        auto& f = first_node[static_cast<std::size_t>(comp[static_cast<std::size_t>(u)])];
        if (f == -1) f = u;
    }
    for (int c = 0; c < num_components; ++c) {
        const int g = component_period(adj, comp, c, first_node[static_cast<std::size_t>(c)]);
        if (g > 1) {
            rep.aperiodic = false;
            rep.failures.push_back("component containing agent " +
                                   std::to_string(first_node[static_cast<std::size_t>(c)] + 1) +
                                   " has period " + std::to_string(g));
        }
    }

    return rep;
}

void require_stochastic(const PropagationMatrix& W) {
    if (W.n < 1 ||
        static_cast<std::int64_t>(W.w.size()) !=
            static_cast<std::int64_t>(W.n) * static_cast<std::int64_t>(W.n)) {
        throw ConfigError("propagation matrix must be square and non-empty");
    }
    for (double v : W.w) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw ConfigError("propagation matrix entries must be finite and nonnegative");
        }
    }
    for (int j = 0; j < W.n; ++j) {
        double s = 0.0;
        for (int i = 0; i < W.n; ++i) s += W.at(i, j);
        if (std::abs(s - 1.0) > kColumnSumTol) {
            throw ConfigError("propagation matrix column " + std::to_string(j + 1) +
                              " does not sum to 1");
        }
    }
}

double contraction_modulus(const PropagationMatrix& W, double lambda) {
    if (!(lambda >= 0.0)) throw ConfigError("lambda must be nonnegative");
    double worst = 0.0;
    for (int i = 0; i < W.n; ++i) {
        double row = 0.0;
        for (int j = 0; j < W.n; ++j) {
            if (j != i) row += W.at(i, j);
        }
        worst = std::max(worst, row);
    }
    return lambda * worst;
}

}  // namespace coopeq
