#include "qem/adjacency.hpp"

#include <algorithm>
#include <functional>

#include "qem/errors.hpp"
#include "qem/formulas.hpp"

namespace qem {

std::optional<double> AdjacencyGraph::c_g() const {
    if (max_degree < 3) return std::nullopt;
    return c_graph(static_cast<int>(max_degree));
}

AdjacencyGraph build_adjacency(const QuantumExpanderCode& code) {
    AdjacencyGraph g;
    g.n = code.n;
    g.adj.assign(code.n, {});
    auto add_rows = [&](const SparseBitMatrix& m) {
        for (std::size_t r = 0; r < m.rows(); ++r) {
            const auto& s = m.row_support(r);
            for (std::size_t i = 0; i < s.size(); ++i)
                for (std::size_t j = i + 1; j < s.size(); ++j) {
                    g.adj[s[i]].push_back(s[j]);
                    g.adj[s[j]].push_back(s[i]);
                }
        }
    };
    add_rows(code.h_x);
    add_rows(code.h_z);
    for (auto& nb : g.adj) {
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
        g.max_degree = std::max<unsigned>(g.max_degree, static_cast<unsigned>(nb.size()));
    }
    return g;
}

AdjacencyGraph make_graph(std::size_t n,
                          const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
    AdjacencyGraph g;
    g.n = n;
    g.adj.assign(n, {});
    for (auto [u, v] : edges) {
        if (u >= n || v >= n) throw ShapeError("edge endpoint out of range");
        if (u == v) continue;
        g.adj[u].push_back(v);
        g.adj[v].push_back(u);
    }
    for (auto& nb : g.adj) {
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
        g.max_degree = std::max<unsigned>(g.max_degree, static_cast<unsigned>(nb.size()));
    }
    return g;
}

namespace {

// Exclusive-neighborhood enumeration of connected sets containing a root:
// each member of the extension list was marked seen at discovery, branches
// remove one extension vertex at a time, and vertices stay excluded for the
// remainder of their level. Every connected superset of {root} is visited
// exactly once.
struct ConnEnum {
    const AdjacencyGraph& g;
    std::vector<char> seen;
    std::uint64_t visited = 0;
    std::uint64_t cap;

    explicit ConnEnum(const AdjacencyGraph& graph, std::uint64_t cap_in)
        : g(graph), seen(graph.n, 0), cap(cap_in) {}

    // visit(size) is called for every connected set reached (any size);
    // it returns true if children of this set should be explored.
    template <typename Visit>
    void run(std::uint32_t root, Visit&& visit) {
        seen[root] = 1;
        std::vector<std::uint32_t> ext;
        for (std::uint32_t w : g.adj[root])
            if (!seen[w]) {
                seen[w] = 1;
                ext.push_back(w);
            }
        if (visit(1u)) extend(1, ext, visit);
        seen[root] = 0;
        for (std::uint32_t w : ext) seen[w] = 0;
    }

    template <typename Visit>
    void extend(std::size_t size, std::vector<std::uint32_t> ext, Visit&& visit) {
        while (!ext.empty()) {
            std::uint32_t u = ext.back();
            ext.pop_back();
            if (++visited > cap)
                throw ResourceError("connected-set enumeration cap exceeded", visited);
            std::vector<std::uint32_t> added;
            for (std::uint32_t w : g.adj[u])
                if (!seen[w]) {
                    seen[w] = 1;
                    added.push_back(w);
                }
            enter(u);
            if (visit(static_cast<std::uint32_t>(size + 1))) {
                std::vector<std::uint32_t> ext2 = ext;
                ext2.insert(ext2.end(), added.begin(), added.end());
                extend(size + 1, std::move(ext2), visit);
            }
            leave(u);
            for (std::uint32_t w : added) seen[w] = 0;
            // u stays seen: excluded from the rest of this level
        }
    }

    // Hooks for subclass-style customization via std::function-free CRTP
    // would be overkill; maxconn tracks its error count through these.
    std::function<void(std::uint32_t)> on_enter, on_leave;
    void enter(std::uint32_t u) {
        if (on_enter) on_enter(u);
    }
    void leave(std::uint32_t u) {
        if (on_leave) on_leave(u);
    }
};

}  // namespace

ConnectedSetCount enumerate_connected_sets(const AdjacencyGraph& g, std::uint32_t v,
                                           std::size_t s, std::uint64_t cap) {
    if (v >= g.n) throw ShapeError("root vertex out of range");
    if (s == 0) throw ParameterError("set size must be positive");
    ConnectedSetCount out;
    ConnEnum e(g, cap);
    try {
        e.run(v, [&](std::uint32_t size) {
            if (size == s) {
                ++out.count;
                return false;  // no need to grow past s
            }
            return size < s;
        });
    } catch (const ResourceError&) {
        out.complete = false;
        throw ResourceError("connected-set enumeration cap exceeded", out.count);
    }
    return out;
}

MaxConnResult maxconn_exact(const AdjacencyGraph& g, const BitVector& errors, double alpha,
                            std::size_t size_cap, std::uint64_t node_budget) {
    if (errors.size() != g.n) throw ShapeError("error vector length must match graph");
    if (alpha <= 0.0 || alpha > 1.0) throw ParameterError("alpha must lie in (0,1]");
    if (size_cap == 0) throw ParameterError("size_cap must be positive");

    MaxConnResult best;
    auto err_support = errors.support();

    // Every qualifying X (alpha > 0) contains an error vertex; root the
    // search at the smallest-index error vertex of X. Error vertices below
    // the root are pre-marked seen, which excludes them from the branch.
    for (std::size_t idx = 0; idx < err_support.size(); ++idx) {
        std::uint32_t root = err_support[idx];
        std::uint64_t remaining = node_budget == UINT64_MAX
                                      ? UINT64_MAX
                                      : node_budget - std::min(node_budget, best.nodes_visited);
        if (remaining == 0) throw ResourceError("maxconn node budget exceeded", best.value);
        ConnEnum e(g, remaining);
        for (std::size_t k = 0; k < idx; ++k) e.seen[err_support[k]] = 1;
        std::size_t err_in_set = 1;  // root is an error vertex
        e.on_enter = [&](std::uint32_t u) {
            if (errors.get(u)) ++err_in_set;
        };
        e.on_leave = [&](std::uint32_t u) {
            if (errors.get(u)) --err_in_set;
        };
        try {
            e.run(root, [&](std::uint32_t size) {
                if (static_cast<double>(err_in_set) >= alpha * static_cast<double>(size) &&
                    size > best.value) {
                    best.value = size;
                    best.saturated = (size == size_cap);
                }
                if (best.saturated || size >= size_cap) return false;
                // Ratio pruning: even if every future vertex is an error,
                // the cap size cannot qualify.
                double reachable = static_cast<double>(err_in_set) +
                                   static_cast<double>(size_cap - size);
                return reachable >= alpha * static_cast<double>(size_cap) - 1e-9;
            });
        } catch (const ResourceError& re) {
            best.nodes_visited += re.partial_count;
            throw ResourceError("maxconn node budget exceeded", best.value);
        }
        best.nodes_visited += e.visited;
        if (best.saturated) break;
    }
    return best;
}

MaxConnResult maxconn_greedy(const AdjacencyGraph& g, const BitVector& errors, double alpha,
                             std::size_t size_cap) {
    if (errors.size() != g.n) throw ShapeError("error vector length must match graph");
    if (alpha <= 0.0 || alpha > 1.0) throw ParameterError("alpha must lie in (0,1]");
    MaxConnResult best;
    best.lower_bound = true;
    std::vector<char> in_set(g.n, 0);
    for (std::uint32_t seed : errors.support()) {
        std::vector<std::uint32_t> members{seed};
        in_set[seed] = 1;
        std::size_t err_cnt = 1;
        best.value = std::max<std::size_t>(best.value, 1);  // {seed} has ratio 1
        while (members.size() < size_cap) {
            // best next vertex: error members first, then smallest index
            std::int64_t pick = -1;
            bool pick_err = false;
            for (std::uint32_t m : members)
                for (std::uint32_t w : g.adj[m]) {
                    if (in_set[w]) continue;
                    bool we = errors.get(w);
                    if (pick < 0 || (we && !pick_err) ||
                        (we == pick_err && w < static_cast<std::uint32_t>(pick))) {
                        pick = w;
                        pick_err = we;
                    }
                }
            if (pick < 0) break;
            std::size_t next_err = err_cnt + (pick_err ? 1 : 0);
            double next_size = static_cast<double>(members.size() + 1);
            if (static_cast<double>(next_err) < alpha * next_size) break;  // would leave the family
            members.push_back(static_cast<std::uint32_t>(pick));
            in_set[static_cast<std::uint32_t>(pick)] = 1;
            err_cnt = next_err;
            best.value = std::max(best.value, members.size());
        }
        best.saturated = best.saturated || (best.value >= size_cap);
        for (std::uint32_t m : members) in_set[m] = 0;
        if (best.saturated) break;
    }
    return best;
}

std::vector<std::uint32_t> boundary(const AdjacencyGraph& g,
                                    const std::vector<std::uint32_t>& x) {
    std::vector<char> in_set(g.n, 0);
    for (std::uint32_t v : x) {
        if (v >= g.n) throw ShapeError("set member out of range");
        in_set[v] = 1;
    }
    std::vector<char> on_boundary(g.n, 0);
    std::vector<std::uint32_t> out;
    for (std::uint32_t v : x)
        for (std::uint32_t w : g.adj[v])
            if (!in_set[w] && !on_boundary[w]) {
                on_boundary[w] = 1;
                out.push_back(w);
            }
    std::sort(out.begin(), out.end());
    return out;
}

bool a_set_exists(const AdjacencyGraph& g, const BitVector& errors, double alpha, std::size_t s,
                  std::uint32_t v, std::uint64_t cap) {
    if (errors.size() != g.n) throw ShapeError("error vector length must match graph");
    if (alpha <= 0.0 || alpha > 1.0) throw ParameterError("alpha must lie in (0,1]");
    if (s == 0 || v >= g.n) throw ParameterError("bad set size or vertex");

    ConnEnum e(g, cap);
    std::vector<std::uint32_t> members;
    std::size_t err_in_set = errors.get(v) ? 1 : 0;
    e.on_enter = [&](std::uint32_t u) {
        members.push_back(u);
        if (errors.get(u)) ++err_in_set;
    };
    e.on_leave = [&](std::uint32_t u) {
        members.pop_back();
        if (errors.get(u)) --err_in_set;
    };
    bool found = false;
    e.run(v, [&](std::uint32_t size) {
        if (found) return false;
        if (size == s) {
            if (static_cast<double>(err_in_set) >= alpha * static_cast<double>(size)) {
                std::vector<std::uint32_t> x = members;
                x.push_back(v);
                bool clean = true;
                for (std::uint32_t b : boundary(g, x))
                    if (errors.get(b)) {
                        clean = false;
                        break;
                    }
                if (clean) found = true;
            }
            return false;
        }
        return size < s;
    });
    return found;
}

}  // namespace qem
