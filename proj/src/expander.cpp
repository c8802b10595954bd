#include "qem/expander.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "qem/errors.hpp"

namespace qem {

std::string BipartiteGraph::serialize_edges() const {
    std::ostringstream os;
    os << n_a << ' ' << n_b << ' ' << d_a << ' ' << d_b << '\n';
    for (std::size_t u = 0; u < n_a; ++u)
        for (std::uint32_t v : adj_a[u]) os << u << ' ' << v << '\n';
    return os.str();
}

BipartiteGraph sample_biregular(std::size_t n_a, unsigned d_a, unsigned d_b, std::uint64_t seed) {
    if (n_a == 0 || d_a == 0 || d_b == 0)
        throw ParameterError("sample_biregular requires positive sizes and degrees");
    std::uint64_t stubs = static_cast<std::uint64_t>(n_a) * d_a;
    if (stubs % d_b != 0)
        throw ParameterError("n_a * d_a must be divisible by d_b");
    std::size_t n_b = stubs / d_b;
    if (d_a > n_b || d_b > n_a)
        throw ParameterError("degree exceeds opposite side size; simple graph impossible");

    if (d_a == n_b) {
        // Complete bipartite graph is forced; build it directly instead of
        // waiting for the repair loop to stumble onto the unique solution.
        BipartiteGraph g;
        g.n_a = n_a;
        g.n_b = n_b;
        g.d_a = d_a;
        g.d_b = d_b;
        g.adj_a.assign(n_a, {});
        g.adj_b.assign(n_b, {});
        for (std::uint32_t u = 0; u < n_a; ++u)
            for (std::uint32_t v = 0; v < n_b; ++v) {
                g.adj_a[u].push_back(v);
                g.adj_b[v].push_back(u);
            }
        return g;
    }

    // Left stub k belongs to vertex k / d_a; right[k] is its partner.
    std::vector<std::uint32_t> right(stubs);
    for (std::size_t k = 0; k < stubs; ++k)
        right[k] = static_cast<std::uint32_t>(k / d_b);

    Rng rng(seed);
    // Fisher-Yates pairing of stubs.
    for (std::size_t k = stubs - 1; k > 0; --k)
        std::swap(right[k], right[rng.next_below(k + 1)]);

    // Repair parallel edges: every duplicate (u,v) stub beyond the first gets
    // its partner swapped with a uniformly random stub, then re-check.
    const unsigned max_passes = 200;
    std::vector<char> seen(n_b, 0);
    for (unsigned pass = 0;; ++pass) {
        std::vector<std::size_t> bad;
        for (std::size_t u = 0; u < n_a; ++u) {
            std::size_t base = u * d_a;
            for (unsigned j = 0; j < d_a; ++j) {
                std::uint32_t v = right[base + j];
                if (seen[v]) bad.push_back(base + j);
                seen[v] = 1;
            }
            for (unsigned j = 0; j < d_a; ++j) seen[right[base + j]] = 0;
        }
        if (bad.empty()) break;
        if (pass >= max_passes)
            throw SamplingError("parallel-edge repair budget exhausted");
        for (std::size_t k : bad) std::swap(right[k], right[rng.next_below(stubs)]);
    }

    BipartiteGraph g;
    g.n_a = n_a;
    g.n_b = n_b;
    g.d_a = d_a;
    g.d_b = d_b;
    g.adj_a.assign(n_a, {});
    g.adj_b.assign(n_b, {});
    for (std::size_t k = 0; k < stubs; ++k) {
        std::uint32_t u = static_cast<std::uint32_t>(k / d_a), v = right[k];
        g.adj_a[u].push_back(v);
        g.adj_b[v].push_back(u);
    }
    for (auto& a : g.adj_a) std::sort(a.begin(), a.end());
    for (auto& b : g.adj_b) std::sort(b.begin(), b.end());
    return g;
}

namespace {

// Second singular value of the biadjacency via power iteration on B B^T with
// the known top pair (uniform vector, sigma_1 = sqrt(d_a d_b)) deflated.
double second_singular_value(const BipartiteGraph& g) {
    std::size_t n = g.n_a;
    std::vector<double> x(n), y(n), tmp_b(g.n_b);
    Rng rng(0x5eed5eedULL);
    for (auto& v : x) v = rng.next_double() - 0.5;
    double sigma_sq = 0.0;
    for (int it = 0; it < 300; ++it) {
        // project out the all-ones direction
        double mean = 0.0;
        for (double v : x) mean += v;
        mean /= static_cast<double>(n);
        for (auto& v : x) v -= mean;
        // y = B^T x ; x' = B y
        std::fill(tmp_b.begin(), tmp_b.end(), 0.0);
        for (std::size_t u = 0; u < n; ++u)
            for (std::uint32_t v : g.adj_a[u]) tmp_b[v] += x[u];
        std::fill(y.begin(), y.end(), 0.0);
        for (std::size_t u = 0; u < n; ++u)
            for (std::uint32_t v : g.adj_a[u]) y[u] += tmp_b[v];
        double norm = 0.0;
        for (double v : y) norm += v * v;
        norm = std::sqrt(norm);
        if (norm == 0.0) return 0.0;
        sigma_sq = norm;
        for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / norm;
    }
    return std::sqrt(sigma_sq);
}

// Exhaustive scan of left subsets of size <= smax; returns a violating set
// if one exists. Enumeration is in lexicographic order, so the witness is
// reproducible.
std::optional<std::vector<std::uint32_t>> scan_subsets(const BipartiteGraph& g, double delta,
                                                       std::size_t smax) {
    std::vector<std::uint32_t> set;
    std::vector<unsigned> cover(g.n_b, 0);
    std::size_t covered = 0;

    std::optional<std::vector<std::uint32_t>> witness;
    auto add = [&](std::uint32_t u) {
        for (std::uint32_t v : g.adj_a[u])
            if (cover[v]++ == 0) ++covered;
    };
    auto remove = [&](std::uint32_t u) {
        for (std::uint32_t v : g.adj_a[u])
            if (--cover[v] == 0) --covered;
    };
    // Recursive lexicographic enumeration with early exit on first witness.
    auto rec = [&](auto&& self, std::uint32_t next) -> bool {
        if (!set.empty()) {
            double need = g.d_a * (1.0 - delta) * static_cast<double>(set.size());
            if (static_cast<double>(covered) < need) {
                witness = set;
                return true;
            }
        }
        if (set.size() == smax) return false;
        for (std::uint32_t u = next; u < g.n_a; ++u) {
            set.push_back(u);
            add(u);
            bool found = self(self, u + 1);
            remove(u);
            set.pop_back();
            if (found) return true;
        }
        return false;
    };
    rec(rec, 0);
    return witness;
}

}  // namespace

ExpansionReport check_expansion(const BipartiteGraph& g, double gamma, double delta,
                                std::size_t size_cap) {
    if (gamma < 0.0 || gamma > 1.0) throw ParameterError("gamma must lie in [0,1]");
    if (delta < 0.0 || delta > 1.0) throw ParameterError("delta must lie in [0,1]");
    ExpansionReport rep;
    rep.gamma = gamma;
    rep.delta = delta;
    std::size_t target = static_cast<std::size_t>(std::floor(gamma * static_cast<double>(g.n_a)));
    rep.verified_up_to = std::min(target, size_cap);
    rep.method = target > size_cap ? "exhaustive+spectral-proxy" : "exhaustive";
    rep.sigma2 = second_singular_value(g);
    if (rep.verified_up_to > 0) {
        rep.witness = scan_subsets(g, delta, rep.verified_up_to);
        rep.holds = !rep.witness.has_value();
    }
    return rep;
}

}  // namespace qem
