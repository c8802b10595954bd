#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qem/rng.hpp"

namespace qem {

// Biregular bipartite graph: n_a left vertices of degree d_a, n_b right
// vertices of degree d_b, no parallel edges.
struct BipartiteGraph {
    std::size_t n_a = 0, n_b = 0;
    unsigned d_a = 0, d_b = 0;
    std::vector<std::vector<std::uint32_t>> adj_a;  // left -> sorted right neighbors
    std::vector<std::vector<std::uint32_t>> adj_b;  // right -> sorted left neighbors

    double ratio() const { return static_cast<double>(d_a) / static_cast<double>(d_b); }

    // Canonical edge list "u v" per line, sorted; byte-stable for a given graph.
    std::string serialize_edges() const;
};

// Configuration-model sample. Parallel edges are repaired by re-drawing the
// right-stub partner of each offending edge; a pass budget bounds the repair
// loop. Deterministic for a fixed seed.
BipartiteGraph sample_biregular(std::size_t n_a, unsigned d_a, unsigned d_b, std::uint64_t seed);

struct ExpansionReport {
    double gamma = 0;          // claimed fraction of left vertices
    double delta = 0;          // claimed expansion defect
    std::size_t verified_up_to = 0;  // largest set size exhaustively checked
    bool holds = true;               // no violation among checked sizes
    std::string method;              // "exhaustive" or "exhaustive+spectral-proxy"
    std::optional<std::vector<std::uint32_t>> witness;  // violating left set, if any
    double sigma2 = 0;  // second singular value of the biadjacency (proxy beyond the cap)
};

// Certifies |Gamma(S)| >= d_a (1-delta) |S| for every left set S with
// |S| <= min(gamma n_a, size_cap) by exhaustive enumeration; beyond the cap
// only the spectral proxy is reported.
ExpansionReport check_expansion(const BipartiteGraph& g, double gamma, double delta,
                                std::size_t size_cap = 20);

}  // namespace qem
