#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qem/code.hpp"
#include "qem/gf2.hpp"

namespace qem {

// Connectivity graph on qubits: u ~ v iff some stabilizer row (of either
// parity matrix) contains both.
struct AdjacencyGraph {
    std::size_t n = 0;
    std::vector<std::vector<std::uint32_t>> adj;  // sorted neighbor lists
    unsigned max_degree = 0;

    // ln((d-1)(1+1/(d-2))^(d-2)); std::nullopt when max_degree <= 2 (the
    // growth constant is undefined there).
    std::optional<double> c_g() const;
};

AdjacencyGraph build_adjacency(const QuantumExpanderCode& code);

// Direct construction from neighbor lists (symmetrized, deduplicated).
AdjacencyGraph make_graph(std::size_t n, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges);

struct ConnectedSetCount {
    std::uint64_t count = 0;
    bool complete = true;  // false only on capped partial results
};

// Number of connected vertex sets of size exactly s that contain v. Each set
// is visited once; when more than `cap` sets are visited the search raises
// ResourceError carrying the partial count as a lower bound.
ConnectedSetCount enumerate_connected_sets(const AdjacencyGraph& g, std::uint32_t v,
                                           std::size_t s, std::uint64_t cap);

struct MaxConnResult {
    std::size_t value = 0;
    bool saturated = false;    // a qualifying set of size size_cap exists; true value may be larger
    bool lower_bound = false;  // greedy result, not certified maximal
    std::uint64_t nodes_visited = 0;
};

// Largest connected X with |X ∩ E| >= alpha |X|, searched exactly up to
// size_cap by branch and bound rooted at each error vertex. A partial set of
// size m with e errors is pruned when e + (size_cap - m) < alpha * size_cap.
// Node budget overrun raises ResourceError (partial best in partial_count).
MaxConnResult maxconn_exact(const AdjacencyGraph& g, const BitVector& errors, double alpha,
                            std::size_t size_cap, std::uint64_t node_budget = UINT64_MAX);

// Greedy lower bound: grows one cluster per error seed, always appending the
// neighbor that keeps the error ratio highest.
MaxConnResult maxconn_greedy(const AdjacencyGraph& g, const BitVector& errors, double alpha,
                             std::size_t size_cap);

// Vertices outside X adjacent to X.
std::vector<std::uint32_t> boundary(const AdjacencyGraph& g, const std::vector<std::uint32_t>& x);

// Whether some connected X of size exactly s containing v has
// |X ∩ E| >= alpha |X| and boundary(X) ∩ E = ∅.
bool a_set_exists(const AdjacencyGraph& g, const BitVector& errors, double alpha, std::size_t s,
                  std::uint32_t v, std::uint64_t cap = UINT64_MAX);

}  // namespace qem
