#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "qem/expander.hpp"
#include "qem/gf2.hpp"

namespace qem {

// CSS code from the product of a classical parity matrix H (checks x bits)
// with itself:
//   H_X = [H (x) I_bits | I_checks (x) H^T]
//   H_Z = [I_bits (x) H | H^T (x) I_checks]
// Qubits are ordered bit-pair block first (row-major (i,j) -> i*n_bits+j),
// then check-pair block ((a,b) -> n_bits^2 + a*n_checks+b).
struct QuantumExpanderCode {
    SparseBitMatrix h_x;  // (n_checks*n_bits) x n
    SparseBitMatrix h_z;  // (n_bits*n_checks) x n
    std::size_t n = 0;    // n_bits^2 + n_checks^2
    std::size_t k = 0;    // n - rank(h_x) - rank(h_z)
    std::size_t rank_h_x = 0, rank_h_z = 0;
    std::size_t n_bits = 0, n_checks = 0;

    // declared construction parameters, carried for reporting
    unsigned d_a = 0, d_b = 0;
    double delta_a = 0, gamma_a = 0;
    std::uint64_t seed = 0;

    double ratio() const {
        return d_b ? static_cast<double>(d_a) / static_cast<double>(d_b)
                   : static_cast<double>(n_checks) / static_cast<double>(n_bits);
    }
};

// Product of H with itself. H is given as a sparse matrix (checks x bits).
// Degrees/claims on the returned code are left zeroed; build_code fills them.
QuantumExpanderCode hypergraph_product(const SparseBitMatrix& h);

// Tanner parity matrix of a bipartite graph: row per right vertex (check),
// column per left vertex (bit).
SparseBitMatrix tanner_matrix(const BipartiteGraph& g);

// Sample a biregular graph and take the product of its Tanner code.
QuantumExpanderCode build_code(std::size_t n_bits, unsigned d_a, unsigned d_b,
                               std::uint64_t seed, double delta_a, double gamma_a);

struct DistanceEstimate {
    std::size_t lower_certified = 0;  // all lighter X words are trivial or detectable
    std::size_t upper_found = 0;      // weight of lightest X logical found (0 = none)
    bool exact = false;               // exhaustive scan found the minimum
};

// X-distance probe: exhaustive scan over words of weight <= weight_budget
// (zero Z-syndrome and not in rowspace(H_X) marks a logical), then random
// information-set style probing of ker(H_Z) for lighter representatives.
// Combination count above the work cap raises ResourceError.
DistanceEstimate estimate_distance(const QuantumExpanderCode& code, std::size_t weight_budget,
                                   std::size_t trials, std::uint64_t seed = 1);

// Bundle file: header (n, k, d_a, d_b, r, delta_a, gamma_a, seed) followed by
// coordinate-text sections for H_X and H_Z. Byte-stable round trip.
void write_code_bundle(std::ostream& out, const QuantumExpanderCode& code);
QuantumExpanderCode read_code_bundle(std::istream& in);

}  // namespace qem
