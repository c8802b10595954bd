#include "qem/code.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "qem/errors.hpp"
#include "qem/rng.hpp"

namespace qem {

SparseBitMatrix tanner_matrix(const BipartiteGraph& g) {
    std::vector<std::vector<std::uint32_t>> rows(g.n_b);
    for (std::size_t v = 0; v < g.n_b; ++v) rows[v] = g.adj_b[v];
    return SparseBitMatrix::from_rows(g.n_b, g.n_a, std::move(rows));
}

QuantumExpanderCode hypergraph_product(const SparseBitMatrix& h) {
    const std::size_t nc = h.rows(), nv = h.cols();
    if (nc == 0 || nv == 0) throw ShapeError("hypergraph_product requires a nonempty matrix");
    const std::size_t n = nv * nv + nc * nc;
    auto cols = h.column_supports();

    auto bit_qubit = [nv](std::size_t i, std::size_t j) {
        return static_cast<std::uint32_t>(i * nv + j);
    };
    auto check_qubit = [nv, nc](std::size_t a, std::size_t b) {
        return static_cast<std::uint32_t>(nv * nv + a * nc + b);
    };

    // H_X row (a,j): bit-pair qubits (i,j) for i in supp(H_a), plus
    // check-pair qubits (a,c) for c with H[c,j] = 1.
    std::vector<std::vector<std::uint32_t>> hx(nc * nv);
    for (std::size_t a = 0; a < nc; ++a)
        for (std::size_t j = 0; j < nv; ++j) {
            auto& row = hx[a * nv + j];
            for (std::uint32_t i : h.row_support(a)) row.push_back(bit_qubit(i, j));
            for (std::uint32_t c : cols[j]) row.push_back(check_qubit(a, c));
        }

    // H_Z row (i,b): bit-pair qubits (i,j) for j in supp(H_b), plus
    // check-pair qubits (a,b) for a with H[a,i] = 1.
    std::vector<std::vector<std::uint32_t>> hz(nv * nc);
    for (std::size_t i = 0; i < nv; ++i)
        for (std::size_t b = 0; b < nc; ++b) {
            auto& row = hz[i * nc + b];
            for (std::uint32_t j : h.row_support(b)) row.push_back(bit_qubit(i, j));
            for (std::uint32_t a : cols[i]) row.push_back(check_qubit(a, b));
        }

    QuantumExpanderCode code;
    code.h_x = SparseBitMatrix::from_rows(nc * nv, n, std::move(hx));
    code.h_z = SparseBitMatrix::from_rows(nv * nc, n, std::move(hz));
    code.n = n;
    code.n_bits = nv;
    code.n_checks = nc;
    code.rank_h_x = gf2_rank(code.h_x);
    code.rank_h_z = gf2_rank(code.h_z);
    code.k = n - code.rank_h_x - code.rank_h_z;
    if (!gf2_product_with_transpose_is_zero(code.h_x, code.h_z))
        throw std::logic_error("product construction broke CSS orthogonality");
    return code;
}

QuantumExpanderCode build_code(std::size_t n_bits, unsigned d_a, unsigned d_b,
                               std::uint64_t seed, double delta_a, double gamma_a) {
    BipartiteGraph g = sample_biregular(n_bits, d_a, d_b, seed);
    QuantumExpanderCode code = hypergraph_product(tanner_matrix(g));
    code.d_a = d_a;
    code.d_b = d_b;
    code.delta_a = delta_a;
    code.gamma_a = gamma_a;
    code.seed = seed;
    return code;
}

namespace {

// Work estimate for choosing combinations of weight w out of n.
double binom_estimate(std::size_t n, std::size_t w) {
    double v = 1.0;
    for (std::size_t i = 0; i < w; ++i) v *= static_cast<double>(n - i) / static_cast<double>(i + 1);
    return v;
}

}  // namespace

DistanceEstimate estimate_distance(const QuantumExpanderCode& code, std::size_t weight_budget,
                                   std::size_t trials, std::uint64_t seed) {
    const std::size_t n = code.n;
    constexpr double kWorkCap = 5e8;
    double total = 0.0;
    for (std::size_t w = 1; w <= weight_budget; ++w) total += binom_estimate(n, w);
    if (total > kWorkCap)
        throw ResourceError("weight budget too large for exhaustive scan; lower weight_budget");

    Gf2Echelon hx_space(code.h_x);
    auto z_cols = code.h_z.column_supports();

    DistanceEstimate est;

    // Exhaustive ascending-weight scan. Tracks the Z-syndrome incrementally
    // over the choose-next recursion.
    std::vector<unsigned> synd(code.h_z.rows(), 0);
    std::size_t synd_w = 0;
    std::vector<std::uint32_t> chosen;
    auto toggle = [&](std::uint32_t q) {
        for (std::uint32_t r : z_cols[q]) {
            if (synd[r] ^= 1u)
                ++synd_w;
            else
                --synd_w;
        }
    };
    auto is_logical = [&]() {
        if (synd_w != 0) return false;
        BitVector e = BitVector::from_support(n, chosen);
        return !hx_space.contains(e);
    };
    auto rec = [&](auto&& self, std::uint32_t next, std::size_t remaining) -> bool {
        if (remaining == 0) return is_logical();
        for (std::uint32_t q = next; q + remaining <= n; ++q) {
            chosen.push_back(q);
            toggle(q);
            bool hit = self(self, q + 1, remaining - 1);
            toggle(q);
            chosen.pop_back();
            if (hit) return true;
        }
        return false;
    };
    for (std::size_t w = 1; w <= weight_budget; ++w) {
        if (rec(rec, 0, w)) {
            est.upper_found = w;
            est.lower_certified = w - 1;
            est.exact = true;
            return est;
        }
    }
    est.lower_certified = weight_budget;

    // Randomized probing for an upper bound beyond the exhaustive budget:
    // random combinations of ker(H_Z) basis vectors, mixed with random
    // stabilizer rows, keeping the lightest nontrivial representative.
    if (trials > 0) {
        // Reduced row echelon form of H_Z, then one kernel vector per free
        // column: x[f] = 1 and x[p] = row_p[f] for every pivot p.
        std::vector<BitVector> rref;
        std::vector<std::uint32_t> pivots;
        for (std::size_t r = 0; r < code.h_z.rows(); ++r) {
            BitVector v = BitVector::from_support(n, code.h_z.row_support(r));
            for (std::size_t k = 0; k < rref.size(); ++k)
                if (v.get(pivots[k])) v ^= rref[k];
            if (!v.any()) continue;
            std::uint32_t p = v.support().front();
            for (std::size_t k = 0; k < rref.size(); ++k)
                if (rref[k].get(p)) rref[k] ^= v;
            rref.push_back(std::move(v));
            pivots.push_back(p);
        }
        std::vector<char> is_pivot(n, 0);
        for (std::uint32_t p : pivots) is_pivot[p] = 1;
        std::vector<BitVector> kernel;
        for (std::uint32_t f = 0; f < n; ++f) {
            if (is_pivot[f]) continue;
            BitVector x(n);
            x.set(f);
            for (std::size_t k = 0; k < rref.size(); ++k)
                if (rref[k].get(f)) x.flip(pivots[k]);
            kernel.push_back(std::move(x));
        }
        Rng rng(seed);
        std::size_t best = est.upper_found;
        for (std::size_t t = 0; t < trials; ++t) {
            BitVector x(n);
            for (const BitVector& b : kernel)
                if (rng.bernoulli(0.5)) x ^= b;
            for (std::size_t r = 0; r < code.h_x.rows(); ++r)
                if (rng.bernoulli(0.5)) x ^= BitVector::from_support(n, code.h_x.row_support(r));
            if (!x.any()) continue;
            if (hx_space.contains(x)) continue;
            std::size_t w = x.weight();
            if (best == 0 || w < best) best = w;
        }
        est.upper_found = best;
    }
    return est;
}

void write_code_bundle(std::ostream& out, const QuantumExpanderCode& code) {
    out << "qem-code-bundle v1\n";
    out.precision(17);
    out << "n " << code.n << "\nk " << code.k << "\nn_bits " << code.n_bits << "\nn_checks "
        << code.n_checks << "\nd_a " << code.d_a << "\nd_b " << code.d_b << "\nr " << code.ratio()
        << "\ndelta_a " << code.delta_a << "\ngamma_a " << code.gamma_a << "\nseed " << code.seed
        << "\n";
    out << "h_x\n";
    code.h_x.write_coordinate_text(out);
    out << "h_z\n";
    code.h_z.write_coordinate_text(out);
}

QuantumExpanderCode read_code_bundle(std::istream& in) {
    std::string magic, version;
    if (!(in >> magic >> version) || magic != "qem-code-bundle" || version != "v1")
        throw IoError("not a code bundle file");
    QuantumExpanderCode code;
    std::string key;
    double r_unused = 0;
    auto expect = [&](const char* name, auto& value) {
        if (!(in >> key >> value) || key != name) throw IoError("malformed bundle header");
    };
    expect("n", code.n);
    expect("k", code.k);
    expect("n_bits", code.n_bits);
    expect("n_checks", code.n_checks);
    expect("d_a", code.d_a);
    expect("d_b", code.d_b);
    expect("r", r_unused);
    expect("delta_a", code.delta_a);
    expect("gamma_a", code.gamma_a);
    expect("seed", code.seed);
    if (!(in >> key) || key != "h_x") throw IoError("missing h_x section");
    code.h_x = SparseBitMatrix::read_coordinate_text(in);
    if (!(in >> key) || key != "h_z") throw IoError("missing h_z section");
    code.h_z = SparseBitMatrix::read_coordinate_text(in);
    if (code.h_x.cols() != code.n || code.h_z.cols() != code.n)
        throw IoError("bundle sections disagree with header");
    code.rank_h_x = gf2_rank(code.h_x);
    code.rank_h_z = gf2_rank(code.h_z);
    if (code.n - code.rank_h_x - code.rank_h_z != code.k)
        throw IoError("bundle k does not match matrix ranks");
    return code;
}

}  // namespace qem
