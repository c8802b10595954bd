#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace qem {

// Dense GF(2) vector, bit-packed into 64-bit words.
class BitVector {
  public:
    BitVector() : n_(0) {}
    explicit BitVector(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {}

    static BitVector from_support(std::size_t n, const std::vector<std::uint32_t>& support);

    std::size_t size() const { return n_; }

    bool get(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1u; }
    void set(std::size_t i) { w_[i >> 6] |= std::uint64_t(1) << (i & 63); }
    void reset(std::size_t i) { w_[i >> 6] &= ~(std::uint64_t(1) << (i & 63)); }
    void flip(std::size_t i) { w_[i >> 6] ^= std::uint64_t(1) << (i & 63); }

    BitVector& operator^=(const BitVector& o);
    friend BitVector operator^(BitVector a, const BitVector& b) { a ^= b; return a; }
    bool operator==(const BitVector& o) const { return n_ == o.n_ && w_ == o.w_; }
    bool operator!=(const BitVector& o) const { return !(*this == o); }

    std::size_t weight() const;
    bool any() const;
    void clear();
    std::vector<std::uint32_t> support() const;

    const std::vector<std::uint64_t>& words() const { return w_; }

  private:
    std::size_t n_;
    std::vector<std::uint64_t> w_;
};

// Sparse GF(2) matrix stored as sorted row supports. Immutable once built;
// safe to share across threads.
class SparseBitMatrix {
  public:
    SparseBitMatrix() : rows_(0), cols_(0) {}

    // Validates indices, sorts each support, rejects duplicate entries.
    static SparseBitMatrix from_rows(std::size_t rows, std::size_t cols,
                                     std::vector<std::vector<std::uint32_t>> supports);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t nnz() const;

    const std::vector<std::uint32_t>& row_support(std::size_t r) const { return sup_[r]; }

    // col -> list of rows containing it.
    std::vector<std::vector<std::uint32_t>> column_supports() const;

    // Coordinate text: header "rows cols nnz", then one "row col" pair per
    // line, 0-indexed, sorted by (row, col). Round-trips byte-exactly.
    void write_coordinate_text(std::ostream& out) const;
    static SparseBitMatrix read_coordinate_text(std::istream& in);

    bool operator==(const SparseBitMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && sup_ == o.sup_;
    }

  private:
    std::size_t rows_, cols_;
    std::vector<std::vector<std::uint32_t>> sup_;
};

// y = M v over GF(2); y[r] = parity of |row_r ∩ supp(v)|.
BitVector gf2_mul(const SparseBitMatrix& m, const BitVector& v);

// Row-echelon basis of the rowspace of a matrix, with coefficient tracking.
// Building it costs one elimination; afterwards rank and any number of
// rowspace-membership queries are cheap, so callers that query repeatedly
// (e.g. per-phase logical checks) should build one and keep it.
class Gf2Echelon {
  public:
    explicit Gf2Echelon(const SparseBitMatrix& m);

    std::size_t rank() const { return basis_.size(); }
    std::size_t cols() const { return cols_; }

    bool contains(const BitVector& v) const;

    // If v is in the rowspace, returns c with c^T M = v (length = rows of M).
    // The witness is re-verified against the original rows before returning.
    std::optional<BitVector> witness(const BitVector& v) const;

  private:
    struct Row {
        std::size_t pivot;
        BitVector bits;   // length cols
        BitVector coeff;  // length source rows; bits ^ = xor of those source rows
    };
    std::size_t cols_, src_rows_;
    std::vector<Row> basis_;
    std::vector<std::vector<std::uint32_t>> src_;  // original supports, for witness re-check

    // Reduces v in place; returns combination of source rows applied.
    BitVector reduce(BitVector& v) const;
};

std::size_t gf2_rank(const SparseBitMatrix& m);
bool gf2_in_rowspace(const SparseBitMatrix& m, const BitVector& v);

// A B^T == 0, i.e. every row of A shares an even number of positions with
// every row of B. Cost ~ nnz(A) * (rows of B touching each support).
bool gf2_product_with_transpose_is_zero(const SparseBitMatrix& a, const SparseBitMatrix& b);

}  // namespace qem
