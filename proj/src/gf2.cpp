#include "qem/gf2.hpp"

#include <algorithm>
#include <bit>
#include <istream>
#include <ostream>
#include <sstream>

#include "qem/errors.hpp"

namespace qem {

BitVector BitVector::from_support(std::size_t n, const std::vector<std::uint32_t>& support) {
    BitVector v(n);
    for (std::uint32_t i : support) {
        if (i >= n) throw ShapeError("bit index out of range");
        v.set(i);
    }
    return v;
}

BitVector& BitVector::operator^=(const BitVector& o) {
    if (n_ != o.n_) throw ShapeError("xor of bit vectors of different length");
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] ^= o.w_[i];
    return *this;
}

std::size_t BitVector::weight() const {
    std::size_t w = 0;
    for (std::uint64_t x : w_) w += std::popcount(x);
    return w;
}

bool BitVector::any() const {
    for (std::uint64_t x : w_)
        if (x) return true;
    return false;
}

void BitVector::clear() { std::fill(w_.begin(), w_.end(), 0); }

std::vector<std::uint32_t> BitVector::support() const {
    std::vector<std::uint32_t> out;
    for (std::size_t wi = 0; wi < w_.size(); ++wi) {
        std::uint64_t x = w_[wi];
        while (x) {
            out.push_back(static_cast<std::uint32_t>(wi * 64 + std::countr_zero(x)));
            x &= x - 1;
        }
    }
    return out;
}

SparseBitMatrix SparseBitMatrix::from_rows(std::size_t rows, std::size_t cols,
                                           std::vector<std::vector<std::uint32_t>> supports) {
    if (supports.size() != rows) throw ShapeError("row count does not match supports");
    for (auto& s : supports) {
        std::sort(s.begin(), s.end());
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] >= cols) throw ShapeError("column index out of range");
            if (i > 0 && s[i] == s[i - 1]) throw ShapeError("duplicate entry in row support");
        }
    }
    SparseBitMatrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.sup_ = std::move(supports);
    return m;
}

std::size_t SparseBitMatrix::nnz() const {
    std::size_t t = 0;
    for (const auto& s : sup_) t += s.size();
    return t;
}

std::vector<std::vector<std::uint32_t>> SparseBitMatrix::column_supports() const {
    std::vector<std::vector<std::uint32_t>> cols(cols_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::uint32_t c : sup_[r]) cols[c].push_back(static_cast<std::uint32_t>(r));
    return cols;
}

void SparseBitMatrix::write_coordinate_text(std::ostream& out) const {
    out << rows_ << ' ' << cols_ << ' ' << nnz() << '\n';
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::uint32_t c : sup_[r]) out << r << ' ' << c << '\n';
}

SparseBitMatrix SparseBitMatrix::read_coordinate_text(std::istream& in) {
    std::size_t rows, cols, nnz;
    if (!(in >> rows >> cols >> nnz)) throw IoError("bad coordinate header");
    std::vector<std::vector<std::uint32_t>> sup(rows);
    for (std::size_t k = 0; k < nnz; ++k) {
        std::size_t r, c;
        if (!(in >> r >> c)) throw IoError("truncated coordinate entries");
        if (r >= rows || c >= cols) throw IoError("coordinate entry out of range");
        sup[r].push_back(static_cast<std::uint32_t>(c));
    }
    return from_rows(rows, cols, std::move(sup));
}

BitVector gf2_mul(const SparseBitMatrix& m, const BitVector& v) {
    if (v.size() != m.cols()) throw ShapeError("vector length does not match matrix columns");
    BitVector y(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        unsigned parity = 0;
        for (std::uint32_t c : m.row_support(r)) parity ^= v.get(c) ? 1u : 0u;
        if (parity) y.set(r);
    }
    return y;
}

Gf2Echelon::Gf2Echelon(const SparseBitMatrix& m) : cols_(m.cols()), src_rows_(m.rows()) {
    src_.reserve(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) src_.push_back(m.row_support(r));
    for (std::size_t r = 0; r < m.rows(); ++r) {
        BitVector v = BitVector::from_support(cols_, src_[r]);
        BitVector c = reduce(v);
        if (!v.any()) continue;
        c.flip(r);
        std::size_t pivot = v.support().front();
        basis_.push_back(Row{pivot, std::move(v), std::move(c)});
        // Keep basis ordered by pivot so reduce() can scan monotonically.
        for (std::size_t i = basis_.size(); i > 1 && basis_[i - 1].pivot < basis_[i - 2].pivot; --i)
            std::swap(basis_[i - 1], basis_[i - 2]);
    }
}

BitVector Gf2Echelon::reduce(BitVector& v) const {
    BitVector c(src_rows_);
    // During reduction the lowest set bit only moves rightwards, so one pass
    // over the pivot-sorted basis suffices.
    for (const Row& row : basis_) {
        if (v.get(row.pivot)) {
            v ^= row.bits;
            c ^= row.coeff;
        }
    }
    return c;
}

bool Gf2Echelon::contains(const BitVector& v) const {
    if (v.size() != cols_) throw ShapeError("vector length does not match echelon columns");
    BitVector tmp = v;
    reduce(tmp);
    return !tmp.any();
}

std::optional<BitVector> Gf2Echelon::witness(const BitVector& v) const {
    if (v.size() != cols_) throw ShapeError("vector length does not match echelon columns");
    BitVector tmp = v;
    BitVector c = reduce(tmp);
    if (tmp.any()) return std::nullopt;
    // Re-verify: xor together the claimed source rows and compare with v.
    BitVector check(cols_);
    for (std::uint32_t r : c.support())
        for (std::uint32_t col : src_[r]) check.flip(col);
    if (check != v) throw std::logic_error("rowspace witness failed re-verification");
    return c;
}

std::size_t gf2_rank(const SparseBitMatrix& m) { return Gf2Echelon(m).rank(); }

bool gf2_in_rowspace(const SparseBitMatrix& m, const BitVector& v) {
    return Gf2Echelon(m).witness(v).has_value();
}

bool gf2_product_with_transpose_is_zero(const SparseBitMatrix& a, const SparseBitMatrix& b) {
    if (a.cols() != b.cols()) throw ShapeError("matrices must share column count");
    auto b_cols = b.column_supports();
    std::vector<unsigned> overlap(b.rows(), 0);
    std::vector<std::uint32_t> touched;
    for (std::size_t r = 0; r < a.rows(); ++r) {
        touched.clear();
        for (std::uint32_t c : a.row_support(r)) {
            for (std::uint32_t br : b_cols[c]) {
                if (overlap[br]++ == 0) touched.push_back(br);
            }
        }
        bool ok = true;
        for (std::uint32_t br : touched) {
            if (overlap[br] & 1u) ok = false;
            overlap[br] = 0;
        }
        if (!ok) return false;
    }
    return true;
}

}  // namespace qem
