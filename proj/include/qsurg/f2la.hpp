#pragma once

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qsurg::f2 {

// Word-packed bit vector over GF(2).
struct BitVector {
    size_t n = 0;
    std::vector<uint64_t> w;

    BitVector() = default;
    explicit BitVector(size_t len) : n(len), w((len + 63) >> 6, 0) {}

    static BitVector from_string(std::string_view s);
    std::string to_string() const;

    bool get(size_t i) const {
        assert(i < n);
        return (w[i >> 6] >> (i & 63)) & 1;
    }
    void set(size_t i, bool v) {
        assert(i < n);
        uint64_t m = uint64_t(1) << (i & 63);
        if (v) {
            w[i >> 6] |= m;
        } else {
            w[i >> 6] &= ~m;
        }
    }
    void flip(size_t i) {
        assert(i < n);
        w[i >> 6] ^= uint64_t(1) << (i & 63);
    }

    BitVector& operator^=(const BitVector& o);
    friend BitVector operator^(BitVector a, const BitVector& b) {
        a ^= b;
        return a;
    }
    BitVector& operator&=(const BitVector& o);
    friend BitVector operator&(BitVector a, const BitVector& b) {
        a &= b;
        return a;
    }

    bool none() const;
    bool any() const { return !none(); }
    size_t weight() const;
    // Index of the lowest set bit, or n if none.
    size_t lowest_set() const;
    std::vector<size_t> ones() const;

    bool operator==(const BitVector&) const = default;
};

// Parity of the AND of two equal-length vectors.
bool dot(const BitVector& a, const BitVector& b);

struct BitMatrix {
    size_t rows = 0;
    size_t cols = 0;
    std::vector<BitVector> row;

    BitMatrix() = default;
    BitMatrix(size_t nr, size_t nc) : rows(nr), cols(nc), row(nr, BitVector(nc)) {}

    static BitMatrix identity(size_t k);
    static BitMatrix from_rows(const std::vector<BitVector>& rs);

    bool get(size_t i, size_t j) const {
        assert(i < rows);
        return row[i].get(j);
    }
    void set(size_t i, size_t j, bool v) {
        assert(i < rows);
        row[i].set(j, v);
    }

    // m.apply(v): v has length cols, result has length rows.
    BitVector apply(const BitVector& v) const;

    bool operator==(const BitMatrix&) const = default;
};

size_t rank(const BitMatrix& m);
BitMatrix transpose(const BitMatrix& m);

// Basis of {v : m.apply(v) = 0}; size is cols - rank(m).
// Deterministic: lowest-index pivoting, free columns in increasing order.
std::vector<BitVector> kernel_basis(const BitMatrix& m);

// Some x with m.apply(x) = b, or nullopt when inconsistent.
// Deterministic: free variables are forced to zero.
std::optional<BitVector> solve(const BitMatrix& m, const BitVector& b);

// Incremental row basis kept in reduced echelon form. Insertion order does
// not affect the final row set (RREF is canonical for the span).
struct RowBasis {
    size_t cols = 0;
    std::vector<BitVector> rows;
    std::vector<size_t> pivots;

    explicit RowBasis(size_t c) : cols(c) {}

    BitVector reduce(BitVector v) const;
    // True when v was independent of the current span (and got inserted).
    bool insert(BitVector v);
    bool contains(const BitVector& v) const { return reduce(v).none(); }
    size_t rank() const { return rows.size(); }
    // Rows sorted by pivot column.
    std::vector<BitVector> canonical_rows() const;
};

bool in_row_space(const BitMatrix& m, const BitVector& v);

// Plain-text sparse format: header "rows cols nnz", then one "r c" pair per
// nonzero, 0-indexed. '#' starts a comment line.
BitMatrix read_sparse(std::istream& in);
void write_sparse(std::ostream& out, const BitMatrix& m);
BitMatrix read_sparse_file(const std::string& path);
void write_sparse_file(const std::string& path, const BitMatrix& m);

}  // namespace qsurg::f2
