#include "qsurg/f2la.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace qsurg::f2 {

namespace {

void require_same_length(const BitVector& a, const BitVector& b) {
    if (a.n != b.n) {
        throw std::invalid_argument("bit vector length mismatch: " + std::to_string(a.n) +
                                    " vs " + std::to_string(b.n));
    }
}

}  // namespace

BitVector BitVector::from_string(std::string_view s) {
    BitVector v(s.size());
    for (size_t i = 0; i < s.size(); i++) {
        if (s[i] == '1') {
            v.set(i, true);
        } else if (s[i] != '0') {
            throw std::invalid_argument("bit string may only contain 0/1");
        }
    }
    return v;
}

std::string BitVector::to_string() const {
    std::string s(n, '0');
    for (size_t i = 0; i < n; i++) {
        if (get(i)) {
            s[i] = '1';
        }
    }
    return s;
}

BitVector& BitVector::operator^=(const BitVector& o) {
    require_same_length(*this, o);
    for (size_t i = 0; i < w.size(); i++) {
        w[i] ^= o.w[i];
    }
    return *this;
}

BitVector& BitVector::operator&=(const BitVector& o) {
    require_same_length(*this, o);
    for (size_t i = 0; i < w.size(); i++) {
        w[i] &= o.w[i];
    }
    return *this;
}

bool BitVector::none() const {
    for (uint64_t x : w) {
        if (x) {
            return false;
        }
    }
    return true;
}

size_t BitVector::weight() const {
    size_t t = 0;
    for (uint64_t x : w) {
        t += std::popcount(x);
    }
    return t;
}

size_t BitVector::lowest_set() const {
    for (size_t i = 0; i < w.size(); i++) {
        if (w[i]) {
            return (i << 6) + std::countr_zero(w[i]);
        }
    }
    return n;
}

std::vector<size_t> BitVector::ones() const {
    std::vector<size_t> out;
    for (size_t i = 0; i < w.size(); i++) {
        uint64_t x = w[i];
        while (x) {
            out.push_back((i << 6) + std::countr_zero(x));
            x &= x - 1;
        }
    }
    return out;
}

bool dot(const BitVector& a, const BitVector& b) {
    require_same_length(a, b);
    uint64_t acc = 0;
    for (size_t i = 0; i < a.w.size(); i++) {
        acc ^= a.w[i] & b.w[i];
    }
    return std::popcount(acc) & 1;
}

BitMatrix BitMatrix::identity(size_t k) {
    BitMatrix m(k, k);
    for (size_t i = 0; i < k; i++) {
        m.set(i, i, true);
    }
    return m;
}

BitMatrix BitMatrix::from_rows(const std::vector<BitVector>& rs) {
    BitMatrix m;
    m.rows = rs.size();
    m.cols = rs.empty() ? 0 : rs[0].n;
    for (const auto& r : rs) {
        if (r.n != m.cols) {
            throw std::invalid_argument("rows of unequal length");
        }
    }
    m.row = rs;
    return m;
}

BitVector BitMatrix::apply(const BitVector& v) const {
    if (v.n != cols) {
        throw std::invalid_argument("matrix/vector shape mismatch");
    }
    BitVector out(rows);
    for (size_t i = 0; i < rows; i++) {
        out.set(i, dot(row[i], v));
    }
    return out;
}

namespace {

// Forward elimination with lowest-index pivots. Returns pivot column per
// eliminated row; `rs` is modified in place and `aug` (optional, same row
// count) receives the same row operations.
std::vector<size_t> eliminate(std::vector<BitVector>& rs, size_t cols, BitVector* aug) {
    std::vector<size_t> pivot_cols;
    size_t next_row = 0;
    for (size_t c = 0; c < cols && next_row < rs.size(); c++) {
        size_t p = next_row;
        while (p < rs.size() && !rs[p].get(c)) {
            p++;
        }
        if (p == rs.size()) {
            continue;
        }
        std::swap(rs[next_row], rs[p]);
        if (aug) {
            bool t = aug->get(next_row);
            aug->set(next_row, aug->get(p));
            aug->set(p, t);
        }
        for (size_t i = 0; i < rs.size(); i++) {
            if (i != next_row && rs[i].get(c)) {
                rs[i] ^= rs[next_row];
                if (aug && aug->get(next_row)) {
                    aug->flip(i);
                }
            }
        }
        pivot_cols.push_back(c);
        next_row++;
    }
    return pivot_cols;
}

}  // namespace

size_t rank(const BitMatrix& m) {
    std::vector<BitVector> rs = m.row;
    return eliminate(rs, m.cols, nullptr).size();
}

BitMatrix transpose(const BitMatrix& m) {
    BitMatrix t(m.cols, m.rows);
    for (size_t i = 0; i < m.rows; i++) {
        for (size_t j : m.row[i].ones()) {
            t.set(j, i, true);
        }
    }
    return t;
}

std::vector<BitVector> kernel_basis(const BitMatrix& m) {
    std::vector<BitVector> rs = m.row;
    std::vector<size_t> pivots = eliminate(rs, m.cols, nullptr);

    std::vector<bool> is_pivot(m.cols, false);
    for (size_t c : pivots) {
        is_pivot[c] = true;
    }

    std::vector<BitVector> basis;
    for (size_t free = 0; free < m.cols; free++) {
        if (is_pivot[free]) {
            continue;
        }
        BitVector v(m.cols);
        v.set(free, true);
        // Each pivot row has exactly one pivot column set plus free columns.
        for (size_t r = 0; r < pivots.size(); r++) {
            if (rs[r].get(free)) {
                v.set(pivots[r], true);
            }
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

std::optional<BitVector> solve(const BitMatrix& m, const BitVector& b) {
    if (b.n != m.rows) {
        throw std::invalid_argument("rhs length must equal row count");
    }
    std::vector<BitVector> rs = m.row;
    BitVector rhs = b;
    std::vector<size_t> pivots = eliminate(rs, m.cols, &rhs);

    for (size_t i = pivots.size(); i < m.rows; i++) {
        if (rhs.get(i)) {
            return std::nullopt;
        }
    }
    BitVector x(m.cols);
    for (size_t r = 0; r < pivots.size(); r++) {
        if (rhs.get(r)) {
            x.set(pivots[r], true);
        }
    }
    return x;
}

BitVector RowBasis::reduce(BitVector v) const {
    if (v.n != cols) {
        throw std::invalid_argument("vector length must equal basis width");
    }
    for (size_t i = 0; i < rows.size(); i++) {
        if (v.get(pivots[i])) {
            v ^= rows[i];
        }
    }
    return v;
}

bool RowBasis::insert(BitVector v) {
    v = reduce(std::move(v));
    size_t p = v.lowest_set();
    if (p == v.n) {
        return false;
    }
    for (size_t i = 0; i < rows.size(); i++) {
        if (rows[i].get(p)) {
            rows[i] ^= v;
        }
    }
    rows.push_back(std::move(v));
    pivots.push_back(p);
    return true;
}

std::vector<BitVector> RowBasis::canonical_rows() const {
    std::vector<size_t> order(rows.size());
    for (size_t i = 0; i < order.size(); i++) {
        order[i] = i;
    }
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return pivots[a] < pivots[b]; });
    std::vector<BitVector> out;
    out.reserve(rows.size());
    for (size_t i : order) {
        out.push_back(rows[i]);
    }
    return out;
}

bool in_row_space(const BitMatrix& m, const BitVector& v) {
    RowBasis basis(m.cols);
    for (const auto& r : m.row) {
        basis.insert(r);
    }
    return basis.contains(v);
}

BitMatrix read_sparse(std::istream& in) {
    std::string line;
    auto next_data_line = [&](std::string& out) {
        while (std::getline(in, line)) {
            size_t pos = line.find_first_not_of(" \t\r");
            if (pos == std::string::npos || line[pos] == '#') {
                continue;
            }
            out = line;
            return true;
        }
        return false;
    };

    std::string header;
    if (!next_data_line(header)) {
        throw std::runtime_error("sparse matrix: missing header line");
    }
    std::istringstream hs(header);
    long long rows = -1, cols = -1, nnz = -1;
    if (!(hs >> rows >> cols >> nnz) || rows < 0 || cols < 0 || nnz < 0) {
        throw std::runtime_error("sparse matrix: bad header '" + header + "'");
    }

    BitMatrix m(static_cast<size_t>(rows), static_cast<size_t>(cols));
    for (long long k = 0; k < nnz; k++) {
        std::string entry;
        if (!next_data_line(entry)) {
            throw std::runtime_error("sparse matrix: expected " + std::to_string(nnz) +
                                     " entries, got " + std::to_string(k));
        }
        std::istringstream es(entry);
        long long r = -1, c = -1;
        if (!(es >> r >> c) || r < 0 || r >= rows || c < 0 || c >= cols) {
            throw std::runtime_error("sparse matrix: bad entry '" + entry + "'");
        }
        m.set(size_t(r), size_t(c), true);
    }
    return m;
}

void write_sparse(std::ostream& out, const BitMatrix& m) {
    size_t nnz = 0;
    for (const auto& r : m.row) {
        nnz += r.weight();
    }
    out << m.rows << " " << m.cols << " " << nnz << "\n";
    for (size_t i = 0; i < m.rows; i++) {
        for (size_t j : m.row[i].ones()) {
            out << i << " " << j << "\n";
        }
    }
}

BitMatrix read_sparse_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) {
        throw std::runtime_error("cannot open " + path);
    }
    return read_sparse(f);
}

void write_sparse_file(const std::string& path, const BitMatrix& m) {
    std::ofstream f(path);
    if (!f) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    write_sparse(f, m);
}

}  // namespace qsurg::f2
