#include "qsurg/pauli.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qsurg::pauli {

using f2::BitMatrix;
using f2::BitVector;

PauliOperator PauliOperator::single(size_t n, size_t q, char letter, int sign) {
    if (q >= n) {
        throw std::invalid_argument("qubit index out of range");
    }
    PauliOperator p(n);
    p.sign = sign;
    p.set_letter(q, letter);
    return p;
}

PauliOperator PauliOperator::from_string(std::string_view s) {
    int sign = +1;
    if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
        sign = s[0] == '-' ? -1 : +1;
        s.remove_prefix(1);
    }
    PauliOperator p(s.size());
    p.sign = sign;
    for (size_t q = 0; q < s.size(); q++) {
        p.set_letter(q, s[q]);
    }
    return p;
}

std::string PauliOperator::to_string() const {
    std::string s;
    if (sign < 0) {
        s += '-';
    }
    for (size_t q = 0; q < n; q++) {
        s += letter_at(q);
    }
    return s;
}

char PauliOperator::letter_at(size_t q) const {
    bool xb = x.get(q), zb = z.get(q);
    if (xb && zb) {
        return 'Y';
    }
    if (xb) {
        return 'X';
    }
    if (zb) {
        return 'Z';
    }
    return 'I';
}

void PauliOperator::set_letter(size_t q, char letter) {
    switch (letter) {
        case 'I':
            x.set(q, false);
            z.set(q, false);
            break;
        case 'X':
            x.set(q, true);
            z.set(q, false);
            break;
        case 'Y':
            x.set(q, true);
            z.set(q, true);
            break;
        case 'Z':
            x.set(q, false);
            z.set(q, true);
            break;
        default:
            throw std::invalid_argument(std::string("bad Pauli letter '") + letter + "'");
    }
}

size_t PauliOperator::weight() const {
    BitVector u = x;
    u ^= z;
    u ^= x & z;  // support = x | z
    return u.weight();
}

std::vector<size_t> PauliOperator::support() const {
    std::vector<size_t> out;
    for (size_t q = 0; q < n; q++) {
        if (x.get(q) || z.get(q)) {
            out.push_back(q);
        }
    }
    return out;
}

BitVector PauliOperator::symplectic() const {
    BitVector v(2 * n);
    for (size_t q = 0; q < n; q++) {
        if (x.get(q)) {
            v.set(q, true);
        }
        if (z.get(q)) {
            v.set(n + q, true);
        }
    }
    return v;
}

PauliOperator PauliOperator::from_symplectic(const BitVector& v, int sign) {
    if (v.n % 2 != 0) {
        throw std::invalid_argument("symplectic vector length must be even");
    }
    size_t n = v.n / 2;
    PauliOperator p(n);
    p.sign = sign;
    for (size_t q = 0; q < n; q++) {
        p.x.set(q, v.get(q));
        p.z.set(q, v.get(n + q));
    }
    return p;
}

bool commutes(const PauliOperator& p, const PauliOperator& q) {
    if (p.n != q.n) {
        throw std::invalid_argument("operator size mismatch");
    }
    return !(dot(p.x, q.z) ^ dot(p.z, q.x));
}

PhasedPauli PhasedPauli::from_operator(const PauliOperator& p) {
    PhasedPauli r;
    r.x = p.x;
    r.z = p.z;
    size_t y = (p.x & p.z).weight();
    r.phase = int(((p.sign < 0 ? 2 : 0) + y) % 4);
    return r;
}

PauliOperator PhasedPauli::to_operator() const {
    size_t y = (x & z).weight();
    int diff = ((phase - int(y % 4)) % 4 + 4) % 4;
    if (diff % 2 != 0) {
        throw std::domain_error("phase is +/-i, not a Hermitian Pauli");
    }
    PauliOperator p(x.n);
    p.x = x;
    p.z = z;
    p.sign = diff == 0 ? +1 : -1;
    return p;
}

PhasedPauli& PhasedPauli::operator*=(const PhasedPauli& o) {
    phase = int((phase + o.phase + 2 * (dot(z, o.x) ? 1 : 0)) % 4);
    x ^= o.x;
    z ^= o.z;
    return *this;
}

PauliOperator multiply(const PauliOperator& p, const PauliOperator& q) {
    if (!commutes(p, q)) {
        throw std::domain_error("product of anticommuting Paulis is not Hermitian");
    }
    return (PhasedPauli::from_operator(p) * PhasedPauli::from_operator(q)).to_operator();
}

PauliOperator multiply_i(const PauliOperator& p, const PauliOperator& q) {
    if (commutes(p, q)) {
        throw std::domain_error("i * (commuting product) is not Hermitian");
    }
    PhasedPauli r = PhasedPauli::from_operator(p) * PhasedPauli::from_operator(q);
    r.phase = (r.phase + 1) % 4;
    return r.to_operator();
}

std::vector<size_t> anticommute_set(const PauliOperator& s, const PauliOperator& l) {
    if (s.n != l.n) {
        throw std::invalid_argument("operator size mismatch");
    }
    BitVector m = (s.x & l.z) ^ (s.z & l.x);
    return m.ones();
}

StabilizerCode::StabilizerCode(size_t nq, std::vector<PauliOperator> gens)
    : n(nq), generators(std::move(gens)) {
    for (size_t i = 0; i < generators.size(); i++) {
        if (generators[i].n != n) {
            throw std::invalid_argument("generator " + std::to_string(i) +
                                        " acts on wrong qubit count");
        }
    }
    for (size_t i = 0; i < generators.size(); i++) {
        for (size_t j = i + 1; j < generators.size(); j++) {
            if (!commutes(generators[i], generators[j])) {
                throw std::invalid_argument("generators " + std::to_string(i) + " and " +
                                            std::to_string(j) + " anticommute");
            }
        }
    }
}

BitMatrix StabilizerCode::symplectic_matrix() const {
    BitMatrix m(generators.size(), 2 * n);
    for (size_t i = 0; i < generators.size(); i++) {
        m.row[i] = generators[i].symplectic();
    }
    return m;
}

size_t StabilizerCode::k() const {
    if (generators.empty()) {
        return n;
    }
    return n - f2::rank(symplectic_matrix());
}

bool StabilizerCode::in_stabilizer_span(const PauliOperator& p) const {
    if (generators.empty()) {
        return p.is_identity();
    }
    return f2::in_row_space(symplectic_matrix(), p.symplectic());
}

LdpcProfile ldpc_profile(const StabilizerCode& code) {
    LdpcProfile prof;
    std::vector<size_t> degree(code.n, 0);
    for (const auto& g : code.generators) {
        size_t w = g.weight();
        prof.omega = std::max(prof.omega, w);
        for (size_t q : g.support()) {
            degree[q]++;
        }
    }
    for (size_t d : degree) {
        prof.delta = std::max(prof.delta, d);
    }
    return prof;
}

namespace {

// Commutation of [x|z] candidate vectors against all generators is a matrix
// product against the half-swapped generator matrix.
BitMatrix swapped_generator_matrix(const StabilizerCode& code) {
    BitMatrix m(code.generators.size(), 2 * code.n);
    for (size_t i = 0; i < code.generators.size(); i++) {
        const auto& g = code.generators[i];
        for (size_t q = 0; q < code.n; q++) {
            if (g.z.get(q)) {
                m.set(i, q, true);
            }
            if (g.x.get(q)) {
                m.set(i, code.n + q, true);
            }
        }
    }
    return m;
}

bool symp_product(const BitVector& u, const BitVector& v) {
    size_t n = u.n / 2;
    bool acc = false;
    for (size_t q = 0; q < n; q++) {
        acc ^= (u.get(q) && v.get(n + q)) ^ (u.get(n + q) && v.get(q));
    }
    return acc;
}

}  // namespace

std::vector<PauliOperator> logical_basis(const StabilizerCode& code) {
    BitMatrix gs = swapped_generator_matrix(code);
    std::vector<BitVector> work;
    if (code.generators.empty()) {
        for (size_t q = 0; q < 2 * code.n; q++) {
            BitVector v(2 * code.n);
            v.set(q, true);
            work.push_back(std::move(v));
        }
    } else {
        work = f2::kernel_basis(gs);
    }

    f2::RowBasis span(2 * code.n);
    for (const auto& g : code.generators) {
        span.insert(g.symplectic());
    }

    std::vector<PauliOperator> out;
    while (true) {
        size_t ai = work.size();
        for (size_t i = 0; i < work.size(); i++) {
            if (!span.contains(work[i])) {
                ai = i;
                break;
            }
        }
        if (ai == work.size()) {
            break;
        }
        BitVector a = work[ai];
        work.erase(work.begin() + ai);

        size_t bi = work.size();
        for (size_t i = 0; i < work.size(); i++) {
            if (symp_product(a, work[i])) {
                bi = i;
                break;
            }
        }
        if (bi == work.size()) {
            throw std::logic_error("symplectic pairing failed; inconsistent centralizer");
        }
        BitVector b = work[bi];
        work.erase(work.begin() + bi);

        for (auto& w : work) {
            if (symp_product(w, b)) {
                w ^= a;
            }
            if (symp_product(w, a)) {
                w ^= b;
            }
        }
        span.insert(a);
        span.insert(b);
        out.push_back(PauliOperator::from_symplectic(a));
        out.push_back(PauliOperator::from_symplectic(b));
    }
    if (out.size() != 2 * code.k()) {
        throw std::logic_error("logical basis size disagrees with k");
    }
    return out;
}

PauliOperator logical_representative(const std::vector<PauliOperator>& basis,
                                     const BitVector& a, const BitVector& b) {
    if (basis.size() % 2 != 0 || a.n != basis.size() / 2 || b.n != basis.size() / 2) {
        throw std::invalid_argument("selector length must equal pair count");
    }
    size_t n = basis.empty() ? 0 : basis[0].n;
    PhasedPauli acc(n);
    for (size_t i = 0; i < a.n; i++) {
        if (a.get(i)) {
            acc *= PhasedPauli::from_operator(basis[2 * i]);
        }
        if (b.get(i)) {
            acc *= PhasedPauli::from_operator(basis[2 * i + 1]);
        }
    }
    size_t y = (acc.x & acc.z).weight();
    if ((acc.phase + y) % 2 != 0) {
        acc.phase = (acc.phase + 1) % 4;
    }
    PauliOperator p = acc.to_operator();
    p.sign = +1;
    return p;
}

namespace {

struct DistanceContext {
    size_t n;
    BitMatrix gs;
    f2::RowBasis span;

    explicit DistanceContext(const StabilizerCode& code)
        : n(code.n), gs(swapped_generator_matrix(code)), span(2 * code.n) {
        for (const auto& g : code.generators) {
            span.insert(g.symplectic());
        }
    }

    bool is_logical(const BitVector& v) const {
        if (!gs.apply(v).none()) {
            return false;
        }
        return !span.contains(v);
    }
};

// Enumerates every Pauli with the given sorted support; true when a logical
// operator was found.
bool scan_support(const DistanceContext& ctx, const std::vector<size_t>& supp) {
    size_t w = supp.size();
    size_t total = 1;
    for (size_t i = 0; i < w; i++) {
        total *= 3;
    }
    BitVector v(2 * ctx.n);
    for (size_t code = 0; code < total; code++) {
        size_t t = code;
        for (size_t i = 0; i < w; i++) {
            size_t d = t % 3;
            t /= 3;
            size_t q = supp[i];
            v.set(q, d == 0 || d == 2);
            v.set(ctx.n + q, d == 1 || d == 2);
        }
        if (ctx.is_logical(v)) {
            return true;
        }
    }
    return false;
}

// Enumerates w-subsets of {lo, ..., n-1} into supp[depth..]; true to stop.
bool scan_combinations(const DistanceContext& ctx, std::vector<size_t>& supp, size_t depth,
                       size_t lo, size_t w) {
    if (depth == w) {
        return scan_support(ctx, supp);
    }
    for (size_t q = lo; q + (w - depth) <= ctx.n; q++) {
        supp[depth] = q;
        if (scan_combinations(ctx, supp, depth + 1, q + 1, w)) {
            return true;
        }
    }
    return false;
}

bool weight_has_logical(const DistanceContext& ctx, size_t w, bool parallel) {
    if (!parallel || w < 2) {
        std::vector<size_t> supp(w);
        return scan_combinations(ctx, supp, 0, 0, w);
    }
    bool found = false;
#pragma omp parallel for schedule(dynamic)
    for (size_t first = 0; first <= ctx.n - w; first++) {
        bool local;
#pragma omp atomic read
        local = found;
        if (local) {
            continue;
        }
        std::vector<size_t> supp(w);
        supp[0] = first;
        if (scan_combinations(ctx, supp, 1, first + 1, w)) {
#pragma omp atomic write
            found = true;
        }
    }
    return found;
}

std::optional<size_t> distance_impl(const StabilizerCode& code, size_t max_n, bool parallel) {
    if (code.n > max_n) {
        throw std::invalid_argument("n = " + std::to_string(code.n) +
                                    " exceeds brute-force cutoff " + std::to_string(max_n));
    }
    if (code.k() == 0) {
        return std::nullopt;
    }
    DistanceContext ctx(code);
    for (size_t w = 1; w <= code.n; w++) {
        if (weight_has_logical(ctx, w, parallel)) {
            return w;
        }
    }
    throw std::logic_error("no logical found despite k > 0");
}

}  // namespace

std::optional<size_t> distance_bruteforce(const StabilizerCode& code, size_t max_n) {
    return distance_impl(code, max_n, true);
}

std::optional<size_t> distance_bruteforce_serial(const StabilizerCode& code, size_t max_n) {
    return distance_impl(code, max_n, false);
}

DistanceBound distance_lower_bound(const StabilizerCode& code, size_t max_weight) {
    if (code.k() == 0) {
        throw std::invalid_argument("code has k = 0, no logicals to bound");
    }
    DistanceContext ctx(code);
    size_t cap = std::min(max_weight, code.n);
    for (size_t w = 1; w <= cap; w++) {
        if (weight_has_logical(ctx, w, true)) {
            return {w, true};
        }
    }
    return {cap + 1, false};
}

namespace {

bool next_data_line(std::istream& in, std::string& out) {
    std::string line;
    while (std::getline(in, line)) {
        size_t pos = line.find_first_not_of(" \t\r");
        if (pos == std::string::npos || line[pos] == '#') {
            continue;
        }
        size_t end = line.find_last_not_of(" \t\r");
        out = line.substr(pos, end - pos + 1);
        return true;
    }
    return false;
}

StabilizerCode read_css(std::istream& in) {
    BitMatrix hx = f2::read_sparse(in);
    BitMatrix hz = f2::read_sparse(in);
    if (hx.cols != hz.cols) {
        throw std::runtime_error("css: HX and HZ qubit counts differ");
    }
    size_t n = hx.cols;
    std::vector<PauliOperator> gens;
    for (const auto& r : hx.row) {
        PauliOperator p(n);
        p.x = r;
        gens.push_back(std::move(p));
    }
    for (const auto& r : hz.row) {
        PauliOperator p(n);
        p.z = r;
        gens.push_back(std::move(p));
    }
    return StabilizerCode(n, std::move(gens));
}

}  // namespace

StabilizerCode read_code(std::istream& in) {
    std::string line;
    if (!next_data_line(in, line)) {
        throw std::runtime_error("code file: missing header");
    }
    std::istringstream hs(line);
    std::string tok;
    hs >> tok;
    if (tok == "css") {
        return read_css(in);
    }

    long long n = -1;
    try {
        n = std::stoll(tok);
    } catch (const std::exception&) {
        n = -1;
    }
    if (n < 0) {
        throw std::runtime_error("code file: bad qubit count '" + tok + "'");
    }

    std::vector<PauliOperator> gens;
    while (next_data_line(in, line)) {
        PauliOperator p = PauliOperator::from_string(line);
        if (p.n != size_t(n)) {
            throw std::runtime_error("code file: generator '" + line + "' has wrong length");
        }
        gens.push_back(std::move(p));
    }
    return StabilizerCode(size_t(n), std::move(gens));
}

void write_code(std::ostream& out, const StabilizerCode& code) {
    out << code.n << "\n";
    for (const auto& g : code.generators) {
        out << g.to_string() << "\n";
    }
}

StabilizerCode read_code_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) {
        throw std::runtime_error("cannot open " + path);
    }
    return read_code(f);
}

StabilizerCode steane_code() {
    std::vector<PauliOperator> gens;
    for (const char* s : {"XIXIXIX", "IXXIIXX", "IIIXXXX", "ZIZIZIZ", "IZZIIZZ", "IIIZZZZ"}) {
        gens.push_back(PauliOperator::from_string(s));
    }
    return StabilizerCode(7, std::move(gens));
}

StabilizerCode c422_code() {
    std::vector<PauliOperator> gens;
    gens.push_back(PauliOperator::from_string("XXXX"));
    gens.push_back(PauliOperator::from_string("ZZZZ"));
    return StabilizerCode(4, std::move(gens));
}

StabilizerCode bell_code() {
    std::vector<PauliOperator> gens;
    gens.push_back(PauliOperator::from_string("XX"));
    gens.push_back(PauliOperator::from_string("ZZ"));
    return StabilizerCode(2, std::move(gens));
}

StabilizerCode toric_code_2x2() {
    // Edges 0..3 horizontal h(r,c) = 2r+c, edges 4..7 vertical v(r,c) = 4+2r+c.
    auto h = [](size_t r, size_t c) { return 2 * r + c; };
    auto v = [](size_t r, size_t c) { return 4 + 2 * r + c; };
    std::vector<PauliOperator> gens;
    for (size_t r = 0; r < 2; r++) {
        for (size_t c = 0; c < 2; c++) {
            PauliOperator star(8);
            star.x.set(h(r, c), true);
            star.x.set(h(r, 1 - c), true);
            star.x.set(v(r, c), true);
            star.x.set(v(1 - r, c), true);
            gens.push_back(std::move(star));
        }
    }
    for (size_t r = 0; r < 2; r++) {
        for (size_t c = 0; c < 2; c++) {
            PauliOperator plaq(8);
            plaq.z.set(h(r, c), true);
            plaq.z.set(h(1 - r, c), true);
            plaq.z.set(v(r, c), true);
            plaq.z.set(v(r, 1 - c), true);
            gens.push_back(std::move(plaq));
        }
    }
    return StabilizerCode(8, std::move(gens));
}

}  // namespace qsurg::pauli
