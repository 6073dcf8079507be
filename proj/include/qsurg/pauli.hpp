#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qsurg/f2la.hpp"

namespace qsurg::pauli {

// Hermitian n-qubit Pauli: sign * tensor product of I/X/Y/Z letters.
// Y on qubit q <=> x bit and z bit both set.
struct PauliOperator {
    size_t n = 0;
    f2::BitVector x, z;
    int sign = +1;

    PauliOperator() = default;
    explicit PauliOperator(size_t len) : n(len), x(len), z(len) {}

    static PauliOperator identity(size_t n) { return PauliOperator(n); }
    static PauliOperator single(size_t n, size_t q, char letter, int sign = +1);
    // "[+-]?[IXYZ]+"
    static PauliOperator from_string(std::string_view s);
    std::string to_string() const;

    char letter_at(size_t q) const;
    void set_letter(size_t q, char letter);
    bool is_identity() const { return x.none() && z.none(); }
    size_t weight() const;
    std::vector<size_t> support() const;

    // [x | z], length 2n.
    f2::BitVector symplectic() const;
    static PauliOperator from_symplectic(const f2::BitVector& v, int sign = +1);

    bool operator==(const PauliOperator&) const = default;
};

bool commutes(const PauliOperator& p, const PauliOperator& q);

// Pauli with an explicit i^phase prefactor; closed under multiplication.
struct PhasedPauli {
    f2::BitVector x, z;
    int phase = 0;  // mod 4

    PhasedPauli() = default;
    explicit PhasedPauli(size_t n) : x(n), z(n) {}
    static PhasedPauli from_operator(const PauliOperator& p);
    // Throws std::domain_error when the phase is not +/-1.
    PauliOperator to_operator() const;

    PhasedPauli& operator*=(const PhasedPauli& o);
    friend PhasedPauli operator*(PhasedPauli a, const PhasedPauli& b) {
        a *= b;
        return a;
    }
};

// p*q for commuting operators (Hermitian result); throws std::domain_error
// when p and q anticommute.
PauliOperator multiply(const PauliOperator& p, const PauliOperator& q);
// i*p*q for anticommuting operators.
PauliOperator multiply_i(const PauliOperator& p, const PauliOperator& q);

// Qubits where the two letters differ and neither is I.
std::vector<size_t> anticommute_set(const PauliOperator& s, const PauliOperator& l);

struct StabilizerCode {
    size_t n = 0;
    std::vector<PauliOperator> generators;

    StabilizerCode() = default;
    // Verifies pairwise commutation; throws std::invalid_argument otherwise.
    StabilizerCode(size_t n, std::vector<PauliOperator> gens);

    size_t k() const;
    // Rows are the generators' [x | z] vectors.
    f2::BitMatrix symplectic_matrix() const;
    bool in_stabilizer_span(const PauliOperator& p) const;  // up to sign
};

struct LdpcProfile {
    size_t omega = 0;  // max check weight
    size_t delta = 0;  // max per-qubit check degree
    bool operator==(const LdpcProfile&) const = default;
};

LdpcProfile ldpc_profile(const StabilizerCode& code);

// 2k operators ordered Xbar_1, Zbar_1, ..., Xbar_k, Zbar_k: each pair
// anticommutes, everything else commutes, all commute with the generators,
// none is in the stabilizer span. Deterministic for a fixed generator list.
std::vector<PauliOperator> logical_basis(const StabilizerCode& code);

// Hermitian +1-sign representative of prod_i Xbar_i^a(i) Zbar_i^b(i) given the
// logical_basis output; Y pairs pick up the i factor automatically.
PauliOperator logical_representative(const std::vector<PauliOperator>& basis,
                                     const f2::BitVector& a, const f2::BitVector& b);

// Minimum weight of a Pauli commuting with every generator but outside the
// stabilizer span; nullopt when k = 0. Refuses n > max_n.
std::optional<size_t> distance_bruteforce(const StabilizerCode& code, size_t max_n = 22);
std::optional<size_t> distance_bruteforce_serial(const StabilizerCode& code, size_t max_n = 22);

struct DistanceBound {
    size_t bound = 0;  // distance itself when exact, else "distance >= bound"
    bool exact = false;
};
// Weight-bounded search for larger codes; reported as a lower bound unless a
// logical was found within the budget.
DistanceBound distance_lower_bound(const StabilizerCode& code, size_t max_weight);

// Text format: first significant line is n, then one generator per line as
// [+-]?[IXYZ]{n}. '#' starts a comment. The alternative CSS form starts with
// the token "css" followed by two sparse matrices (HX then HZ) in the f2la
// text format.
StabilizerCode read_code(std::istream& in);
void write_code(std::ostream& out, const StabilizerCode& code);
StabilizerCode read_code_file(const std::string& path);

// Built-in fixtures.
StabilizerCode steane_code();       // [[7,1,3]]
StabilizerCode c422_code();         // [[4,2,2]]
StabilizerCode bell_code();         // [[2,0]]
StabilizerCode toric_code_2x2();    // [[8,2,2]], redundant check set

}  // namespace qsurg::pauli
