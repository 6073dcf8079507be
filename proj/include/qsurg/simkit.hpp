#pragma once

#include "qsurg/pauli.hpp"
#include "qsurg/surgery.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace qsurg::sim {

// Stabilizer frame: stab[i] generate the state, destab[i] anticommutes with
// stab[i] and commutes with every other row.
struct Tableau {
    size_t n = 0;
    std::vector<pauli::PauliOperator> stab;
    std::vector<pauli::PauliOperator> destab;

    static Tableau zero_state(size_t n);
    bool valid_frame() const;
};

struct RandomSource {
    virtual ~RandomSource() = default;
    virtual int next_sign() = 0;
};

struct SeededSource final : RandomSource {
    std::mt19937_64 rng;
    explicit SeededSource(uint64_t seed) : rng(seed) {}
    int next_sign() override { return (rng() & 1) ? -1 : +1; }
};

// Replays a fixed branch; +1 past the end of the script, with the overflow
// flagged so branch enumeration knows to extend the prefix.
struct ForcedSource final : RandomSource {
    std::vector<int> bits;
    size_t used = 0;
    bool overflowed = false;
    ForcedSource() = default;
    explicit ForcedSource(std::vector<int> b) : bits(std::move(b)) {}
    int next_sign() override {
        if (used < bits.size()) {
            return bits[used++];
        }
        ++used;
        overflowed = true;
        return +1;
    }
};

struct MeasureResult {
    int outcome = +1;
    bool deterministic = false;
};

// Projective measurement of p. Deterministic outcomes leave the state alone;
// indeterminate ones take `forced` when given, else draw from `random`.
MeasureResult measure_pauli(Tableau& t, const pauli::PauliOperator& p,
                            std::optional<int> forced = std::nullopt,
                            RandomSource* random = nullptr);

void apply_pauli(Tableau& t, const pauli::PauliOperator& p);
// Outcome sign when p is (up to sign) in the stabilizer group, else nullopt.
std::optional<int> deterministic_sign(const Tableau& t, const pauli::PauliOperator& p);
bool is_stabilized(const Tableau& t, const pauli::PauliOperator& p);
// Unique signed generating set (symplectic row reduction), comparable across
// tableaus.
std::vector<pauli::PauliOperator> canonical_generators(const Tableau& t);

// Some +1 joint eigenstate of all generators (remaining logicals pinned by
// the computational frame).
Tableau code_state(const pauli::StabilizerCode& code);

struct ProtocolTrace {
    std::vector<int> epsilon;          // per-vertex merge outcomes
    int sigma = +1;                    // product of epsilon
    std::vector<int> omega;            // per-edge split outcomes
    std::vector<size_t> corrections;   // code qubits that received L_q
    std::vector<std::string> log;      // "stage id outcome" lines
};

// Four stage measurement protocol on `state` (a code state of `code` padded
// to the merged qubit count). Returns the trace; `state` holds the final
// tableau.
ProtocolTrace run_protocol(const pauli::StabilizerCode& code, const surgery::MergedCode& merged,
                           Tableau& state, RandomSource& random);

struct FaultLocation {
    enum class Kind { qubit, record, split_record };
    Kind kind = Kind::qubit;
    size_t slot = 0;   // qubit: time slot; record: measurement event index
    size_t index = 0;  // qubit id, check event id, or edge id
    char letter = 'I';

    std::string to_string() const;
    static FaultLocation parse(const std::string& line);
    bool operator==(const FaultLocation&) const = default;
};

struct FaultSearchResult {
    size_t searched_weight = 0;
    bool exhaustive = true;
    std::optional<std::vector<FaultLocation>> violation;
    std::string verdict;
};

// Phenomenological space-time fault enumeration over `rounds` repetitions of
// each segment (before / merge / after) up to max_weight, with single-qubit
// Pauli faults and measurement record flips. Violations are replayed before
// being reported.
FaultSearchResult fault_search(const pauli::StabilizerCode& code, const surgery::MergedCode& merged,
                               size_t rounds, size_t max_weight);
FaultSearchResult fault_search_serial(const pauli::StabilizerCode& code,
                                      const surgery::MergedCode& merged, size_t rounds,
                                      size_t max_weight);

// True when the fault set evades every detector yet flips the recorded
// outcome or the logical frame.
bool replay_faults(const pauli::StabilizerCode& code, const surgery::MergedCode& merged,
                   size_t rounds, const std::vector<FaultLocation>& faults);

}  // namespace qsurg::sim
