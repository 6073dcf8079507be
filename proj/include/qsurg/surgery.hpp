#pragma once

#include "qsurg/graph.hpp"
#include "qsurg/pauli.hpp"
#include "qsurg/rational.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qsurg::surgery {

// Measurement graph together with the injective port map from the support of
// the measured operator into its vertices, and the cycle basis whose cycles
// become the X checks of the merged code.
struct PortedGraph {
    graph::MultiGraph graph;
    std::map<size_t, size_t> port;  // qubit -> vertex
    graph::CycleBasis basis;

    // Filled in by build_measurement_graph; lets check_desiderata certify
    // relative expansion on graphs too large for exhaustive enumeration.
    struct Provenance {
        size_t base_vertices = 0;
        size_t base_edges = 0;
        size_t check_edges = 0;  // base edges contributed by the per-check step
        size_t expander_degree = 0;
        size_t levels = 1;
        double beta_lower = 0.0;  // lower bound on the base graph Cheeger constant
        bool beta_exact = false;
    };
    std::optional<Provenance> provenance;

    std::vector<size_t> port_vertices() const;
    bool port_valid(const pauli::PauliOperator& l) const;
};

// Merged code Q(L, G, f): one new qubit per edge, vertex checks A_v, cycle
// checks B_C, and the deformed code checks with their recorded matchings.
struct MergedCode {
    pauli::StabilizerCode base;
    size_t edge_qubits = 0;
    pauli::PauliOperator target;                        // the measured operator, padded
    std::vector<pauli::PauliOperator> vertex_checks;    // indexed by vertex
    std::vector<pauli::PauliOperator> cycle_checks;     // indexed by basis cycle
    std::vector<pauli::PauliOperator> deformed_checks;  // indexed by base check
    std::vector<std::vector<size_t>> matchings;         // edge ids per base check

    size_t total_qubits() const { return base.n + edge_qubits; }
    std::vector<pauli::PauliOperator> all_checks() const;
    pauli::StabilizerCode merged_code() const;
    // One line per merged check recording where it came from.
    std::string provenance() const;
};

struct DesiderataBounds {
    size_t max_degree = 16;
    size_t congestion = 4;
    size_t cycle_length = 8;
    size_t matching_size = 0;  // 0: use the code's max check weight
    size_t edge_load = 4;
};

struct DesiderataReport {
    bool port_ok = false;
    bool connected = false;
    size_t max_degree = 0;
    size_t basis_congestion = 0;
    size_t basis_max_length = 0;
    size_t matching_max_size = 0;
    size_t matching_max_edge_load = 0;
    double relative_beta = 0.0;
    bool beta_exact = false;
    std::string beta_method;

    bool pass_port = false;
    bool pass_connected = false;
    bool pass_degree = false;
    bool pass_basis = false;
    bool pass_matching = false;
    bool pass_expansion = false;
    std::string diagnostic;

    bool all_pass() const {
        return pass_port && pass_connected && pass_degree && pass_basis && pass_matching &&
               pass_expansion;
    }
    std::string summary() const;
};

// Edge set with odd incidence exactly on `targets`, restricted to `within`
// when given. Returns nullopt when no such set exists; throws on odd target
// counts.
std::optional<std::vector<size_t>> path_matching(
    const graph::MultiGraph& g, const std::vector<size_t>& targets,
    const std::optional<std::vector<size_t>>& within = std::nullopt);

// When `check_edge_sets` is given it must hold one allowed-edge list per base
// check; the matching for check i is then searched inside that list only.
MergedCode build_merged_code(const pauli::StabilizerCode& code, const pauli::PauliOperator& l,
                             const PortedGraph& pg,
                             const std::vector<std::vector<size_t>>* check_edge_sets = nullptr);

// Five step construction: ported base vertices, per-check matchings, expander
// overlay, decongestion + partition, thickening by max(t, ceil(1/beta)), and
// per-level cellulation of the assigned cycles.
PortedGraph build_measurement_graph(const pauli::StabilizerCode& code,
                                    const pauli::PauliOperator& l, Rational beta, uint64_t seed);

DesiderataReport check_desiderata(const PortedGraph& pg, const pauli::StabilizerCode& code,
                                  const pauli::PauliOperator& l, size_t d,
                                  const DesiderataBounds& bounds = {});

}  // namespace qsurg::surgery
