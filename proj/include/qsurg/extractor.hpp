#pragma once

#include "qsurg/surgery.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qsurg::extractor {

// Fixed measurement fabric for a whole code: an injective port from the
// covered qubits into the graph and one recorded edge set E_i per base check
// inside which every matching for that check is searched.
struct ExtractorGraph {
    graph::MultiGraph graph;
    std::map<size_t, size_t> port;  // qubit -> vertex
    graph::CycleBasis basis;
    std::vector<std::vector<size_t>> check_edge_sets;  // E_i, indexed by base check
    std::optional<surgery::PortedGraph::Provenance> provenance;
    size_t code_qubits = 0;

    // Largest subset size t with a certified beta_t(X, F) >= 1 when the
    // thickening certificate does not apply (bridged graphs); 0 when unknown.
    size_t expansion_t = 0;

    std::vector<size_t> port_vertices() const;
    // Ported graph on the support of l, carrying this graph's basis and
    // provenance. The support must be covered by the port.
    surgery::PortedGraph restrict_to(const pauli::PauliOperator& l) const;
};

struct ExtractorBounds {
    size_t max_degree = 0;     // 0: 4*delta + 2*(expander degree + 1)
    size_t congestion = 4;
    size_t cycle_length = 8;
    size_t edge_set_size = 0;  // 0: levels * omega when provenance is present
    size_t edge_set_membership = 1;
    size_t matching_size = 0;  // 0: use the code's max check weight
};

// d vertex-disjoint edges joining two port images, plus the d-1 cycles they
// close through port-to-port paths.
struct Bridge {
    std::vector<size_t> edges;              // edge ids in the joined graph
    std::vector<f2::BitVector> new_cycles;  // over the joined edge count
    size_t congestion = 0;                  // of the joined basis
    size_t max_length = 0;
};

// Tanner inventory of the extractor-augmented block. Node ids: data qubits
// "Q[q]" and "QX[e]"; check qubits "H[i]", "HX[v]" and "HXC[c]". Adjacency is
// fixed; coupling lists every optional code/extractor edge.
struct EacBlock {
    pauli::StabilizerCode code;
    ExtractorGraph xgraph;
    std::vector<std::string> data_qubits;
    std::vector<std::string> check_qubits;
    std::vector<std::pair<std::string, std::string>> adjacency;
    std::vector<std::pair<std::string, std::string>> coupling;
    size_t max_node_degree = 0;  // over adjacency plus coupling
};

struct ActivatedMeasurement {
    surgery::MergedCode merged;
    // Activated coupling edges, a subset of EacBlock::coupling: the port
    // edges HX[F(q)] -- Q[q] on the support plus the H[i] -- QX[e] couplings
    // realizing each matching.
    std::vector<std::pair<std::string, std::string>> coupling;
};

// One stabilizer cycle C(S) per check plus an expander overlay, then
// decongest, thicken by max(t, ceil(1/beta)) and cellulate per level. E_i is
// recorded as every lift of C(S_i).
ExtractorGraph build_extractor(const pauli::StabilizerCode& code, Rational beta, uint64_t seed);

// Same pipeline restricted to the qubits in t_set; matchings are guaranteed
// only for even subsets of each check's ported support.
ExtractorGraph build_partial_extractor(const pauli::StabilizerCode& code,
                                       const std::vector<size_t>& t_set, Rational beta,
                                       uint64_t seed);

// Connectivity, degree, basis caps, E_i caps (size and per-edge membership),
// matching existence inside each E_i for every even subset of the check's
// ported support, and beta_d(X, F) >= 1. In the report,
// matching_max_edge_load carries the E_i membership maximum.
surgery::DesiderataReport check_extractor_desiderata(const ExtractorGraph& x,
                                                     const pauli::StabilizerCode& code, size_t d,
                                                     const ExtractorBounds& bounds = {});

EacBlock build_eac_tanner(const pauli::StabilizerCode& code, const ExtractorGraph& x);

// Merged code for a logical operator, with matchings chosen inside the
// recorded E_i sets; rejects stabilizers and operators whose support is not
// covered by the port.
ActivatedMeasurement instantiate_measurement(const EacBlock& block, const pauli::PauliOperator& l);

// Disjoint union of the two graphs plus d vertex-disjoint edges between the
// port images, with the closed cycles appended to the basis and verified
// against congestion rho+2 and length max(gamma, 8) under a retry budget.
// With same_code the inputs must be partial extractors of one code on
// disjoint domains and the per-check edge sets are unioned; otherwise the
// result covers the disjoint union of the two codes.
std::pair<ExtractorGraph, Bridge> bridge_extractors(const ExtractorGraph& x1,
                                                    const ExtractorGraph& x2, size_t d,
                                                    uint64_t seed, bool same_code = false);

// Disjoint union of two codes on a.n + b.n qubits.
pauli::StabilizerCode union_code(const pauli::StabilizerCode& a, const pauli::StabilizerCode& b);

// JSON document with the qubit inventories, fixed adjacency, coupling edges
// and one activation recipe per supplied operator (keyed by its string form).
std::string eac_to_json(const EacBlock& block,
                        const std::vector<pauli::PauliOperator>& operators = {});
// DOT rendering with code, extractor and coupling edges styled distinctly.
std::string eac_to_dot(const EacBlock& block);

}  // namespace qsurg::extractor
