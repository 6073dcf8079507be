#pragma once

#include "qsurg/f2la.hpp"
#include "qsurg/rational.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qsurg::graph {

struct Edge {
    size_t u = 0;
    size_t v = 0;
};

// Undirected multigraph with stable edge ids. Parallel edges are allowed,
// self-loops are not.
class MultiGraph {
public:
    MultiGraph() = default;
    explicit MultiGraph(size_t vertices);

    size_t add_vertex();
    size_t add_edge(size_t u, size_t v);

    size_t num_vertices() const { return nv_; }
    size_t num_edges() const { return edges_.size(); }
    const Edge& edge(size_t id) const;
    const std::vector<size_t>& incident(size_t v) const;
    size_t degree(size_t v) const;
    size_t max_degree() const;
    size_t other_endpoint(size_t edge_id, size_t v) const;
    bool has_edge(size_t u, size_t v) const;

    f2::BitMatrix incidence_matrix() const;
    std::vector<size_t> components() const;
    size_t component_count() const;
    bool connected() const;

private:
    size_t nv_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::vector<size_t>> incident_;
};

struct CycleBasis {
    std::vector<f2::BitVector> cycles;
    size_t rho = 0;
    size_t max_length = 0;
    std::vector<size_t> ordering;
};

struct BasisPartition {
    std::vector<std::vector<size_t>> parts;
    size_t t = 0;
};

std::vector<size_t> basis_edge_loads(const std::vector<f2::BitVector>& cycles, size_t num_edges);
size_t basis_congestion(const std::vector<f2::BitVector>& cycles, size_t num_edges);
size_t basis_max_length(const std::vector<f2::BitVector>& cycles);
bool is_cycle_basis(const MultiGraph& g, const std::vector<f2::BitVector>& cycles);

std::vector<size_t> spanning_forest(const MultiGraph& g);
std::optional<std::vector<size_t>> bfs_path(const MultiGraph& g, size_t from, size_t to);
std::vector<f2::BitVector> simple_cycle_decomposition(const MultiGraph& g, const f2::BitVector& cycle);

CycleBasis fundamental_cycle_basis(const MultiGraph& g);
CycleBasis decongest(const MultiGraph& g, uint64_t seed);
BasisPartition greedy_partition(const CycleBasis& basis);

// Cartesian product with a line graph. Vertex (v, r) has id r*|V| + v;
// horizontal edge (e, r) has id r*|E| + e; the vertical edge joining
// (v, r) to (v, r+1) has id |E|*levels + r*|V| + v.
struct Thickened {
    MultiGraph graph;
    size_t base_vertices = 0;
    size_t base_edges = 0;
    size_t levels = 1;

    size_t vertex_at(size_t v, size_t level) const { return level * base_vertices + v; }
    size_t vertex_base(size_t vertex_id) const { return vertex_id % base_vertices; }
    size_t vertex_level(size_t vertex_id) const { return vertex_id / base_vertices; }

    bool is_vertical(size_t edge_id) const { return edge_id >= base_edges * levels; }
    size_t horizontal_edge(size_t e, size_t level) const { return level * base_edges + e; }
    size_t vertical_edge(size_t v, size_t level) const {
        return base_edges * levels + level * base_vertices + v;
    }
    size_t edge_base(size_t edge_id) const {
        if (is_vertical(edge_id)) {
            return (edge_id - base_edges * levels) % base_vertices;
        }
        return edge_id % base_edges;
    }
    size_t edge_level(size_t edge_id) const {
        if (is_vertical(edge_id)) {
            return (edge_id - base_edges * levels) / base_vertices;
        }
        return edge_id / base_edges;
    }
};

Thickened thicken(const MultiGraph& g, size_t levels);
f2::BitVector lift_cycle(const Thickened& th, const f2::BitVector& base_cycle, size_t level);
f2::BitVector vertical_square(const Thickened& th, size_t base_edge, size_t level);

CycleBasis thickened_cycle_basis(const Thickened& th, const CycleBasis& base,
                                 const std::vector<size_t>& level_assignment);

// Basis of the span of the vertical squares chosen greedily to keep per-edge
// usage within edge_caps. Loads are reported honestly in the result; callers
// re-verify against their own caps.
CycleBasis low_congestion_square_basis(const Thickened& th, const std::vector<size_t>& edge_caps,
                                       size_t length_cap, uint64_t seed);

struct Cellulation {
    std::vector<size_t> added_edges;
    std::vector<std::array<size_t, 3>> triangles;
};

Cellulation cellulate(MultiGraph& g, const f2::BitVector& cycle);

Rational cheeger_exact(const MultiGraph& g);
Rational cheeger_exact_serial(const MultiGraph& g);
Rational relative_cheeger_exact(const MultiGraph& g, const std::vector<size_t>& port, size_t t);
Rational relative_cheeger_exact_serial(const MultiGraph& g, const std::vector<size_t>& port,
                                       size_t t);

// table[r][mask] = minimum boundary size over all vertex subsets of the
// thickened graph whose restriction to level r equals mask (a bitmask over
// base vertices). All relative Cheeger constants of ports living on a single
// level can be answered from the table.
std::vector<std::vector<size_t>> level_boundary_table(const Thickened& th);
std::vector<std::vector<size_t>> level_boundary_table_serial(const Thickened& th);
Rational relative_cheeger_from_table(const std::vector<size_t>& row, uint32_t port_mask, size_t t);

struct ExpanderResult {
    MultiGraph graph;
    std::optional<Rational> beta_exact;
    double beta_bound = 0.0;
    std::string certificate;
    size_t degree = 0;
};

ExpanderResult build_expander(size_t n, Rational target_beta, size_t max_degree, uint64_t seed);

std::vector<double> laplacian_eigenvalues(const MultiGraph& g);

std::string write_graph(const MultiGraph& g);
MultiGraph read_graph(const std::string& text);
MultiGraph read_graph_file(const std::string& path);
void write_graph_file(const MultiGraph& g, const std::string& path);
std::string to_dot(const MultiGraph& g, const std::vector<std::string>& vertex_labels = {});
std::string to_dot(const Thickened& th);

}  // namespace qsurg::graph
