#include "qsurg/graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qsurg::graph {

using f2::BitMatrix;
using f2::BitVector;

MultiGraph::MultiGraph(size_t vertices) : nv_(vertices), incident_(vertices) {}

size_t MultiGraph::add_vertex() {
    incident_.emplace_back();
    return nv_++;
}

size_t MultiGraph::add_edge(size_t u, size_t v) {
    if (u >= nv_ || v >= nv_) {
        throw std::invalid_argument("graph: edge endpoint out of range");
    }
    if (u == v) {
        throw std::invalid_argument("graph: self-loops are not allowed");
    }
    size_t id = edges_.size();
    edges_.push_back({u, v});
    incident_[u].push_back(id);
    incident_[v].push_back(id);
    return id;
}

const Edge& MultiGraph::edge(size_t id) const {
    if (id >= edges_.size()) {
        throw std::invalid_argument("graph: edge id out of range");
    }
    return edges_[id];
}

const std::vector<size_t>& MultiGraph::incident(size_t v) const {
    if (v >= nv_) {
        throw std::invalid_argument("graph: vertex out of range");
    }
    return incident_[v];
}

size_t MultiGraph::degree(size_t v) const {
    return incident(v).size();
}

size_t MultiGraph::max_degree() const {
    size_t d = 0;
    for (size_t v = 0; v < nv_; ++v) {
        d = std::max(d, incident_[v].size());
    }
    return d;
}

size_t MultiGraph::other_endpoint(size_t edge_id, size_t v) const {
    const Edge& e = edge(edge_id);
    if (e.u == v) {
        return e.v;
    }
    if (e.v == v) {
        return e.u;
    }
    throw std::invalid_argument("graph: vertex not an endpoint of edge");
}

bool MultiGraph::has_edge(size_t u, size_t v) const {
    if (u >= nv_ || v >= nv_) {
        return false;
    }
    const auto& inc = incident_[u].size() <= incident_[v].size() ? incident_[u] : incident_[v];
    size_t from = incident_[u].size() <= incident_[v].size() ? u : v;
    size_t to = from == u ? v : u;
    for (size_t id : inc) {
        if (other_endpoint(id, from) == to) {
            return true;
        }
    }
    return false;
}

BitMatrix MultiGraph::incidence_matrix() const {
    BitMatrix m(nv_, edges_.size());
    for (size_t id = 0; id < edges_.size(); ++id) {
        m.set(edges_[id].u, id, true);
        m.set(edges_[id].v, id, true);
    }
    return m;
}

std::vector<size_t> MultiGraph::components() const {
    std::vector<size_t> comp(nv_, SIZE_MAX);
    size_t next = 0;
    for (size_t s = 0; s < nv_; ++s) {
        if (comp[s] != SIZE_MAX) {
            continue;
        }
        comp[s] = next;
        std::queue<size_t> q;
        q.push(s);
        while (!q.empty()) {
            size_t v = q.front();
            q.pop();
            for (size_t id : incident_[v]) {
                size_t w = other_endpoint(id, v);
                if (comp[w] == SIZE_MAX) {
                    comp[w] = next;
                    q.push(w);
                }
            }
        }
        ++next;
    }
    return comp;
}

size_t MultiGraph::component_count() const {
    if (nv_ == 0) {
        return 0;
    }
    auto comp = components();
    return *std::max_element(comp.begin(), comp.end()) + 1;
}

bool MultiGraph::connected() const {
    return nv_ <= 1 || component_count() == 1;
}

std::vector<size_t> basis_edge_loads(const std::vector<BitVector>& cycles, size_t num_edges) {
    std::vector<size_t> loads(num_edges, 0);
    for (const auto& c : cycles) {
        for (size_t e : c.ones()) {
            ++loads[e];
        }
    }
    return loads;
}

size_t basis_congestion(const std::vector<BitVector>& cycles, size_t num_edges) {
    auto loads = basis_edge_loads(cycles, num_edges);
    return loads.empty() ? 0 : *std::max_element(loads.begin(), loads.end());
}

size_t basis_max_length(const std::vector<BitVector>& cycles) {
    size_t len = 0;
    for (const auto& c : cycles) {
        len = std::max(len, c.weight());
    }
    return len;
}

bool is_cycle_basis(const MultiGraph& g, const std::vector<BitVector>& cycles) {
    BitMatrix inc = g.incidence_matrix();
    for (const auto& c : cycles) {
        if (c.n != g.num_edges() || inc.apply(c).any()) {
            return false;
        }
    }
    if (f2::rank(BitMatrix::from_rows(cycles)) != cycles.size()) {
        return false;
    }
    size_t expected = g.num_edges() + g.component_count() - g.num_vertices();
    return cycles.size() == expected;
}

namespace {

struct UnionFind {
    std::vector<size_t> parent;
    explicit UnionFind(size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), size_t(0));
    }
    size_t find(size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    bool unite(size_t a, size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) {
            return false;
        }
        parent[b] = a;
        return true;
    }
};

struct RootedForest {
    std::vector<size_t> parent_vertex;
    std::vector<size_t> parent_edge;
    std::vector<size_t> depth;
};

// BFS orientation of a given forest (edge ids), roots at the lowest vertex of
// each component.
RootedForest orient_forest(const MultiGraph& g, const std::vector<size_t>& tree_edges) {
    size_t nv = g.num_vertices();
    std::vector<std::vector<size_t>> adj(nv);
    for (size_t id : tree_edges) {
        adj[g.edge(id).u].push_back(id);
        adj[g.edge(id).v].push_back(id);
    }
    RootedForest f;
    f.parent_vertex.assign(nv, SIZE_MAX);
    f.parent_edge.assign(nv, SIZE_MAX);
    f.depth.assign(nv, 0);
    std::vector<char> seen(nv, 0);
    for (size_t s = 0; s < nv; ++s) {
        if (seen[s]) {
            continue;
        }
        seen[s] = 1;
        std::queue<size_t> q;
        q.push(s);
        while (!q.empty()) {
            size_t v = q.front();
            q.pop();
            for (size_t id : adj[v]) {
                size_t w = g.other_endpoint(id, v);
                if (!seen[w]) {
                    seen[w] = 1;
                    f.parent_vertex[w] = v;
                    f.parent_edge[w] = id;
                    f.depth[w] = f.depth[v] + 1;
                    q.push(w);
                }
            }
        }
    }
    return f;
}

BitVector fundamental_cycle(const MultiGraph& g, const RootedForest& f, size_t edge_id) {
    BitVector c(g.num_edges());
    c.flip(edge_id);
    size_t x = g.edge(edge_id).u;
    size_t y = g.edge(edge_id).v;
    while (f.depth[x] > f.depth[y]) {
        c.flip(f.parent_edge[x]);
        x = f.parent_vertex[x];
    }
    while (f.depth[y] > f.depth[x]) {
        c.flip(f.parent_edge[y]);
        y = f.parent_vertex[y];
    }
    while (x != y) {
        c.flip(f.parent_edge[x]);
        c.flip(f.parent_edge[y]);
        x = f.parent_vertex[x];
        y = f.parent_vertex[y];
    }
    return c;
}

void finish_basis(const MultiGraph& g, CycleBasis& b) {
    b.rho = basis_congestion(b.cycles, g.num_edges());
    b.max_length = basis_max_length(b.cycles);
    if (b.ordering.empty()) {
        b.ordering.resize(b.cycles.size());
        std::iota(b.ordering.begin(), b.ordering.end(), size_t(0));
    }
    if (!is_cycle_basis(g, b.cycles)) {
        throw std::logic_error("graph: constructed cycle set is not a basis");
    }
}

}  // namespace

std::vector<size_t> spanning_forest(const MultiGraph& g) {
    UnionFind uf(g.num_vertices());
    std::vector<size_t> tree;
    for (size_t id = 0; id < g.num_edges(); ++id) {
        if (uf.unite(g.edge(id).u, g.edge(id).v)) {
            tree.push_back(id);
        }
    }
    return tree;
}

std::optional<std::vector<size_t>> bfs_path(const MultiGraph& g, size_t from, size_t to) {
    if (from >= g.num_vertices() || to >= g.num_vertices()) {
        throw std::invalid_argument("graph: path endpoint out of range");
    }
    if (from == to) {
        return std::vector<size_t>{};
    }
    std::vector<size_t> via(g.num_vertices(), SIZE_MAX);
    std::queue<size_t> q;
    q.push(from);
    std::vector<char> seen(g.num_vertices(), 0);
    seen[from] = 1;
    while (!q.empty()) {
        size_t v = q.front();
        q.pop();
        for (size_t id : g.incident(v)) {
            size_t w = g.other_endpoint(id, v);
            if (!seen[w]) {
                seen[w] = 1;
                via[w] = id;
                q.push(w);
            }
        }
    }
    if (!seen[to]) {
        return std::nullopt;
    }
    std::vector<size_t> path;
    size_t v = to;
    while (v != from) {
        path.push_back(via[v]);
        v = g.other_endpoint(via[v], v);
    }
    std::reverse(path.begin(), path.end());
    return path;
}

std::vector<BitVector> simple_cycle_decomposition(const MultiGraph& g, const BitVector& cycle) {
    if (cycle.n != g.num_edges()) {
        throw std::invalid_argument("graph: cycle vector has wrong length");
    }
    if (g.incidence_matrix().apply(cycle).any()) {
        throw std::invalid_argument("graph: vector is not a cycle");
    }
    std::vector<char> remaining(g.num_edges(), 0);
    for (size_t e : cycle.ones()) {
        remaining[e] = 1;
    }
    std::vector<BitVector> out;
    for (size_t start = 0; start < g.num_edges(); ++start) {
        // Walk from this edge's endpoint, leaving on a remaining cycle edge
        // other than the one we came on; every vertex keeps even remaining
        // degree so the walk never gets stuck. Cut the walk at the first
        // vertex repetition to peel off one simple cycle, and repeat until
        // this edge has been consumed.
        while (remaining[start]) {
            BitVector piece(g.num_edges());
            std::vector<size_t> vertex_stack{g.edge(start).u};
            std::vector<size_t> edge_stack;
            std::vector<char> on_stack(g.num_vertices(), 0);
            on_stack[g.edge(start).u] = 1;
            size_t at = g.edge(start).u;
            while (true) {
                size_t next_edge = SIZE_MAX;
                for (size_t id : g.incident(at)) {
                    if (remaining[id] && (edge_stack.empty() || id != edge_stack.back())) {
                        next_edge = id;
                        break;
                    }
                }
                if (next_edge == SIZE_MAX) {
                    throw std::logic_error("graph: cycle walk stuck");
                }
                size_t to = g.other_endpoint(next_edge, at);
                if (on_stack[to]) {
                    piece.flip(next_edge);
                    remaining[next_edge] = 0;
                    while (vertex_stack.back() != to) {
                        on_stack[vertex_stack.back()] = 0;
                        vertex_stack.pop_back();
                        piece.flip(edge_stack.back());
                        remaining[edge_stack.back()] = 0;
                        edge_stack.pop_back();
                    }
                    break;
                }
                on_stack[to] = 1;
                vertex_stack.push_back(to);
                edge_stack.push_back(next_edge);
                at = to;
            }
            out.push_back(piece);
        }
    }
    return out;
}

CycleBasis fundamental_cycle_basis(const MultiGraph& g) {
    std::vector<size_t> tree = spanning_forest(g);
    std::vector<char> in_tree(g.num_edges(), 0);
    for (size_t id : tree) {
        in_tree[id] = 1;
    }
    RootedForest forest = orient_forest(g, tree);
    CycleBasis b;
    for (size_t id = 0; id < g.num_edges(); ++id) {
        if (!in_tree[id]) {
            b.cycles.push_back(fundamental_cycle(g, forest, id));
        }
    }
    finish_basis(g, b);
    return b;
}

namespace {

// Degeneracy ordering of the overlap graph: repeatedly place the cycle with
// the fewest overlaps among those not yet placed. The maximum count at
// extraction bounds how many later cycles any placed cycle overlaps.
std::pair<std::vector<size_t>, size_t> overlap_degeneracy_order(const std::vector<BitVector>& cycles) {
    size_t r = cycles.size();
    std::vector<std::vector<size_t>> overl(r);
    for (size_t i = 0; i < r; ++i) {
        for (size_t j = i + 1; j < r; ++j) {
            if ((cycles[i] & cycles[j]).any()) {
                overl[i].push_back(j);
                overl[j].push_back(i);
            }
        }
    }
    std::vector<size_t> deg(r);
    for (size_t i = 0; i < r; ++i) {
        deg[i] = overl[i].size();
    }
    std::vector<char> placed(r, 0);
    std::vector<size_t> order;
    size_t worst = 0;
    for (size_t step = 0; step < r; ++step) {
        size_t best = SIZE_MAX;
        for (size_t i = 0; i < r; ++i) {
            if (!placed[i] && (best == SIZE_MAX || deg[i] < deg[best])) {
                best = i;
            }
        }
        worst = std::max(worst, deg[best]);
        placed[best] = 1;
        order.push_back(best);
        for (size_t j : overl[best]) {
            if (!placed[j]) {
                --deg[j];
            }
        }
    }
    return {order, worst};
}

size_t load_objective(const std::vector<size_t>& loads, size_t& max_out) {
    size_t sq = 0;
    max_out = 0;
    for (size_t l : loads) {
        sq += l * l;
        max_out = std::max(max_out, l);
    }
    return sq;
}

}  // namespace

CycleBasis decongest(const MultiGraph& g, uint64_t seed) {
    if (g.num_vertices() < 2) {
        throw std::invalid_argument("decongest: need at least two vertices");
    }
    if (!g.connected()) {
        throw std::invalid_argument("decongest: graph must be connected");
    }
    size_t nv = g.num_vertices();
    size_t ne = g.num_edges();
    size_t dim = ne + 1 - nv;
    CycleBasis empty;
    if (dim == 0) {
        finish_basis(g, empty);
        return empty;
    }

    // Parallel edge classes: chain digons cover their part of the cycle
    // space with load at most 2 per edge; the rest of the space comes from a
    // spanning-tree basis over one representative edge per class.
    std::map<std::pair<size_t, size_t>, std::vector<size_t>> classes;
    for (size_t id = 0; id < ne; ++id) {
        size_t u = g.edge(id).u;
        size_t v = g.edge(id).v;
        classes[{std::min(u, v), std::max(u, v)}].push_back(id);
    }
    std::vector<BitVector> digons;
    std::vector<size_t> reps;
    bool has_parallel = false;
    for (const auto& kv : classes) {
        const auto& ids = kv.second;
        reps.push_back(ids[0]);
        for (size_t i = 0; i + 1 < ids.size(); ++i) {
            has_parallel = true;
            BitVector d(ne);
            d.flip(ids[i]);
            d.flip(ids[i + 1]);
            digons.push_back(d);
        }
    }

    double rho_bound = std::log2(double(nv)) * std::log(2.0 * double(ne)) + (has_parallel ? 2.0 : 0.0);

    std::string diag;
    for (int attempt = 0; attempt < 64; ++attempt) {
        std::mt19937_64 rng(seed + uint64_t(attempt) * 0x9e3779b97f4a7c15ULL);

        std::vector<size_t> shuffled = reps;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        UnionFind uf(nv);
        std::vector<size_t> tree;
        for (size_t id : shuffled) {
            if (uf.unite(g.edge(id).u, g.edge(id).v)) {
                tree.push_back(id);
            }
        }
        RootedForest forest = orient_forest(g, tree);
        std::vector<char> in_tree(ne, 0);
        for (size_t id : tree) {
            in_tree[id] = 1;
        }
        std::vector<BitVector> loops;
        for (size_t id : reps) {
            if (!in_tree[id]) {
                loops.push_back(fundamental_cycle(g, forest, id));
            }
        }

        // Local improvement: replace a cycle by its sum with another when
        // that lowers the load profile.
        std::vector<size_t> loads = basis_edge_loads(digons, ne);
        for (const auto& c : loops) {
            for (size_t e : c.ones()) {
                ++loads[e];
            }
        }
        size_t cur_max = 0;
        size_t cur_sq = load_objective(loads, cur_max);
        for (int pass = 0; pass < 12; ++pass) {
            bool improved = false;
            for (size_t i = 0; i < loops.size(); ++i) {
                for (size_t j = 0; j < loops.size(); ++j) {
                    if (i == j) {
                        continue;
                    }
                    BitVector cand = loops[i] ^ loops[j];
                    std::vector<size_t> trial = loads;
                    for (size_t e : loops[i].ones()) {
                        --trial[e];
                    }
                    for (size_t e : cand.ones()) {
                        ++trial[e];
                    }
                    size_t trial_max = 0;
                    size_t trial_sq = load_objective(trial, trial_max);
                    if (std::tie(trial_max, trial_sq) < std::tie(cur_max, cur_sq)) {
                        loops[i] = cand;
                        loads = trial;
                        cur_max = trial_max;
                        cur_sq = trial_sq;
                        improved = true;
                    }
                }
            }
            if (!improved) {
                break;
            }
        }

        CycleBasis b;
        b.cycles = digons;
        b.cycles.insert(b.cycles.end(), loops.begin(), loops.end());
        auto [order, worst] = overlap_degeneracy_order(b.cycles);
        b.ordering = order;
        finish_basis(g, b);

        double overlap_bound = std::log2(double(nv)) * double(b.rho);
        if (double(b.rho) < rho_bound && double(worst) <= overlap_bound) {
            return b;
        }
        diag = "congestion " + std::to_string(b.rho) + " (bound " + std::to_string(rho_bound) +
               "), overlap degeneracy " + std::to_string(worst) + " (bound " +
               std::to_string(overlap_bound) + ")";
    }
    throw std::runtime_error("decongest: restart budget exhausted; last attempt had " + diag);
}

BasisPartition greedy_partition(const CycleBasis& basis) {
    size_t r = basis.cycles.size();
    std::vector<size_t> order = basis.ordering;
    if (order.empty()) {
        order.resize(r);
        std::iota(order.begin(), order.end(), size_t(0));
    }
    if (order.size() != r) {
        throw std::invalid_argument("greedy_partition: ordering length mismatch");
    }
    std::vector<char> placed(r, 0);
    size_t remaining = r;
    BasisPartition p;
    size_t ne = r == 0 ? 0 : basis.cycles[0].n;
    while (remaining > 0) {
        std::vector<size_t> part;
        BitVector used(ne);
        for (size_t pos = order.size(); pos-- > 0;) {
            size_t idx = order[pos];
            if (placed[idx]) {
                continue;
            }
            if ((basis.cycles[idx] & used).any()) {
                continue;
            }
            part.push_back(idx);
            used ^= basis.cycles[idx];
            placed[idx] = 1;
            --remaining;
        }
        p.parts.push_back(part);
    }
    p.t = p.parts.size();
    return p;
}

Thickened thicken(const MultiGraph& g, size_t levels) {
    if (levels < 1) {
        throw std::invalid_argument("thicken: need at least one level");
    }
    Thickened th;
    th.base_vertices = g.num_vertices();
    th.base_edges = g.num_edges();
    th.levels = levels;
    th.graph = MultiGraph(g.num_vertices() * levels);
    for (size_t r = 0; r < levels; ++r) {
        for (size_t e = 0; e < g.num_edges(); ++e) {
            th.graph.add_edge(th.vertex_at(g.edge(e).u, r), th.vertex_at(g.edge(e).v, r));
        }
    }
    for (size_t r = 0; r + 1 < levels; ++r) {
        for (size_t v = 0; v < g.num_vertices(); ++v) {
            th.graph.add_edge(th.vertex_at(v, r), th.vertex_at(v, r + 1));
        }
    }
    return th;
}

BitVector lift_cycle(const Thickened& th, const BitVector& base_cycle, size_t level) {
    if (base_cycle.n != th.base_edges) {
        throw std::invalid_argument("lift_cycle: base cycle has wrong length");
    }
    if (level >= th.levels) {
        throw std::invalid_argument("lift_cycle: level out of range");
    }
    BitVector c(th.graph.num_edges());
    for (size_t e : base_cycle.ones()) {
        c.flip(th.horizontal_edge(e, level));
    }
    return c;
}

BitVector vertical_square(const Thickened& th, size_t base_edge, size_t level) {
    if (base_edge >= th.base_edges || level + 1 >= th.levels) {
        throw std::invalid_argument("vertical_square: index out of range");
    }
    BitVector c(th.graph.num_edges());
    c.flip(th.horizontal_edge(base_edge, level));
    c.flip(th.horizontal_edge(base_edge, level + 1));
    // The two endpoints are distinct (no self-loops), so the square has
    // exactly four edges.
    size_t u = 0;
    size_t v = 0;
    {
        size_t eid = th.horizontal_edge(base_edge, level);
        u = th.graph.edge(eid).u;
        v = th.graph.edge(eid).v;
    }
    c.flip(th.vertical_edge(th.vertex_base(u), level));
    c.flip(th.vertical_edge(th.vertex_base(v), level));
    return c;
}

CycleBasis thickened_cycle_basis(const Thickened& th, const CycleBasis& base,
                                 const std::vector<size_t>& level_assignment) {
    if (level_assignment.size() != base.cycles.size()) {
        throw std::invalid_argument("thickened_cycle_basis: one level per base cycle required");
    }
    for (size_t r : level_assignment) {
        if (r >= th.levels) {
            throw std::invalid_argument("thickened_cycle_basis: level out of range");
        }
    }
    CycleBasis b;
    for (size_t r = 0; r + 1 < th.levels; ++r) {
        for (size_t e = 0; e < th.base_edges; ++e) {
            b.cycles.push_back(vertical_square(th, e, r));
        }
    }
    for (size_t i = 0; i < base.cycles.size(); ++i) {
        b.cycles.push_back(lift_cycle(th, base.cycles[i], level_assignment[i]));
    }
    finish_basis(th.graph, b);
    return b;
}

namespace {

struct SquareCandidate {
    BitVector vec;
    std::vector<uint32_t> support;
};

// Lexicographic score for adding one candidate on top of current loads:
// (number of edges pushed over their cap, peak relative load, total load).
struct CandidateScore {
    size_t overloads = 0;
    size_t peak_num = 0;
    size_t peak_den = 1;
    size_t total = 0;

    bool operator<(const CandidateScore& o) const {
        if (overloads != o.overloads) {
            return overloads < o.overloads;
        }
        size_t a = peak_num * o.peak_den;
        size_t b = o.peak_num * peak_den;
        if (a != b) {
            return a < b;
        }
        return total < o.total;
    }
};

CandidateScore score_candidate(const SquareCandidate& cand, const std::vector<size_t>& loads,
                               const std::vector<size_t>& caps) {
    CandidateScore s;
    for (uint32_t e : cand.support) {
        size_t after = loads[e] + 1;
        size_t cap = std::max<size_t>(caps[e], 1);
        if (after > caps[e]) {
            ++s.overloads;
        }
        if (after * s.peak_den > s.peak_num * cap) {
            s.peak_num = after;
            s.peak_den = cap;
        }
        s.total += after;
    }
    return s;
}

}  // namespace

CycleBasis low_congestion_square_basis(const Thickened& th, const std::vector<size_t>& edge_caps,
                                       size_t length_cap, uint64_t seed) {
    size_t ne = th.graph.num_edges();
    if (edge_caps.size() != ne) {
        throw std::invalid_argument("square basis: one cap per edge required");
    }
    CycleBasis best;
    if (th.levels < 2) {
        return best;
    }
    size_t target = th.base_edges * (th.levels - 1);

    std::vector<SquareCandidate> pool;
    auto push_candidate = [&](BitVector v) {
        SquareCandidate c;
        c.vec = std::move(v);
        auto ones = c.vec.ones();
        if (ones.size() > length_cap) {
            return;
        }
        c.support.assign(ones.begin(), ones.end());
        pool.push_back(std::move(c));
    };
    for (size_t r = 0; r + 1 < th.levels; ++r) {
        for (size_t e = 0; e < th.base_edges; ++e) {
            push_candidate(vertical_square(th, e, r));
        }
    }
    for (size_t r = 0; r + 2 < th.levels; ++r) {
        for (size_t e = 0; e < th.base_edges; ++e) {
            push_candidate(vertical_square(th, e, r) ^ vertical_square(th, e, r + 1));
        }
    }
    // Base incidence recovered from level 0.
    std::vector<std::vector<size_t>> base_incident(th.base_vertices);
    std::vector<std::pair<size_t, size_t>> base_ends(th.base_edges);
    for (size_t e = 0; e < th.base_edges; ++e) {
        size_t eid = th.horizontal_edge(e, 0);
        size_t u = th.vertex_base(th.graph.edge(eid).u);
        size_t w = th.vertex_base(th.graph.edge(eid).v);
        base_ends[e] = {u, w};
        base_incident[u].push_back(e);
        base_incident[w].push_back(e);
    }
    auto other_base_end = [&](size_t e, size_t v) {
        return base_ends[e].first == v ? base_ends[e].second : base_ends[e].first;
    };
    {
        // Pairs of distinct base edges sharing a vertex: the shared vertical
        // edges cancel.
        std::set<std::pair<size_t, size_t>> seen;
        for (size_t v = 0; v < th.base_vertices; ++v) {
            const auto& inc = base_incident[v];
            for (size_t i = 0; i < inc.size(); ++i) {
                for (size_t j = i + 1; j < inc.size(); ++j) {
                    seen.insert({std::min(inc[i], inc[j]), std::max(inc[i], inc[j])});
                }
            }
        }
        for (const auto& [e1, e2] : seen) {
            for (size_t r = 0; r + 1 < th.levels; ++r) {
                push_candidate(vertical_square(th, e1, r) ^ vertical_square(th, e2, r));
            }
        }
    }
    {
        // Prisms over short base cycles: every vertical edge cancels, so
        // these candidates relieve busy vertices entirely.
        std::set<std::vector<size_t>> short_cycles;
        for (size_t v = 0; v < th.base_vertices && short_cycles.size() < 4000; ++v) {
            const auto& inc = base_incident[v];
            for (size_t i = 0; i < inc.size(); ++i) {
                for (size_t j = i + 1; j < inc.size(); ++j) {
                    size_t a = other_base_end(inc[i], v);
                    size_t b = other_base_end(inc[j], v);
                    if (a == b) {
                        continue;
                    }
                    for (size_t close : base_incident[a]) {
                        if (other_base_end(close, a) == b) {
                            std::vector<size_t> tri{inc[i], inc[j], close};
                            std::sort(tri.begin(), tri.end());
                            short_cycles.insert(tri);
                        }
                    }
                }
            }
        }
        for (size_t u = 0; u < th.base_vertices && short_cycles.size() < 4000; ++u) {
            for (size_t w = u + 1; w < th.base_vertices; ++w) {
                std::vector<size_t> common;
                for (size_t e : base_incident[u]) {
                    size_t x = other_base_end(e, u);
                    if (x != w) {
                        for (size_t e2 : base_incident[w]) {
                            if (other_base_end(e2, w) == x) {
                                common.push_back(x);
                                break;
                            }
                        }
                    }
                }
                std::sort(common.begin(), common.end());
                common.erase(std::unique(common.begin(), common.end()), common.end());
                for (size_t i = 0; i < common.size(); ++i) {
                    for (size_t j = i + 1; j < common.size(); ++j) {
                        std::vector<size_t> quad;
                        for (size_t corner : {common[i], common[j]}) {
                            for (size_t side : {u, w}) {
                                for (size_t e : base_incident[side]) {
                                    if (other_base_end(e, side) == corner) {
                                        quad.push_back(e);
                                        break;
                                    }
                                }
                            }
                        }
                        if (quad.size() == 4) {
                            std::sort(quad.begin(), quad.end());
                            short_cycles.insert(quad);
                        }
                    }
                }
            }
        }
        for (const auto& cyc : short_cycles) {
            for (size_t r = 0; r + 1 < th.levels; ++r) {
                BitVector v(ne);
                for (size_t e : cyc) {
                    v ^= vertical_square(th, e, r);
                }
                push_candidate(std::move(v));
            }
        }
    }

    size_t best_violations = SIZE_MAX;
    for (int restart = 0; restart < 32; ++restart) {
        std::mt19937_64 rng(seed + uint64_t(restart) * 0x9e3779b97f4a7c15ULL);
        std::vector<size_t> perm(pool.size());
        std::iota(perm.begin(), perm.end(), size_t(0));
        std::shuffle(perm.begin(), perm.end(), rng);

        std::vector<BitVector> residual;
        residual.reserve(pool.size());
        for (const auto& c : pool) {
            residual.push_back(c.vec);
        }
        std::vector<std::pair<size_t, BitVector>> rows;
        std::vector<size_t> loads(ne, 0);
        std::vector<BitVector> chosen;

        while (chosen.size() < target) {
            size_t pick = SIZE_MAX;
            CandidateScore pick_score;
            for (size_t idx : perm) {
                if (residual[idx].none()) {
                    continue;
                }
                CandidateScore s = score_candidate(pool[idx], loads, edge_caps);
                if (pick == SIZE_MAX || s < pick_score) {
                    pick = idx;
                    pick_score = s;
                }
            }
            if (pick == SIZE_MAX) {
                throw std::logic_error("square basis: pool failed to span the square space");
            }
            for (uint32_t e : pool[pick].support) {
                ++loads[e];
            }
            chosen.push_back(pool[pick].vec);
            BitVector row = residual[pick];
            size_t pivot = row.lowest_set();
            for (auto& res : residual) {
                if (res.any() && res.get(pivot)) {
                    res ^= row;
                }
            }
            rows.emplace_back(pivot, std::move(row));
        }

        // Swap repair: replace members that run through overloaded edges with
        // independent pool candidates that fit.
        for (int round = 0; round < 32; ++round) {
            std::vector<size_t> over;
            for (size_t e = 0; e < ne; ++e) {
                if (loads[e] > edge_caps[e]) {
                    over.push_back(e);
                }
            }
            if (over.empty()) {
                break;
            }
            bool swapped = false;
            for (size_t bi = 0; bi < chosen.size() && !swapped; ++bi) {
                bool hits = false;
                for (size_t e : over) {
                    if (chosen[bi].get(e)) {
                        hits = true;
                        break;
                    }
                }
                if (!hits) {
                    continue;
                }
                f2::RowBasis rest(ne);
                for (size_t j = 0; j < chosen.size(); ++j) {
                    if (j != bi) {
                        rest.insert(chosen[j]);
                    }
                }
                for (size_t idx : perm) {
                    bool fits = true;
                    for (uint32_t e : pool[idx].support) {
                        if (loads[e] + 1 - (chosen[bi].get(e) ? 1 : 0) > edge_caps[e]) {
                            fits = false;
                            break;
                        }
                    }
                    if (!fits || rest.contains(pool[idx].vec)) {
                        continue;
                    }
                    for (size_t e : chosen[bi].ones()) {
                        --loads[e];
                    }
                    for (uint32_t e : pool[idx].support) {
                        ++loads[e];
                    }
                    chosen[bi] = pool[idx].vec;
                    swapped = true;
                    break;
                }
            }
            if (!swapped) {
                break;
            }
        }

        size_t violations = 0;
        for (size_t e = 0; e < ne; ++e) {
            if (loads[e] > edge_caps[e]) {
                violations += loads[e] - edge_caps[e];
            }
        }
        if (violations < best_violations) {
            best_violations = violations;
            best.cycles = chosen;
        }
        if (violations == 0) {
            break;
        }
    }
    best.rho = basis_congestion(best.cycles, ne);
    best.max_length = basis_max_length(best.cycles);
    best.ordering.resize(best.cycles.size());
    std::iota(best.ordering.begin(), best.ordering.end(), size_t(0));
    return best;
}

Cellulation cellulate(MultiGraph& g, const BitVector& cycle) {
    if (cycle.n != g.num_edges()) {
        throw std::invalid_argument("cellulate: cycle vector has wrong length");
    }
    auto support = cycle.ones();
    size_t w = support.size();
    if (w < 3) {
        throw std::invalid_argument("cellulate: cycle must have length at least 3");
    }
    std::map<size_t, std::vector<size_t>> at_vertex;
    for (size_t e : support) {
        at_vertex[g.edge(e).u].push_back(e);
        at_vertex[g.edge(e).v].push_back(e);
    }
    for (const auto& kv : at_vertex) {
        if (kv.second.size() != 2) {
            throw std::invalid_argument("cellulate: cycle is not simple");
        }
    }

    // Traverse the cycle from its lowest edge.
    std::vector<size_t> verts{g.edge(support[0]).u};
    std::vector<size_t> walk{support[0]};
    size_t at = g.edge(support[0]).v;
    while (at != verts[0]) {
        verts.push_back(at);
        const auto& pair = at_vertex[at];
        size_t next = pair[0] == walk.back() ? pair[1] : pair[0];
        walk.push_back(next);
        at = g.other_endpoint(next, at);
    }
    if (walk.size() != w) {
        throw std::invalid_argument("cellulate: cycle is not simple");
    }

    // Zig-zag chords: peel the last vertex, then the first, alternating.
    Cellulation out;
    size_t f = 0;
    size_t b = w - 1;
    size_t closing = walk.back();
    bool back_turn = true;
    while (b - f > 2) {
        size_t chord;
        if (back_turn) {
            chord = g.add_edge(verts[f], verts[b - 1]);
            out.triangles.push_back({walk[b - 1], closing, chord});
            --b;
        } else {
            chord = g.add_edge(verts[f + 1], verts[b]);
            out.triangles.push_back({walk[f], closing, chord});
            ++f;
        }
        out.added_edges.push_back(chord);
        closing = chord;
        back_turn = !back_turn;
    }
    out.triangles.push_back({walk[f], walk[f + 1], closing});
    return out;
}

namespace {

Rational cheeger_scan(const MultiGraph& g, bool parallel) {
    size_t nv = g.num_vertices();
    if (nv == 0) {
        throw std::invalid_argument("cheeger: empty graph");
    }
    if (nv > 22) {
        throw std::invalid_argument("cheeger: exact evaluation capped at 22 vertices");
    }
    if (nv == 1) {
        return Rational::infinity();
    }
    long long half = 1LL << (nv - 1);
    Rational best = Rational::infinity();
#pragma omp parallel if (parallel)
    {
        Rational local = Rational::infinity();
#pragma omp for nowait
        for (long long m = 0; m < half - 1; ++m) {
            uint32_t mask = (uint32_t(m) << 1) | 1u;
            size_t cut = 0;
            for (size_t e = 0; e < g.num_edges(); ++e) {
                bool a = (mask >> g.edge(e).u) & 1;
                bool b = (mask >> g.edge(e).v) & 1;
                cut += a != b;
            }
            size_t size = std::popcount(mask);
            Rational r(static_cast<long long>(cut), static_cast<long long>(std::min(size, nv - size)));
            local = min(local, r);
        }
#pragma omp critical
        { best = min(best, local); }
    }
    return best;
}

Rational relative_scan(const MultiGraph& g, const std::vector<size_t>& port, size_t t,
                       bool parallel) {
    size_t nv = g.num_vertices();
    if (nv == 0) {
        throw std::invalid_argument("relative cheeger: empty graph");
    }
    if (nv > 22) {
        throw std::invalid_argument("relative cheeger: exact evaluation capped at 22 vertices");
    }
    uint32_t pmask = 0;
    for (size_t v : port) {
        if (v >= nv) {
            throw std::invalid_argument("relative cheeger: port vertex out of range");
        }
        pmask |= uint32_t(1) << v;
    }
    size_t psize = std::popcount(pmask);
    if (nv == 1 || t == 0 || psize == 0) {
        return Rational::infinity();
    }
    long long half = 1LL << (nv - 1);
    Rational best = Rational::infinity();
#pragma omp parallel if (parallel)
    {
        Rational local = Rational::infinity();
#pragma omp for nowait
        for (long long m = 0; m < half; ++m) {
            uint32_t mask = (uint32_t(m) << 1) | 1u;
            size_t inside = std::popcount(mask & pmask);
            size_t den = std::min({t, inside, psize - inside});
            if (den == 0) {
                continue;
            }
            size_t cut = 0;
            for (size_t e = 0; e < g.num_edges(); ++e) {
                bool a = (mask >> g.edge(e).u) & 1;
                bool b = (mask >> g.edge(e).v) & 1;
                cut += a != b;
            }
            local = min(local, Rational(static_cast<long long>(cut), static_cast<long long>(den)));
        }
#pragma omp critical
        { best = min(best, local); }
    }
    return best;
}

}  // namespace

Rational cheeger_exact(const MultiGraph& g) {
    return cheeger_scan(g, true);
}

Rational cheeger_exact_serial(const MultiGraph& g) {
    return cheeger_scan(g, false);
}

Rational relative_cheeger_exact(const MultiGraph& g, const std::vector<size_t>& port, size_t t) {
    return relative_scan(g, port, t, true);
}

Rational relative_cheeger_exact_serial(const MultiGraph& g, const std::vector<size_t>& port,
                                       size_t t) {
    return relative_scan(g, port, t, false);
}

namespace {

std::vector<std::vector<size_t>> boundary_table_scan(const Thickened& th, bool parallel) {
    size_t nvt = th.graph.num_vertices();
    if (nvt > 26) {
        throw std::invalid_argument("boundary table: capped at 26 total vertices");
    }
    size_t bv = th.base_vertices;
    if (bv > 16) {
        throw std::invalid_argument("boundary table: capped at 16 base vertices");
    }
    size_t patterns = size_t(1) << bv;
    std::vector<std::vector<size_t>> table(th.levels, std::vector<size_t>(patterns, SIZE_MAX));
    uint64_t total = uint64_t(1) << nvt;
    uint32_t pattern_mask = uint32_t(patterns - 1);

#pragma omp parallel if (parallel)
    {
        std::vector<std::vector<size_t>> local(th.levels, std::vector<size_t>(patterns, SIZE_MAX));
        int nth = 1;
        int tid = 0;
#ifdef _OPENMP
        nth = omp_get_num_threads();
        tid = omp_get_thread_num();
#endif
        uint64_t chunk = (total + nth - 1) / nth;
        uint64_t lo = uint64_t(tid) * chunk;
        uint64_t hi = std::min(total, lo + chunk);
        if (lo < hi) {
            // Gray-code enumeration: one vertex flip per step.
            uint64_t mask = lo ^ (lo >> 1);
            long long cut = 0;
            for (size_t e = 0; e < th.graph.num_edges(); ++e) {
                bool a = (mask >> th.graph.edge(e).u) & 1;
                bool b = (mask >> th.graph.edge(e).v) & 1;
                cut += a != b;
            }
            for (uint64_t idx = lo;; ++idx) {
                for (size_t r = 0; r < th.levels; ++r) {
                    uint32_t trace = uint32_t(mask >> (r * bv)) & pattern_mask;
                    local[r][trace] = std::min(local[r][trace], size_t(cut));
                }
                if (idx + 1 >= hi) {
                    break;
                }
                size_t flip = size_t(std::countr_zero(idx + 1));
                for (size_t eid : th.graph.incident(flip)) {
                    size_t other = th.graph.other_endpoint(eid, flip);
                    bool same = ((mask >> flip) & 1) == ((mask >> other) & 1);
                    cut += same ? 1 : -1;
                }
                mask ^= uint64_t(1) << flip;
            }
        }
#pragma omp critical
        {
            for (size_t r = 0; r < th.levels; ++r) {
                for (size_t p = 0; p < patterns; ++p) {
                    table[r][p] = std::min(table[r][p], local[r][p]);
                }
            }
        }
    }
    return table;
}

}  // namespace

std::vector<std::vector<size_t>> level_boundary_table(const Thickened& th) {
    return boundary_table_scan(th, true);
}

std::vector<std::vector<size_t>> level_boundary_table_serial(const Thickened& th) {
    return boundary_table_scan(th, false);
}

Rational relative_cheeger_from_table(const std::vector<size_t>& row, uint32_t port_mask, size_t t) {
    size_t psize = std::popcount(port_mask);
    Rational best = Rational::infinity();
    for (size_t mask = 0; mask < row.size(); ++mask) {
        if (row[mask] == SIZE_MAX) {
            continue;
        }
        size_t inside = std::popcount(uint32_t(mask) & port_mask);
        size_t den = std::min({t, inside, psize - inside});
        if (den == 0) {
            continue;
        }
        best = min(best, Rational(static_cast<long long>(row[mask]), static_cast<long long>(den)));
    }
    return best;
}

namespace {

std::vector<double> jacobi_eigenvalues(std::vector<std::vector<double>> a) {
    size_t n = a.size();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0;
        for (size_t p = 0; p < n; ++p) {
            for (size_t q = p + 1; q < n; ++q) {
                off += a[p][q] * a[p][q];
            }
        }
        if (off < 1e-20) {
            break;
        }
        for (size_t p = 0; p < n; ++p) {
            for (size_t q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-15) {
                    continue;
                }
                double theta = (a[q][q] - a[p][p]) / (2 * a[p][q]);
                double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
                double c = 1 / std::sqrt(t * t + 1);
                double s = t * c;
                for (size_t k = 0; k < n; ++k) {
                    double akp = a[k][p];
                    double akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (size_t k = 0; k < n; ++k) {
                    double apk = a[p][k];
                    double aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> eig(n);
    for (size_t i = 0; i < n; ++i) {
        eig[i] = a[i][i];
    }
    std::sort(eig.begin(), eig.end());
    return eig;
}

MultiGraph random_regularish(size_t n, size_t d, std::mt19937_64& rng) {
    MultiGraph g(n);
    std::set<std::pair<size_t, size_t>> used;
    auto try_add = [&](size_t u, size_t v) {
        auto key = std::minmax(u, v);
        if (u == v || used.count({key.first, key.second})) {
            return false;
        }
        used.insert({key.first, key.second});
        g.add_edge(u, v);
        return true;
    };
    std::vector<size_t> perm(n);
    std::iota(perm.begin(), perm.end(), size_t(0));
    for (size_t c = 0; c < d / 2; ++c) {
        for (int tries = 0; tries < 40; ++tries) {
            std::shuffle(perm.begin(), perm.end(), rng);
            bool ok = true;
            for (size_t i = 0; ok && i < n; ++i) {
                auto key = std::minmax(perm[i], perm[(i + 1) % n]);
                ok = !used.count({key.first, key.second});
            }
            if (ok) {
                for (size_t i = 0; i < n; ++i) {
                    try_add(perm[i], perm[(i + 1) % n]);
                }
                break;
            }
        }
    }
    if (d % 2 == 1 && n % 2 == 0) {
        for (int tries = 0; tries < 40; ++tries) {
            std::shuffle(perm.begin(), perm.end(), rng);
            bool ok = true;
            for (size_t i = 0; ok && i + 1 < n; i += 2) {
                auto key = std::minmax(perm[i], perm[i + 1]);
                ok = !used.count({key.first, key.second});
            }
            if (ok) {
                for (size_t i = 0; i + 1 < n; i += 2) {
                    try_add(perm[i], perm[i + 1]);
                }
                break;
            }
        }
    }
    return g;
}

}  // namespace

std::vector<double> laplacian_eigenvalues(const MultiGraph& g) {
    size_t n = g.num_vertices();
    if (n == 0 || n > 512) {
        throw std::invalid_argument("laplacian: size out of supported range");
    }
    std::vector<std::vector<double>> l(n, std::vector<double>(n, 0.0));
    for (size_t e = 0; e < g.num_edges(); ++e) {
        size_t u = g.edge(e).u;
        size_t v = g.edge(e).v;
        l[u][u] += 1;
        l[v][v] += 1;
        l[u][v] -= 1;
        l[v][u] -= 1;
    }
    return jacobi_eigenvalues(std::move(l));
}

ExpanderResult build_expander(size_t n, Rational target_beta, size_t max_degree, uint64_t seed) {
    if (n < 2) {
        throw std::invalid_argument("build_expander: need at least two vertices");
    }
    if (target_beta.infinite()) {
        throw std::invalid_argument("build_expander: infinite target");
    }
    if (n == 2) {
        size_t m = size_t((target_beta.num + target_beta.den - 1) / target_beta.den);
        m = std::max<size_t>(m, 1);
        if (m > max_degree) {
            throw std::runtime_error("build_expander: degree budget too small for target");
        }
        ExpanderResult out;
        out.graph = MultiGraph(2);
        for (size_t i = 0; i < m; ++i) {
            out.graph.add_edge(0, 1);
        }
        out.beta_exact = Rational(static_cast<long long>(m), 1);
        out.beta_bound = double(m);
        out.certificate = "exact";
        out.degree = m;
        return out;
    }

    for (size_t d = 2; d <= max_degree; ++d) {
        for (uint64_t attempt = 0; attempt < 12; ++attempt) {
            std::mt19937_64 rng(seed ^ (d * 0x100000001b3ULL + attempt));
            MultiGraph g = random_regularish(n, d, rng);
            if (!g.connected()) {
                continue;
            }
            if (n <= 22) {
                Rational beta = cheeger_exact(g);
                if (beta >= target_beta) {
                    ExpanderResult out;
                    out.degree = g.max_degree();
                    out.graph = std::move(g);
                    out.beta_exact = beta;
                    out.beta_bound = beta.value();
                    out.certificate = "exact";
                    return out;
                }
            } else {
                auto eig = laplacian_eigenvalues(g);
                double bound = eig[1] / 2.0 - 1e-9;
                if (bound >= target_beta.value()) {
                    ExpanderResult out;
                    out.degree = g.max_degree();
                    out.graph = std::move(g);
                    out.beta_bound = bound;
                    out.certificate = "spectral";
                    return out;
                }
            }
        }
    }
    throw std::runtime_error("build_expander: budget exhausted without certifying target " +
                             target_beta.str());
}

std::string write_graph(const MultiGraph& g) {
    std::ostringstream out;
    out << g.num_vertices() << "\n";
    for (size_t e = 0; e < g.num_edges(); ++e) {
        out << g.edge(e).u << " " << g.edge(e).v << "\n";
    }
    return out.str();
}

MultiGraph read_graph(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::string> meaningful;
    while (std::getline(in, line)) {
        size_t hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        bool blank = line.find_first_not_of(" \t\r") == std::string::npos;
        if (!blank) {
            meaningful.push_back(line);
        }
    }
    if (meaningful.empty()) {
        throw std::runtime_error("graph parse: missing header");
    }
    std::istringstream head(meaningful[0]);
    long long nv = -1;
    if (!(head >> nv) || nv < 0) {
        throw std::runtime_error("graph parse: bad vertex count");
    }
    std::string extra;
    if (head >> extra) {
        throw std::runtime_error("graph parse: trailing tokens in header");
    }
    MultiGraph g(static_cast<size_t>(nv));
    for (size_t i = 1; i < meaningful.size(); ++i) {
        std::istringstream es(meaningful[i]);
        long long u = -1;
        long long v = -1;
        if (!(es >> u >> v) || u < 0 || v < 0 || u >= nv || v >= nv) {
            throw std::runtime_error("graph parse: bad edge line '" + meaningful[i] + "'");
        }
        if (es >> extra) {
            throw std::runtime_error("graph parse: trailing tokens on edge line");
        }
        g.add_edge(size_t(u), size_t(v));
    }
    return g;
}

MultiGraph read_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("graph parse: cannot open " + path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return read_graph(buf.str());
}

void write_graph_file(const MultiGraph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("graph write: cannot open " + path);
    }
    out << write_graph(g);
}

std::string to_dot(const MultiGraph& g, const std::vector<std::string>& vertex_labels) {
    std::ostringstream out;
    out << "graph g {\n";
    for (size_t v = 0; v < g.num_vertices(); ++v) {
        out << "  v" << v;
        if (v < vertex_labels.size()) {
            out << " [label=\"" << vertex_labels[v] << "\"]";
        }
        out << ";\n";
    }
    for (size_t e = 0; e < g.num_edges(); ++e) {
        out << "  v" << g.edge(e).u << " -- v" << g.edge(e).v << ";\n";
    }
    out << "}\n";
    return out.str();
}

std::string to_dot(const Thickened& th) {
    std::ostringstream out;
    out << "graph thickened {\n";
    for (size_t v = 0; v < th.graph.num_vertices(); ++v) {
        out << "  v" << v << " [base=" << th.vertex_base(v) << ", level=" << th.vertex_level(v)
            << "];\n";
    }
    for (size_t e = 0; e < th.graph.num_edges(); ++e) {
        out << "  v" << th.graph.edge(e).u << " -- v" << th.graph.edge(e).v << " [kind="
            << (th.is_vertical(e) ? "vertical" : "horizontal") << "];\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace qsurg::graph
