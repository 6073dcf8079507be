#include "qsurg/surgery.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

namespace qsurg::surgery {

using f2::BitVector;
using graph::MultiGraph;
using pauli::PauliOperator;
using pauli::StabilizerCode;

namespace {

uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::vector<size_t> PortedGraph::port_vertices() const {
    std::vector<size_t> out;
    out.reserve(port.size());
    for (const auto& kv : port) {
        out.push_back(kv.second);
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool PortedGraph::port_valid(const PauliOperator& l) const {
    std::set<size_t> image;
    for (size_t q : l.support()) {
        auto it = port.find(q);
        if (it == port.end() || it->second >= graph.num_vertices()) {
            return false;
        }
        if (!image.insert(it->second).second) {
            return false;
        }
    }
    return true;
}

std::optional<std::vector<size_t>> path_matching(
    const MultiGraph& g, const std::vector<size_t>& targets,
    const std::optional<std::vector<size_t>>& within) {
    if (targets.size() % 2 != 0) {
        throw std::invalid_argument("path matching: odd number of target vertices");
    }
    for (size_t v : targets) {
        if (v >= g.num_vertices()) {
            throw std::invalid_argument("path matching: target vertex out of range");
        }
    }
    std::vector<bool> allowed(g.num_edges(), !within.has_value());
    if (within) {
        for (size_t e : *within) {
            if (e >= g.num_edges()) {
                throw std::invalid_argument("path matching: allowed edge out of range");
            }
            allowed[e] = true;
        }
    }

    // Spanning forest of the allowed subgraph; union-find in edge id order.
    std::vector<size_t> parent(g.num_vertices());
    std::iota(parent.begin(), parent.end(), size_t(0));
    auto find = [&](size_t v) {
        while (parent[v] != v) {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        return v;
    };
    std::vector<std::vector<std::pair<size_t, size_t>>> tree(g.num_vertices());
    for (size_t e = 0; e < g.num_edges(); ++e) {
        if (!allowed[e]) {
            continue;
        }
        size_t ru = find(g.edge(e).u);
        size_t rv = find(g.edge(e).v);
        if (ru != rv) {
            parent[ru] = rv;
            tree[g.edge(e).u].push_back({g.edge(e).v, e});
            tree[g.edge(e).v].push_back({g.edge(e).u, e});
        }
    }

    // Duplicate targets cancel in GF(2).
    std::vector<size_t> odd;
    {
        std::map<size_t, size_t> count;
        for (size_t v : targets) {
            ++count[v];
        }
        for (const auto& kv : count) {
            if (kv.second % 2 == 1) {
                odd.push_back(kv.first);
            }
        }
    }
    std::map<size_t, std::vector<size_t>> per_component;
    for (size_t v : odd) {
        per_component[find(v)].push_back(v);
    }
    for (const auto& kv : per_component) {
        if (kv.second.size() % 2 != 0) {
            return std::nullopt;
        }
    }

    // Pair targets in sorted order within each component and XOR the forest
    // paths between every pair.
    BitVector picked(g.num_edges());
    auto tree_path = [&](size_t from, size_t to) {
        std::vector<std::pair<size_t, size_t>> via(g.num_vertices(), {SIZE_MAX, SIZE_MAX});
        std::queue<size_t> frontier;
        frontier.push(from);
        via[from] = {from, SIZE_MAX};
        while (!frontier.empty()) {
            size_t v = frontier.front();
            frontier.pop();
            if (v == to) {
                break;
            }
            for (const auto& [w, e] : tree[v]) {
                if (via[w].first == SIZE_MAX) {
                    via[w] = {v, e};
                    frontier.push(w);
                }
            }
        }
        for (size_t v = to; v != from; v = via[v].first) {
            picked.flip(via[v].second);
        }
    };
    for (const auto& kv : per_component) {
        const auto& verts = kv.second;
        for (size_t i = 0; i + 1 < verts.size(); i += 2) {
            tree_path(verts[i], verts[i + 1]);
        }
    }
    std::vector<size_t> out = picked.ones();
    return out;
}

std::vector<PauliOperator> MergedCode::all_checks() const {
    std::vector<PauliOperator> out;
    out.reserve(vertex_checks.size() + cycle_checks.size() + deformed_checks.size());
    out.insert(out.end(), vertex_checks.begin(), vertex_checks.end());
    out.insert(out.end(), cycle_checks.begin(), cycle_checks.end());
    out.insert(out.end(), deformed_checks.begin(), deformed_checks.end());
    return out;
}

StabilizerCode MergedCode::merged_code() const {
    return StabilizerCode(total_qubits(), all_checks());
}

std::string MergedCode::provenance() const {
    std::ostringstream out;
    size_t idx = 0;
    for (size_t v = 0; v < vertex_checks.size(); ++v) {
        out << "check " << idx++ << ": vertex " << v << "\n";
    }
    for (size_t c = 0; c < cycle_checks.size(); ++c) {
        out << "check " << idx++ << ": cycle " << c << "\n";
    }
    for (size_t s = 0; s < deformed_checks.size(); ++s) {
        out << "check " << idx++ << ": deformed from base check " << s;
        if (!matchings[s].empty()) {
            out << "; matching edges";
            for (size_t e : matchings[s]) {
                out << " " << e;
            }
        }
        out << "\n";
    }
    return out.str();
}

MergedCode build_merged_code(const StabilizerCode& code, const PauliOperator& l,
                             const PortedGraph& pg,
                             const std::vector<std::vector<size_t>>* check_edge_sets) {
    if (l.n != code.n) {
        throw std::invalid_argument("merged code: operator length mismatch");
    }
    if (l.is_identity()) {
        throw std::invalid_argument("merged code: measured operator is the identity");
    }
    for (const auto& s : code.generators) {
        if (!pauli::commutes(s, l)) {
            throw std::invalid_argument("merged code: operator anticommutes with a check");
        }
    }
    auto support = l.support();
    if (pg.port.size() != support.size() || !pg.port_valid(l)) {
        throw std::invalid_argument("merged code: port is not a bijection onto the support");
    }
    if (!graph::is_cycle_basis(pg.graph, pg.basis.cycles)) {
        throw std::invalid_argument("merged code: ported graph carries an invalid cycle basis");
    }
    if (check_edge_sets && check_edge_sets->size() != code.generators.size()) {
        throw std::invalid_argument("merged code: one allowed-edge set per check required");
    }

    size_t n = code.n;
    size_t ne = pg.graph.num_edges();
    MergedCode out;
    out.base = code;
    out.edge_qubits = ne;
    out.target = PauliOperator(n + ne);
    for (size_t q = 0; q < n; ++q) {
        out.target.set_letter(q, l.letter_at(q));
    }
    out.target.sign = l.sign;

    // The measured operator's sign rides on the lowest ported vertex so that
    // the product of all vertex checks is exactly +l.
    std::vector<size_t> vertex_qubit(pg.graph.num_vertices(), SIZE_MAX);
    for (const auto& [q, v] : pg.port) {
        vertex_qubit[v] = q;
    }
    size_t sign_vertex = SIZE_MAX;
    for (size_t v = 0; v < pg.graph.num_vertices(); ++v) {
        if (vertex_qubit[v] != SIZE_MAX) {
            sign_vertex = v;
            break;
        }
    }
    for (size_t v = 0; v < pg.graph.num_vertices(); ++v) {
        PauliOperator a(n + ne);
        for (size_t e : pg.graph.incident(v)) {
            a.set_letter(n + e, 'Z');
        }
        if (vertex_qubit[v] != SIZE_MAX) {
            a.set_letter(vertex_qubit[v], l.letter_at(vertex_qubit[v]));
        }
        if (v == sign_vertex) {
            a.sign = l.sign;
        }
        out.vertex_checks.push_back(std::move(a));
    }
    for (const auto& cyc : pg.basis.cycles) {
        PauliOperator b(n + ne);
        for (size_t e : cyc.ones()) {
            b.set_letter(n + e, 'X');
        }
        out.cycle_checks.push_back(std::move(b));
    }
    for (size_t i = 0; i < code.generators.size(); ++i) {
        const auto& s = code.generators[i];
        PauliOperator bar(n + ne);
        for (size_t q = 0; q < n; ++q) {
            bar.set_letter(q, s.letter_at(q));
        }
        bar.sign = s.sign;
        auto k = pauli::anticommute_set(s, l);
        std::vector<size_t> edges;
        if (!k.empty()) {
            std::vector<size_t> targets;
            for (size_t q : k) {
                targets.push_back(pg.port.at(q));
            }
            std::sort(targets.begin(), targets.end());
            std::optional<std::vector<size_t>> within;
            if (check_edge_sets) {
                within = (*check_edge_sets)[i];
            }
            auto mu = path_matching(pg.graph, targets, within);
            if (!mu) {
                throw std::runtime_error("merged code: no path matching for base check " +
                                         std::to_string(i));
            }
            edges = *mu;
            for (size_t e : edges) {
                bar.set_letter(n + e, 'X');
            }
        }
        out.deformed_checks.push_back(std::move(bar));
        out.matchings.push_back(std::move(edges));
    }
    return out;
}

PortedGraph build_measurement_graph(const StabilizerCode& code, const PauliOperator& l,
                                    Rational beta, uint64_t seed) {
    if (l.n != code.n) {
        throw std::invalid_argument("measurement graph: operator length mismatch");
    }
    if (beta.infinite() || beta.num <= 0) {
        throw std::invalid_argument("measurement graph: target expansion must be positive");
    }
    for (const auto& s : code.generators) {
        if (!pauli::commutes(s, l)) {
            throw std::invalid_argument("measurement graph: operator anticommutes with a check");
        }
    }
    auto support = l.support();
    if (support.empty()) {
        throw std::invalid_argument("measurement graph: operator has empty support");
    }
    size_t m = support.size();

    // Step 1: one base vertex per support qubit, ported in sorted order.
    MultiGraph base(m);

    // Step 2a: perfect matching per check, pairing sorted port indices.
    size_t check_edges = 0;
    for (const auto& s : code.generators) {
        auto k = pauli::anticommute_set(s, l);
        std::vector<size_t> verts;
        for (size_t q : k) {
            verts.push_back(size_t(std::lower_bound(support.begin(), support.end(), q) -
                                   support.begin()));
        }
        std::sort(verts.begin(), verts.end());
        for (size_t i = 0; i + 1 < verts.size(); i += 2) {
            base.add_edge(verts[i], verts[i + 1]);
            ++check_edges;
        }
    }

    // Step 2b: expander overlay.
    size_t expander_degree = 0;
    double beta_lower = 0.0;
    bool beta_exact = false;
    if (m >= 2) {
        auto exp = graph::build_expander(m, beta, 8, mix64(seed));
        expander_degree = exp.degree;
        for (size_t e = 0; e < exp.graph.num_edges(); ++e) {
            base.add_edge(exp.graph.edge(e).u, exp.graph.edge(e).v);
        }
    }
    if (m == 1) {
        // Single vertex: expansion is unconstrained.
        beta_lower = 1.0;
        beta_exact = true;
    } else if (m <= 22) {
        beta_lower = graph::cheeger_exact(base).value();
        beta_exact = true;
    } else {
        auto exp_only = graph::build_expander(m, beta, 8, mix64(seed));
        beta_lower = exp_only.beta_exact ? exp_only.beta_exact->value() : exp_only.beta_bound;
    }

    // Step 3: decongest and partition.
    graph::CycleBasis decongested = graph::decongest(base, mix64(seed + 1));
    graph::BasisPartition parts = graph::greedy_partition(decongested);

    // Step 4: thicken by max(t, ceil(1/beta)).
    size_t inv_beta = size_t((beta.den + beta.num - 1) / beta.num);
    size_t ell = std::max<size_t>({parts.parts.size(), inv_beta, 1});
    graph::Thickened th = graph::thicken(base, ell);

    // Step 5: low congestion square basis, then cellulate part i on level i.
    std::vector<size_t> caps(th.graph.num_edges(), 4);
    std::vector<size_t> level_of(decongested.cycles.size(), 0);
    for (size_t p = 0; p < parts.parts.size(); ++p) {
        for (size_t idx : parts.parts[p]) {
            level_of[idx] = p;
            for (size_t e : decongested.cycles[idx].ones()) {
                caps[th.horizontal_edge(e, p)] = 3;
            }
        }
    }
    graph::CycleBasis squares = graph::low_congestion_square_basis(th, caps, 8, mix64(seed + 2));

    MultiGraph g = th.graph;
    std::vector<std::vector<size_t>> faces;
    for (const auto& sq : squares.cycles) {
        faces.push_back(sq.ones());
    }
    for (size_t idx = 0; idx < decongested.cycles.size(); ++idx) {
        BitVector lifted = graph::lift_cycle(th, decongested.cycles[idx], level_of[idx]);
        BitVector padded(g.num_edges());
        for (size_t e : lifted.ones()) {
            padded.set(e, true);
        }
        for (const auto& piece : graph::simple_cycle_decomposition(g, padded)) {
            auto edges = piece.ones();
            if (edges.size() <= 4) {
                faces.push_back(edges);
                continue;
            }
            BitVector grown(g.num_edges());
            for (size_t e : edges) {
                grown.set(e, true);
            }
            graph::Cellulation cell = graph::cellulate(g, grown);
            for (const auto& tri : cell.triangles) {
                faces.push_back({tri.begin(), tri.end()});
            }
        }
    }

    PortedGraph out;
    out.graph = g;
    for (size_t i = 0; i < m; ++i) {
        out.port[support[i]] = th.vertex_at(i, 0);
    }
    out.basis.cycles.reserve(faces.size());
    for (const auto& face : faces) {
        BitVector v(g.num_edges());
        for (size_t e : face) {
            v.set(e, true);
        }
        out.basis.cycles.push_back(std::move(v));
    }
    out.basis.rho = graph::basis_congestion(out.basis.cycles, g.num_edges());
    out.basis.max_length = graph::basis_max_length(out.basis.cycles);
    out.basis.ordering.resize(out.basis.cycles.size());
    std::iota(out.basis.ordering.begin(), out.basis.ordering.end(), size_t(0));

    auto profile = pauli::ldpc_profile(code);
    size_t bound = ell * (profile.delta + expander_degree + 1) * m;
    if (g.num_edges() > bound) {
        throw std::logic_error("measurement graph: edge bound exceeded");
    }

    PortedGraph::Provenance prov;
    prov.base_vertices = m;
    prov.base_edges = base.num_edges();
    prov.check_edges = check_edges;
    prov.expander_degree = expander_degree;
    prov.levels = ell;
    prov.beta_lower = beta_lower;
    prov.beta_exact = beta_exact;
    out.provenance = prov;
    return out;
}

std::string DesiderataReport::summary() const {
    std::ostringstream out;
    auto line = [&](const std::string& name, bool pass, const std::string& detail) {
        out << (pass ? "pass" : "FAIL") << "  " << name << ": " << detail << "\n";
    };
    line("port", pass_port, port_ok ? "injective onto support" : "invalid");
    line("connected", pass_connected, connected ? "yes" : "no");
    line("degree", pass_degree, "max " + std::to_string(max_degree));
    line("cycle basis", pass_basis,
         "congestion " + std::to_string(basis_congestion) + ", max length " +
             std::to_string(basis_max_length));
    line("matchings", pass_matching,
         "max size " + std::to_string(matching_max_size) + ", max edge load " +
             std::to_string(matching_max_edge_load));
    line("expansion", pass_expansion,
         "relative beta " + std::to_string(relative_beta) + " (" + beta_method + ")");
    if (!diagnostic.empty()) {
        out << "note: " << diagnostic << "\n";
    }
    return out.str();
}

DesiderataReport check_desiderata(const PortedGraph& pg, const StabilizerCode& code,
                                  const PauliOperator& l, size_t d,
                                  const DesiderataBounds& bounds) {
    DesiderataReport r;
    std::ostringstream notes;

    auto support = l.support();
    r.port_ok = pg.port.size() == support.size() && pg.port_valid(l);
    r.pass_port = r.port_ok;
    if (!r.port_ok) {
        notes << "port is not a bijection onto the operator support; ";
    }

    r.connected = pg.graph.connected();
    r.pass_connected = r.connected;

    r.max_degree = pg.graph.max_degree();
    r.pass_degree = r.max_degree <= bounds.max_degree;

    bool basis_valid = graph::is_cycle_basis(pg.graph, pg.basis.cycles);
    r.basis_congestion = graph::basis_congestion(pg.basis.cycles, pg.graph.num_edges());
    r.basis_max_length = graph::basis_max_length(pg.basis.cycles);
    r.pass_basis = basis_valid && r.basis_congestion <= bounds.congestion &&
                   r.basis_max_length <= bounds.cycle_length;
    if (!basis_valid) {
        notes << "cycle basis is not a basis of the cycle space; ";
    }

    size_t size_cap = bounds.matching_size ? bounds.matching_size : pauli::ldpc_profile(code).omega;
    std::vector<size_t> loads(pg.graph.num_edges(), 0);
    bool matchings_ok = r.port_ok;
    if (r.port_ok) {
        for (size_t i = 0; i < code.generators.size(); ++i) {
            auto k = pauli::anticommute_set(code.generators[i], l);
            if (k.empty()) {
                continue;
            }
            std::vector<size_t> targets;
            for (size_t q : k) {
                targets.push_back(pg.port.at(q));
            }
            std::sort(targets.begin(), targets.end());
            auto mu = path_matching(pg.graph, targets);
            if (!mu) {
                matchings_ok = false;
                notes << "no path matching for base check " << i << "; ";
                continue;
            }
            r.matching_max_size = std::max(r.matching_max_size, mu->size());
            for (size_t e : *mu) {
                ++loads[e];
            }
        }
    }
    for (size_t e = 0; e < loads.size(); ++e) {
        r.matching_max_edge_load = std::max(r.matching_max_edge_load, loads[e]);
    }
    r.pass_matching = matchings_ok && r.matching_max_size <= size_cap &&
                      r.matching_max_edge_load <= bounds.edge_load;

    if (!r.port_ok) {
        r.beta_method = "skipped: invalid port";
        r.pass_expansion = false;
    } else if (pg.graph.num_vertices() <= 22) {
        Rational b = graph::relative_cheeger_exact(pg.graph, pg.port_vertices(), d);
        r.beta_exact = true;
        if (b.infinite()) {
            r.relative_beta = 1.0;
            r.beta_method = "exhaustive (unconstrained)";
            r.pass_expansion = true;
        } else {
            r.relative_beta = b.value();
            r.beta_method = "exhaustive";
            r.pass_expansion = b >= Rational(1);
        }
    } else if (pg.provenance) {
        const auto& prov = *pg.provenance;
        r.relative_beta = std::min(1.0, double(prov.levels) * prov.beta_lower);
        r.beta_exact = false;
        r.beta_method = prov.beta_exact ? "thickening lemma over exact base Cheeger"
                                        : "thickening lemma over spectral base bound";
        r.pass_expansion = r.relative_beta >= 1.0;
    } else {
        r.beta_method = "unavailable: graph too large and no construction certificate";
        r.pass_expansion = false;
        notes << "relative expansion could not be certified; ";
    }

    r.diagnostic = notes.str();
    return r;
}

}  // namespace qsurg::surgery
