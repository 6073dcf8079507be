#include "qsurg/extractor.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace qsurg::extractor {

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

size_t biased_objective(const std::vector<size_t>& loads, const std::vector<size_t>& bias,
                        size_t& max_out) {
    size_t sq = 0;
    max_out = 0;
    for (size_t e = 0; e < loads.size(); ++e) {
        size_t w = loads[e] + bias[e];
        sq += w * w;
        max_out = std::max(max_out, w);
    }
    return sq;
}

// Basis of simple base cycles whose loads, plus the two squares that sit on
// every interior path edge after lifting, stay within the congestion cap.
graph::CycleBasis base_basis_within_caps(const graph::MultiGraph& base,
                                         const std::vector<size_t>& path_edges, size_t cap,
                                         uint64_t seed) {
    size_t ne = base.num_edges();
    std::vector<size_t> bias(ne, 0);
    for (size_t e : path_edges) {
        bias[e] = 2;
    }
    std::string diag;
    for (uint64_t attempt = 0; attempt < 32; ++attempt) {
        graph::CycleBasis dec = graph::decongest(base, mix64(seed + attempt));

        // Cellulation and the per-level lifts need simple cycles, so split
        // any non-simple element and rebuild the basis shortest-first.
        std::vector<BitVector> pool;
        for (const auto& c : dec.cycles) {
            for (auto& piece : graph::simple_cycle_decomposition(base, c)) {
                pool.push_back(std::move(piece));
            }
        }
        std::stable_sort(pool.begin(), pool.end(),
                         [](const BitVector& a, const BitVector& b) {
                             return a.weight() < b.weight();
                         });
        f2::RowBasis span(ne);
        std::vector<BitVector> cycles;
        for (auto& p : pool) {
            if (span.insert(p)) {
                cycles.push_back(std::move(p));
            }
        }

        std::vector<size_t> loads(ne, 0);
        for (const auto& c : cycles) {
            for (size_t e : c.ones()) {
                ++loads[e];
            }
        }
        size_t cur_max = 0;
        size_t cur_sq = biased_objective(loads, bias, cur_max);
        for (int pass = 0; pass < 12 && cur_max > cap; ++pass) {
            bool improved = false;
            for (size_t i = 0; i < cycles.size(); ++i) {
                for (size_t j = 0; j < cycles.size(); ++j) {
                    if (i == j) {
                        continue;
                    }
                    BitVector cand = cycles[i] ^ cycles[j];
                    std::vector<size_t> trial = loads;
                    for (size_t e : cycles[i].ones()) {
                        --trial[e];
                    }
                    for (size_t e : cand.ones()) {
                        ++trial[e];
                    }
                    size_t trial_max = 0;
                    size_t trial_sq = biased_objective(trial, bias, trial_max);
                    if (std::tie(trial_max, trial_sq) >= std::tie(cur_max, cur_sq)) {
                        continue;
                    }
                    if (graph::simple_cycle_decomposition(base, cand).size() != 1) {
                        continue;
                    }
                    cycles[i] = std::move(cand);
                    loads = std::move(trial);
                    cur_max = trial_max;
                    cur_sq = trial_sq;
                    improved = true;
                }
            }
            if (!improved) {
                break;
            }
        }
        if (cur_max <= cap) {
            graph::CycleBasis out;
            out.cycles = std::move(cycles);
            out.rho = graph::basis_congestion(out.cycles, ne);
            out.max_length = graph::basis_max_length(out.cycles);
            out.ordering.resize(out.cycles.size());
            std::iota(out.ordering.begin(), out.ordering.end(), size_t(0));
            return out;
        }
        diag = "biased congestion " + std::to_string(cur_max) + " (cap " + std::to_string(cap) +
               ")";
    }
    throw std::runtime_error("extractor: decongestion budget exhausted; last attempt had " + diag);
}

}  // namespace

std::vector<size_t> ExtractorGraph::port_vertices() const {
    std::vector<size_t> out;
    out.reserve(port.size());
    for (const auto& kv : port) {
        out.push_back(kv.second);
    }
    std::sort(out.begin(), out.end());
    return out;
}

surgery::PortedGraph ExtractorGraph::restrict_to(const PauliOperator& l) const {
    surgery::PortedGraph pg;
    pg.graph = graph;
    pg.basis = basis;
    pg.provenance = provenance;
    for (size_t q : l.support()) {
        auto it = port.find(q);
        if (it == port.end()) {
            throw std::invalid_argument("extractor: operator support not covered by the port");
        }
        pg.port[q] = it->second;
    }
    return pg;
}

StabilizerCode union_code(const StabilizerCode& a, const StabilizerCode& b) {
    StabilizerCode out;
    out.n = a.n + b.n;
    for (const auto& s : a.generators) {
        PauliOperator g(out.n);
        for (size_t q = 0; q < a.n; ++q) {
            g.set_letter(q, s.letter_at(q));
        }
        g.sign = s.sign;
        out.generators.push_back(std::move(g));
    }
    for (const auto& s : b.generators) {
        PauliOperator g(out.n);
        for (size_t q = 0; q < b.n; ++q) {
            g.set_letter(a.n + q, s.letter_at(q));
        }
        g.sign = s.sign;
        out.generators.push_back(std::move(g));
    }
    return StabilizerCode(out.n, out.generators);
}

ExtractorGraph build_partial_extractor(const StabilizerCode& code,
                                       const std::vector<size_t>& t_set, Rational beta,
                                       uint64_t seed) {
    if (code.n == 0) {
        throw std::invalid_argument("extractor: empty code");
    }
    if (beta.infinite() || beta.num <= 0) {
        throw std::invalid_argument("extractor: target expansion must be positive");
    }
    std::vector<size_t> domain = t_set;
    std::sort(domain.begin(), domain.end());
    domain.erase(std::unique(domain.begin(), domain.end()), domain.end());
    if (domain.empty()) {
        throw std::invalid_argument("extractor: empty qubit domain");
    }
    if (domain.back() >= code.n) {
        throw std::invalid_argument("extractor: domain qubit out of range");
    }
    size_t m = domain.size();

    // Step 1: one base vertex per domain qubit, one cycle C(S) per check over
    // its ported support (a digon for two vertices).
    MultiGraph base(m);
    std::vector<std::vector<size_t>> base_cycles(code.generators.size());
    size_t check_edges = 0;
    for (size_t i = 0; i < code.generators.size(); ++i) {
        std::vector<size_t> verts;
        for (size_t q : code.generators[i].support()) {
            auto it = std::lower_bound(domain.begin(), domain.end(), q);
            if (it != domain.end() && *it == q) {
                verts.push_back(size_t(it - domain.begin()));
            }
        }
        if (verts.size() < 2) {
            continue;
        }
        for (size_t j = 0; j < verts.size(); ++j) {
            base_cycles[i].push_back(base.add_edge(verts[j], verts[(j + 1) % verts.size()]));
            ++check_edges;
        }
    }

    // Step 2: expander overlay plus a spanning path. The path is a degree-2
    // spanning tree, so the squares of step 5 never stack on one vertex. The
    // path counts as part of the overlay in the recorded degree.
    size_t expander_degree = 0;
    double beta_lower = 0.0;
    bool beta_exact = false;
    std::vector<size_t> path_edges;
    if (m >= 2) {
        auto exp = graph::build_expander(m, beta, 8, mix64(seed));
        std::vector<size_t> overlay_degree(m, 0);
        for (size_t e = 0; e < exp.graph.num_edges(); ++e) {
            base.add_edge(exp.graph.edge(e).u, exp.graph.edge(e).v);
            ++overlay_degree[exp.graph.edge(e).u];
            ++overlay_degree[exp.graph.edge(e).v];
        }
        for (size_t i = 0; i + 1 < m; ++i) {
            path_edges.push_back(base.add_edge(i, i + 1));
            ++overlay_degree[i];
            ++overlay_degree[i + 1];
        }
        expander_degree = *std::max_element(overlay_degree.begin(), overlay_degree.end());
        if (m <= 22) {
            beta_lower = graph::cheeger_exact(base).value();
            beta_exact = true;
        } else {
            beta_lower = exp.beta_exact ? exp.beta_exact->value() : exp.beta_bound;
        }
    } else {
        // Single vertex: expansion is unconstrained.
        beta_lower = 1.0;
        beta_exact = true;
    }

    // Step 3: decongest within the caps the lifted basis must meet, then
    // partition for the level count.
    graph::CycleBasis decongested;
    if (m >= 2) {
        decongested = base_basis_within_caps(base, path_edges, 4, mix64(seed + 1));
    }
    graph::BasisPartition parts = graph::greedy_partition(decongested);

    // Step 4: thicken by max(t, ceil(1/beta)).
    size_t inv_beta = size_t((beta.den + beta.num - 1) / beta.num);
    size_t ell = std::max<size_t>({parts.parts.size(), inv_beta, 1});
    graph::Thickened th = graph::thicken(base, ell);

    // Step 5: measured basis. Squares over the spanning path at every level
    // pair, plus the base basis lifted at every level; lifted cycles longer
    // than four are cellulated at their own level. Counting the squares
    // (m-1)(l-1) against the lifts l*(|E1|-m+1) matches the cycle rank, and
    // every vertical edge meets at most two path squares.
    MultiGraph g = th.graph;
    std::vector<std::vector<size_t>> faces;
    for (size_t e : path_edges) {
        for (size_t r = 0; r + 1 < ell; ++r) {
            faces.push_back(graph::vertical_square(th, e, r).ones());
        }
    }
    for (size_t r = 0; r < ell; ++r) {
        for (const auto& cyc : decongested.cycles) {
            BitVector lifted = graph::lift_cycle(th, cyc, r);
            auto edges = lifted.ones();
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

    ExtractorGraph out;
    out.graph = g;
    out.code_qubits = code.n;
    for (size_t i = 0; i < m; ++i) {
        out.port[domain[i]] = th.vertex_at(i, 0);
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

    // E_i: every lift of C(S_i), so any even ported subset of a check has a
    // matching at any level.
    out.check_edge_sets.resize(code.generators.size());
    for (size_t i = 0; i < base_cycles.size(); ++i) {
        for (size_t e : base_cycles[i]) {
            for (size_t r = 0; r < ell; ++r) {
                out.check_edge_sets[i].push_back(th.horizontal_edge(e, r));
            }
        }
        std::sort(out.check_edge_sets[i].begin(), out.check_edge_sets[i].end());
    }

    auto profile = pauli::ldpc_profile(code);
    size_t bound = ell * (2 * profile.delta + expander_degree + 1) * m;
    if (g.num_edges() > bound) {
        throw std::logic_error("extractor: edge bound exceeded");
    }

    surgery::PortedGraph::Provenance prov;
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

ExtractorGraph build_extractor(const StabilizerCode& code, Rational beta, uint64_t seed) {
    std::vector<size_t> all(code.n);
    std::iota(all.begin(), all.end(), size_t(0));
    return build_partial_extractor(code, all, beta, seed);
}

surgery::DesiderataReport check_extractor_desiderata(const ExtractorGraph& x,
                                                     const StabilizerCode& code, size_t d,
                                                     const ExtractorBounds& bounds) {
    surgery::DesiderataReport r;
    std::ostringstream notes;
    auto profile = pauli::ldpc_profile(code);

    bool port_ok = !x.port.empty();
    std::set<size_t> images;
    for (const auto& [q, v] : x.port) {
        if (q >= code.n || v >= x.graph.num_vertices() || !images.insert(v).second) {
            port_ok = false;
        }
    }
    r.port_ok = port_ok;
    r.pass_port = port_ok;
    if (!port_ok) {
        notes << "port is not an injective map into the graph; ";
    }

    r.connected = x.graph.connected();
    r.pass_connected = r.connected;

    size_t expander_degree = x.provenance ? x.provenance->expander_degree : 8;
    size_t degree_cap =
        bounds.max_degree ? bounds.max_degree : 4 * profile.delta + 2 * (expander_degree + 1);
    r.max_degree = x.graph.max_degree();
    r.pass_degree = r.max_degree <= degree_cap;

    bool basis_valid = graph::is_cycle_basis(x.graph, x.basis.cycles);
    r.basis_congestion = graph::basis_congestion(x.basis.cycles, x.graph.num_edges());
    r.basis_max_length = graph::basis_max_length(x.basis.cycles);
    r.pass_basis = basis_valid && r.basis_congestion <= bounds.congestion &&
                   r.basis_max_length <= bounds.cycle_length;
    if (!basis_valid) {
        notes << "cycle basis is not a basis of the cycle space; ";
    }

    bool matchings_ok = port_ok;
    if (x.check_edge_sets.size() != code.generators.size()) {
        matchings_ok = false;
        notes << "one edge set per check required; ";
    }
    size_t set_cap = bounds.edge_set_size;
    if (set_cap == 0 && x.provenance) {
        set_cap = x.provenance->levels * profile.omega;
    }
    std::vector<size_t> member(x.graph.num_edges(), 0);
    for (size_t i = 0; i < x.check_edge_sets.size(); ++i) {
        for (size_t e : x.check_edge_sets[i]) {
            if (e >= member.size()) {
                matchings_ok = false;
                notes << "edge set " << i << " references a missing edge; ";
                break;
            }
            ++member[e];
        }
        if (set_cap && x.check_edge_sets[i].size() > set_cap) {
            matchings_ok = false;
            notes << "edge set " << i << " exceeds the size cap; ";
        }
    }
    for (size_t e = 0; e < member.size(); ++e) {
        r.matching_max_edge_load = std::max(r.matching_max_edge_load, member[e]);
    }
    if (r.matching_max_edge_load > bounds.edge_set_membership) {
        matchings_ok = false;
        notes << "an edge belongs to too many edge sets; ";
    }

    size_t size_cap = bounds.matching_size ? bounds.matching_size : profile.omega;
    if (matchings_ok) {
        for (size_t i = 0; i < code.generators.size(); ++i) {
            std::vector<size_t> ported;
            for (size_t q : code.generators[i].support()) {
                if (x.port.count(q)) {
                    ported.push_back(q);
                }
            }
            if (ported.size() < 2) {
                continue;
            }
            if (ported.size() > 16) {
                matchings_ok = false;
                notes << "check " << i << ": ported support too large to enumerate; ";
                continue;
            }
            for (uint32_t mask = 1; mask < (uint32_t(1) << ported.size()); ++mask) {
                if (std::popcount(mask) % 2) {
                    continue;
                }
                std::vector<size_t> targets;
                for (size_t b = 0; b < ported.size(); ++b) {
                    if ((mask >> b) & 1) {
                        targets.push_back(x.port.at(ported[b]));
                    }
                }
                std::sort(targets.begin(), targets.end());
                auto mu = surgery::path_matching(x.graph, targets, x.check_edge_sets[i]);
                if (!mu) {
                    matchings_ok = false;
                    notes << "check " << i << ": no matching inside its edge set for an even "
                          << "support subset; ";
                    break;
                }
                r.matching_max_size = std::max(r.matching_max_size, mu->size());
            }
        }
    }
    r.pass_matching = matchings_ok && r.matching_max_size <= size_cap;

    if (!port_ok) {
        r.beta_method = "skipped: invalid port";
        r.pass_expansion = false;
    } else if (x.graph.num_vertices() <= 22) {
        Rational b = graph::relative_cheeger_exact(x.graph, x.port_vertices(), d);
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
    } else if (x.provenance) {
        const auto& prov = *x.provenance;
        r.relative_beta = std::min(1.0, double(prov.levels) * prov.beta_lower);
        r.beta_exact = false;
        r.beta_method = prov.beta_exact ? "thickening lemma over exact base Cheeger"
                                        : "thickening lemma over spectral base bound";
        r.pass_expansion = r.relative_beta >= 1.0;
    } else if (x.expansion_t) {
        r.pass_expansion = d <= x.expansion_t;
        r.relative_beta = r.pass_expansion ? 1.0 : 0.0;
        r.beta_exact = false;
        r.beta_method = x.expansion_t == SIZE_MAX
                            ? "bridged expansion certificate (all t)"
                            : "bridged expansion certificate (t = " +
                                  std::to_string(x.expansion_t) + ")";
    } else {
        r.beta_method = "unavailable: graph too large and no construction certificate";
        r.pass_expansion = false;
        notes << "relative expansion could not be certified; ";
    }

    r.diagnostic = notes.str();
    return r;
}

EacBlock build_eac_tanner(const StabilizerCode& code, const ExtractorGraph& x) {
    EacBlock block;
    block.code = code;
    block.xgraph = x;

    auto data_id = [](size_t q) { return "Q[" + std::to_string(q) + "]"; };
    auto edge_id = [](size_t e) { return "QX[" + std::to_string(e) + "]"; };
    auto check_id = [](size_t i) { return "H[" + std::to_string(i) + "]"; };
    auto vertex_id = [](size_t v) { return "HX[" + std::to_string(v) + "]"; };
    auto cycle_id = [](size_t c) { return "HXC[" + std::to_string(c) + "]"; };

    for (size_t q = 0; q < code.n; ++q) {
        block.data_qubits.push_back(data_id(q));
    }
    for (size_t e = 0; e < x.graph.num_edges(); ++e) {
        block.data_qubits.push_back(edge_id(e));
    }
    for (size_t i = 0; i < code.generators.size(); ++i) {
        block.check_qubits.push_back(check_id(i));
    }
    for (size_t v = 0; v < x.graph.num_vertices(); ++v) {
        block.check_qubits.push_back(vertex_id(v));
    }
    for (size_t c = 0; c < x.basis.cycles.size(); ++c) {
        block.check_qubits.push_back(cycle_id(c));
    }

    for (size_t i = 0; i < code.generators.size(); ++i) {
        for (size_t q : code.generators[i].support()) {
            block.adjacency.emplace_back(check_id(i), data_id(q));
        }
    }
    for (size_t v = 0; v < x.graph.num_vertices(); ++v) {
        for (size_t e : x.graph.incident(v)) {
            block.adjacency.emplace_back(vertex_id(v), edge_id(e));
        }
    }
    for (size_t c = 0; c < x.basis.cycles.size(); ++c) {
        for (size_t e : x.basis.cycles[c].ones()) {
            block.adjacency.emplace_back(cycle_id(c), edge_id(e));
        }
    }

    for (const auto& [q, v] : x.port) {
        block.coupling.emplace_back(vertex_id(v), data_id(q));
    }
    for (size_t i = 0; i < x.check_edge_sets.size(); ++i) {
        for (size_t e : x.check_edge_sets[i]) {
            block.coupling.emplace_back(check_id(i), edge_id(e));
        }
    }

    std::map<std::string, size_t> degree;
    for (const auto& [a, b] : block.adjacency) {
        ++degree[a];
        ++degree[b];
    }
    for (const auto& [a, b] : block.coupling) {
        ++degree[a];
        ++degree[b];
    }
    for (const auto& kv : degree) {
        block.max_node_degree = std::max(block.max_node_degree, kv.second);
    }
    return block;
}

ActivatedMeasurement instantiate_measurement(const EacBlock& block, const PauliOperator& l) {
    const StabilizerCode& code = block.code;
    const ExtractorGraph& x = block.xgraph;
    if (l.n != code.n) {
        throw std::invalid_argument("instantiate: operator length mismatch");
    }
    if (l.is_identity()) {
        throw std::invalid_argument("instantiate: operator is the identity");
    }
    for (const auto& s : code.generators) {
        if (!pauli::commutes(s, l)) {
            throw std::invalid_argument("instantiate: operator anticommutes with a check");
        }
    }
    if (code.in_stabilizer_span(l)) {
        throw std::invalid_argument("instantiate: operator is a stabilizer, not a logical");
    }

    surgery::PortedGraph pg = x.restrict_to(l);
    ActivatedMeasurement out{surgery::build_merged_code(code, l, pg, &x.check_edge_sets), {}};
    for (size_t q : l.support()) {
        out.coupling.emplace_back("HX[" + std::to_string(x.port.at(q)) + "]",
                                  "Q[" + std::to_string(q) + "]");
    }
    for (size_t i = 0; i < out.merged.matchings.size(); ++i) {
        for (size_t e : out.merged.matchings[i]) {
            out.coupling.emplace_back("H[" + std::to_string(i) + "]",
                                      "QX[" + std::to_string(e) + "]");
        }
    }
    return out;
}

namespace {

struct SideSelection {
    std::vector<size_t> chosen;         // bridge endpoints in visit order
    std::vector<BitVector> connecting;  // edge sets joining consecutive endpoints
};

size_t uf_find(std::vector<size_t>& parent, size_t a) {
    while (parent[a] != a) {
        parent[a] = parent[parent[a]];
        a = parent[a];
    }
    return a;
}

// Depth-first preorder over the port-induced graph; when that graph is
// disconnected, helper edges carrying matching paths from the check edge sets
// are materialized first. Preorder keeps every subtree contiguous, so each
// tree arc lands in at most two connecting paths.
std::optional<SideSelection> select_bridge_endpoints(const ExtractorGraph& x, size_t d,
                                                     std::mt19937_64& rng) {
    auto ports = x.port_vertices();
    size_t ne = x.graph.num_edges();
    std::set<size_t> pset(ports.begin(), ports.end());

    struct Arc {
        size_t to = 0;
        BitVector path;
    };
    std::map<size_t, std::vector<Arc>> adj;
    std::vector<size_t> parent(x.graph.num_vertices());
    std::iota(parent.begin(), parent.end(), size_t(0));
    for (size_t e = 0; e < ne; ++e) {
        size_t u = x.graph.edge(e).u;
        size_t v = x.graph.edge(e).v;
        if (pset.count(u) && pset.count(v)) {
            BitVector path(ne);
            path.set(e, true);
            adj[u].push_back({v, path});
            adj[v].push_back({u, path});
            parent[uf_find(parent, u)] = uf_find(parent, v);
        }
    }

    std::set<size_t> roots;
    for (size_t v : ports) {
        roots.insert(uf_find(parent, v));
    }
    if (roots.size() > 1) {
        for (const auto& edge_set : x.check_edge_sets) {
            std::vector<size_t> touched;
            for (size_t e : edge_set) {
                if (pset.count(x.graph.edge(e).u)) {
                    touched.push_back(x.graph.edge(e).u);
                }
                if (pset.count(x.graph.edge(e).v)) {
                    touched.push_back(x.graph.edge(e).v);
                }
            }
            std::sort(touched.begin(), touched.end());
            touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
            for (size_t j = 0; j + 1 < touched.size(); ++j) {
                size_t a = touched[j];
                size_t b = touched[j + 1];
                if (uf_find(parent, a) == uf_find(parent, b)) {
                    continue;
                }
                auto mu = surgery::path_matching(x.graph, {std::min(a, b), std::max(a, b)},
                                                 edge_set);
                if (!mu) {
                    continue;
                }
                BitVector path(ne);
                for (size_t e : *mu) {
                    path.set(e, true);
                }
                adj[a].push_back({b, path});
                adj[b].push_back({a, path});
                parent[uf_find(parent, a)] = uf_find(parent, b);
            }
        }
    }

    size_t start = ports[rng() % ports.size()];
    std::map<size_t, BitVector> to_root;
    to_root[start] = BitVector(ne);
    std::vector<size_t> stack{start};
    SideSelection sel;
    while (!stack.empty() && sel.chosen.size() < d) {
        size_t v = stack.back();
        stack.pop_back();
        sel.chosen.push_back(v);
        auto arcs = adj[v];
        std::shuffle(arcs.begin(), arcs.end(), rng);
        for (const auto& arc : arcs) {
            if (to_root.count(arc.to)) {
                continue;
            }
            to_root[arc.to] = to_root[v] ^ arc.path;
            stack.push_back(arc.to);
        }
    }
    if (sel.chosen.size() < d) {
        return std::nullopt;
    }
    for (size_t i = 0; i + 1 < d; ++i) {
        sel.connecting.push_back(to_root[sel.chosen[i]] ^ to_root[sel.chosen[i + 1]]);
    }
    return sel;
}

size_t expansion_guarantee(const ExtractorGraph& x) {
    if (x.expansion_t) {
        return x.expansion_t;
    }
    if (x.provenance && double(x.provenance->levels) * x.provenance->beta_lower >= 1.0) {
        return SIZE_MAX;
    }
    if (x.graph.num_vertices() <= 22 && !x.port.empty()) {
        auto pv = x.port_vertices();
        for (size_t t = pv.size(); t >= 1; --t) {
            Rational b = graph::relative_cheeger_exact(x.graph, pv, t);
            if (b.infinite() || b >= Rational(1)) {
                return t == pv.size() ? SIZE_MAX : t;
            }
        }
    }
    return 0;
}

}  // namespace

std::pair<ExtractorGraph, Bridge> bridge_extractors(const ExtractorGraph& x1,
                                                    const ExtractorGraph& x2, size_t d,
                                                    uint64_t seed, bool same_code) {
    if (d == 0) {
        throw std::invalid_argument("bridge: at least one edge required");
    }
    if (d > x1.port.size() || d > x2.port.size()) {
        throw std::invalid_argument("bridge: d exceeds a port image");
    }
    if (same_code) {
        if (x1.code_qubits != x2.code_qubits ||
            x1.check_edge_sets.size() != x2.check_edge_sets.size()) {
            throw std::invalid_argument("bridge: partial extractors disagree on the code");
        }
        for (const auto& kv : x2.port) {
            if (x1.port.count(kv.first)) {
                throw std::invalid_argument("bridge: partial domains overlap");
            }
        }
    }

    size_t vshift = x1.graph.num_vertices();
    size_t eshift = x1.graph.num_edges();
    size_t rho = std::max(graph::basis_congestion(x1.basis.cycles, eshift),
                          graph::basis_congestion(x2.basis.cycles, x2.graph.num_edges()));
    size_t gamma = std::max(graph::basis_max_length(x1.basis.cycles),
                            graph::basis_max_length(x2.basis.cycles));
    size_t rho_cap = rho + 2;
    size_t len_cap = std::max<size_t>(gamma, 8);

    std::string failure = "no endpoint selection";
    for (uint64_t attempt = 0; attempt < 32; ++attempt) {
        std::mt19937_64 rng(mix64(seed + attempt));
        auto s1 = select_bridge_endpoints(x1, d, rng);
        auto s2 = select_bridge_endpoints(x2, d, rng);
        if (!s1 || !s2) {
            failure = "fewer than d reachable port vertices";
            continue;
        }

        MultiGraph g = x1.graph;
        for (size_t v = 0; v < x2.graph.num_vertices(); ++v) {
            g.add_vertex();
        }
        for (size_t e = 0; e < x2.graph.num_edges(); ++e) {
            g.add_edge(x2.graph.edge(e).u + vshift, x2.graph.edge(e).v + vshift);
        }
        Bridge br;
        for (size_t i = 0; i < d; ++i) {
            br.edges.push_back(g.add_edge(s1->chosen[i], s2->chosen[i] + vshift));
        }
        size_t ne = g.num_edges();
        for (size_t i = 0; i + 1 < d; ++i) {
            BitVector cyc(ne);
            cyc.set(br.edges[i], true);
            cyc.set(br.edges[i + 1], true);
            for (size_t e : s1->connecting[i].ones()) {
                cyc.flip(e);
            }
            for (size_t e : s2->connecting[i].ones()) {
                cyc.flip(eshift + e);
            }
            br.new_cycles.push_back(std::move(cyc));
        }

        std::vector<BitVector> cycles;
        for (const auto& c : x1.basis.cycles) {
            BitVector padded(ne);
            for (size_t e : c.ones()) {
                padded.set(e, true);
            }
            cycles.push_back(std::move(padded));
        }
        for (const auto& c : x2.basis.cycles) {
            BitVector shifted(ne);
            for (size_t e : c.ones()) {
                shifted.set(eshift + e, true);
            }
            cycles.push_back(std::move(shifted));
        }
        for (const auto& c : br.new_cycles) {
            cycles.push_back(c);
        }
        if (!graph::is_cycle_basis(g, cycles)) {
            failure = "joined cycles do not form a basis";
            continue;
        }
        size_t cong = graph::basis_congestion(cycles, ne);
        size_t mlen = graph::basis_max_length(cycles);
        if (cong > rho_cap || mlen > len_cap) {
            std::ostringstream why;
            why << "sparsity bounds violated (congestion " << cong << " vs " << rho_cap
                << ", length " << mlen << " vs " << len_cap << "); cycles:";
            for (size_t i = 0; i < br.new_cycles.size(); ++i) {
                why << " new[" << i << "] length " << br.new_cycles[i].ones().size();
            }
            failure = why.str();
            continue;
        }

        ExtractorGraph out;
        out.graph = g;
        out.basis.cycles = cycles;
        out.basis.rho = cong;
        out.basis.max_length = mlen;
        out.basis.ordering.resize(cycles.size());
        std::iota(out.basis.ordering.begin(), out.basis.ordering.end(), size_t(0));
        out.port = x1.port;
        if (same_code) {
            out.code_qubits = x1.code_qubits;
            for (const auto& [q, v] : x2.port) {
                out.port[q] = v + vshift;
            }
            out.check_edge_sets.resize(x1.check_edge_sets.size());
            for (size_t i = 0; i < x1.check_edge_sets.size(); ++i) {
                out.check_edge_sets[i] = x1.check_edge_sets[i];
                for (size_t e : x2.check_edge_sets[i]) {
                    out.check_edge_sets[i].push_back(eshift + e);
                }
                std::sort(out.check_edge_sets[i].begin(), out.check_edge_sets[i].end());
            }
        } else {
            out.code_qubits = x1.code_qubits + x2.code_qubits;
            for (const auto& [q, v] : x2.port) {
                out.port[q + x1.code_qubits] = v + vshift;
            }
            out.check_edge_sets = x1.check_edge_sets;
            for (const auto& edge_set : x2.check_edge_sets) {
                std::vector<size_t> shifted;
                shifted.reserve(edge_set.size());
                for (size_t e : edge_set) {
                    shifted.push_back(eshift + e);
                }
                out.check_edge_sets.push_back(std::move(shifted));
            }
        }
        out.provenance = std::nullopt;
        out.expansion_t =
            std::min({expansion_guarantee(x1), expansion_guarantee(x2), d});
        br.congestion = cong;
        br.max_length = mlen;
        return {std::move(out), std::move(br)};
    }
    throw std::runtime_error("bridge: retry budget exhausted: " + failure);
}

std::string eac_to_json(const EacBlock& block, const std::vector<PauliOperator>& operators) {
    nlohmann::json j;
    j["data_qubits"] = block.data_qubits;
    j["check_qubits"] = block.check_qubits;
    j["counts"] = {{"data", block.data_qubits.size()}, {"checks", block.check_qubits.size()}};
    auto edge_list = [](const std::vector<std::pair<std::string, std::string>>& edges) {
        auto arr = nlohmann::json::array();
        for (const auto& [a, b] : edges) {
            arr.push_back({a, b});
        }
        return arr;
    };
    j["adjacency"] = edge_list(block.adjacency);
    j["coupling"] = edge_list(block.coupling);
    auto acts = nlohmann::json::object();
    for (const auto& op : operators) {
        auto inst = instantiate_measurement(block, op);
        acts[op.to_string()] = {{"coupling", edge_list(inst.coupling)}};
    }
    j["activations"] = acts;
    return j.dump(2);
}

std::string eac_to_dot(const EacBlock& block) {
    std::ostringstream out;
    out << "graph eac {\n";
    out << "  node [shape=circle];\n";
    for (const auto& q : block.data_qubits) {
        out << "  \"" << q << "\";\n";
    }
    out << "  node [shape=box];\n";
    for (const auto& c : block.check_qubits) {
        out << "  \"" << c << "\";\n";
    }
    for (const auto& [a, b] : block.adjacency) {
        bool code_edge = a.rfind("H[", 0) == 0;
        out << "  \"" << a << "\" -- \"" << b << "\" [color=" << (code_edge ? "black" : "gray50")
            << "];\n";
    }
    for (const auto& [a, b] : block.coupling) {
        out << "  \"" << a << "\" -- \"" << b << "\" [style=dashed, color=blue];\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace qsurg::extractor
