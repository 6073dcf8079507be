#include "qsurg/simkit.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace qsurg::sim {

namespace {

struct PlusSource final : RandomSource {
    int next_sign() override { return +1; }
};

pauli::PauliOperator pad_to(const pauli::PauliOperator& p, size_t total) {
    pauli::PauliOperator out(total);
    out.sign = p.sign;
    for (size_t q = 0; q < p.n; ++q) {
        out.x.set(q, p.x.get(q));
        out.z.set(q, p.z.get(q));
    }
    return out;
}

// Space-time layout: `rounds` base-code rounds before the merge, `rounds`
// merged rounds, one split, `rounds` base-code rounds after, one ideal round.
// Qubit fault slots precede the event at the same position: slot t before
// round t of the first segment, slot r+t before merged round t, slot 2r
// before the split, slot 2r+1+t before round t of the last segment, slot
// 3r+1 before the ideal round. Edge qubits exist only inside [r, 2r].
struct Layout {
    size_t rounds = 0;
    size_t nbase = 0;
    size_t nv = 0;
    size_t ncyc = 0;
    size_t ndef = 0;
    size_t edges = 0;

    size_t merge_width() const { return nv + ncyc + ndef; }
    size_t idx_before(size_t t, size_t i) const { return t * nbase + i; }
    size_t idx_merge(size_t t, size_t j) const {
        return rounds * nbase + t * merge_width() + j;
    }
    size_t idx_split(size_t e) const { return rounds * (nbase + merge_width()) + e; }
    size_t idx_after(size_t t, size_t i) const {
        return rounds * (nbase + merge_width()) + edges + t * nbase + i;
    }
    size_t idx_ideal(size_t i) const {
        return rounds * (2 * nbase + merge_width()) + edges + i;
    }
    size_t record_count() const {
        return rounds * (2 * nbase + merge_width()) + edges + nbase;
    }
    size_t last_slot() const { return 3 * rounds + 1; }

    // Flat record index addressed by a record-flip fault, or nullopt when the
    // location does not name a recordable event.
    std::optional<size_t> record_index(const FaultLocation& f) const {
        if (f.kind == FaultLocation::Kind::split_record) {
            if (f.slot != 2 * rounds || f.index >= edges) {
                return std::nullopt;
            }
            return idx_split(f.index);
        }
        if (f.kind != FaultLocation::Kind::record) {
            return std::nullopt;
        }
        if (f.slot < rounds) {
            return f.index < nbase ? std::optional(idx_before(f.slot, f.index)) : std::nullopt;
        }
        if (f.slot < 2 * rounds) {
            return f.index < merge_width() ? std::optional(idx_merge(f.slot - rounds, f.index))
                                           : std::nullopt;
        }
        if (f.slot > 2 * rounds && f.slot <= 3 * rounds) {
            return f.index < nbase ? std::optional(idx_after(f.slot - 2 * rounds - 1, f.index))
                                   : std::nullopt;
        }
        return std::nullopt;
    }
};

struct Trace {
    std::vector<int> records;
    std::vector<pauli::PauliOperator> frame;
    int sigma = +1;
};

struct Driver {
    pauli::StabilizerCode code;
    surgery::MergedCode merged;
    Layout lay;
    size_t total = 0;
    std::vector<pauli::PauliOperator> base_checks;
    // Measurement-graph adjacency recovered from the vertex checks; edges
    // without two endpoints (possible in corrupted fixtures) are skipped.
    std::vector<std::vector<std::pair<size_t, size_t>>> adj;
    std::vector<size_t> vertex_qubit;

    Driver(const pauli::StabilizerCode& c, const surgery::MergedCode& m, size_t rounds)
        : code(c), merged(m) {
        if (rounds == 0) {
            throw std::invalid_argument("fault search: rounds must be positive");
        }
        if (merged.base.n != code.n) {
            throw std::invalid_argument("fault search: merged code built from a different base");
        }
        total = merged.total_qubits();
        lay.rounds = rounds;
        lay.nbase = code.generators.size();
        lay.nv = merged.vertex_checks.size();
        lay.ncyc = merged.cycle_checks.size();
        lay.ndef = merged.deformed_checks.size();
        lay.edges = merged.edge_qubits;
        for (const auto& g : code.generators) {
            base_checks.push_back(pad_to(g, total));
        }
        adj.resize(lay.nv);
        for (size_t e = 0; e < lay.edges; ++e) {
            std::vector<size_t> ends;
            for (size_t v = 0; v < lay.nv; ++v) {
                if (merged.vertex_checks[v].letter_at(code.n + e) != 'I') {
                    ends.push_back(v);
                }
            }
            if (ends.size() == 2) {
                adj[ends[0]].push_back({e, ends[1]});
                adj[ends[1]].push_back({e, ends[0]});
            }
        }
        vertex_qubit.assign(lay.nv, total);
        for (size_t v = 0; v < lay.nv; ++v) {
            for (size_t q = 0; q < code.n; ++q) {
                if (merged.vertex_checks[v].letter_at(q) != 'I') {
                    vertex_qubit[v] = q;
                    break;
                }
            }
        }
    }

    Tableau initial_state() const {
        Tableau base = code_state(code);
        Tableau t;
        t.n = total;
        for (size_t i = 0; i < code.n; ++i) {
            t.stab.push_back(pad_to(base.stab[i], total));
            t.destab.push_back(pad_to(base.destab[i], total));
        }
        for (size_t e = 0; e < lay.edges; ++e) {
            t.stab.push_back(pauli::PauliOperator::single(total, code.n + e, 'Z'));
            t.destab.push_back(pauli::PauliOperator::single(total, code.n + e, 'X'));
        }
        return t;
    }

    Trace run(const std::vector<FaultLocation>& faults, RandomSource& random) const {
        std::vector<std::vector<pauli::PauliOperator>> slot_faults(lay.last_slot() + 1);
        std::vector<uint8_t> flip(lay.record_count(), 0);
        for (const auto& f : faults) {
            if (f.kind == FaultLocation::Kind::qubit) {
                slot_faults[f.slot].push_back(
                    pauli::PauliOperator::single(total, f.index, f.letter));
            } else {
                flip[*lay.record_index(f)] ^= 1;
            }
        }

        Tableau state = initial_state();
        Trace tr;
        tr.records.assign(lay.record_count(), +1);
        auto record = [&](size_t idx, const pauli::PauliOperator& op) {
            int outcome = measure_pauli(state, op, std::nullopt, &random).outcome;
            tr.records[idx] = flip[idx] ? -outcome : outcome;
        };
        auto inject = [&](size_t slot) {
            for (const auto& p : slot_faults[slot]) {
                apply_pauli(state, p);
            }
        };

        for (size_t t = 0; t < lay.rounds; ++t) {
            inject(t);
            for (size_t i = 0; i < lay.nbase; ++i) {
                record(lay.idx_before(t, i), base_checks[i]);
            }
        }

        for (size_t e = 0; e < lay.edges; ++e) {
            pauli::PauliOperator xe = pauli::PauliOperator::single(total, code.n + e, 'X');
            auto det = deterministic_sign(state, xe);
            if (!det.has_value()) {
                measure_pauli(state, xe, +1);
            } else if (*det == -1) {
                apply_pauli(state, pauli::PauliOperator::single(total, code.n + e, 'Z'));
            }
        }

        for (size_t t = 0; t < lay.rounds; ++t) {
            inject(lay.rounds + t);
            size_t j = 0;
            for (const auto& a : merged.vertex_checks) {
                record(lay.idx_merge(t, j++), a);
            }
            for (const auto& b : merged.cycle_checks) {
                record(lay.idx_merge(t, j++), b);
            }
            for (const auto& s : merged.deformed_checks) {
                record(lay.idx_merge(t, j++), s);
            }
        }

        inject(2 * lay.rounds);
        for (size_t e = 0; e < lay.edges; ++e) {
            record(lay.idx_split(e), pauli::PauliOperator::single(total, code.n + e, 'X'));
        }

        // Corrections from the recorded split outcomes: tree parities from
        // vertex 0, applied with the target letter on each ported qubit.
        std::vector<int> phi(lay.nv, 0);
        if (lay.nv > 0) {
            phi[0] = +1;
            std::queue<size_t> bfs;
            bfs.push(0);
            while (!bfs.empty()) {
                size_t v = bfs.front();
                bfs.pop();
                for (const auto& [e, u] : adj[v]) {
                    if (phi[u] == 0) {
                        phi[u] = phi[v] * tr.records[lay.idx_split(e)];
                        bfs.push(u);
                    }
                }
            }
        }
        for (size_t v = 0; v < lay.nv; ++v) {
            if (phi[v] == -1 && vertex_qubit[v] < total) {
                size_t q = vertex_qubit[v];
                apply_pauli(state,
                            pauli::PauliOperator::single(total, q, merged.target.letter_at(q)));
            }
        }

        for (size_t t = 0; t < lay.rounds; ++t) {
            inject(2 * lay.rounds + 1 + t);
            for (size_t i = 0; i < lay.nbase; ++i) {
                record(lay.idx_after(t, i), base_checks[i]);
            }
        }

        inject(lay.last_slot());
        for (size_t i = 0; i < lay.nbase; ++i) {
            record(lay.idx_ideal(i), base_checks[i]);
        }

        tr.sigma = +1;
        for (size_t v = 0; v < lay.nv; ++v) {
            tr.sigma *= tr.records[lay.idx_merge(0, v)];
        }
        tr.frame = canonical_generators(state);
        return tr;
    }

    bool valid(const FaultLocation& f) const {
        if (f.kind == FaultLocation::Kind::qubit) {
            if (f.index >= total || f.slot > lay.last_slot()) {
                return false;
            }
            if (f.letter != 'X' && f.letter != 'Y' && f.letter != 'Z') {
                return false;
            }
            if (f.index >= code.n && (f.slot < lay.rounds || f.slot > 2 * lay.rounds)) {
                return false;
            }
            return true;
        }
        return lay.record_index(f).has_value();
    }

    std::vector<FaultLocation> locations() const {
        std::vector<FaultLocation> out;
        for (size_t slot = 0; slot <= lay.last_slot(); ++slot) {
            for (size_t q = 0; q < total; ++q) {
                if (q >= code.n && (slot < lay.rounds || slot > 2 * lay.rounds)) {
                    continue;
                }
                for (char letter : {'X', 'Y', 'Z'}) {
                    out.push_back({FaultLocation::Kind::qubit, slot, q, letter});
                }
            }
        }
        for (size_t t = 0; t < lay.rounds; ++t) {
            for (size_t i = 0; i < lay.nbase; ++i) {
                out.push_back({FaultLocation::Kind::record, t, i, 'I'});
            }
        }
        for (size_t t = 0; t < lay.rounds; ++t) {
            for (size_t j = 0; j < lay.merge_width(); ++j) {
                out.push_back({FaultLocation::Kind::record, lay.rounds + t, j, 'I'});
            }
        }
        for (size_t e = 0; e < lay.edges; ++e) {
            out.push_back({FaultLocation::Kind::split_record, 2 * lay.rounds, e, 'I'});
        }
        for (size_t t = 0; t < lay.rounds; ++t) {
            for (size_t i = 0; i < lay.nbase; ++i) {
                out.push_back({FaultLocation::Kind::record, 2 * lay.rounds + 1 + t, i, 'I'});
            }
        }
        return out;
    }

    // Parity constraints that hold deterministically in every faultless run:
    // base-check records pinned to +1 outside the merge, cycle and deformed
    // records pinned at merged round one, repeated merged checks consistent
    // between rounds, and each basis cycle's split outcomes matching its last
    // merged record.
    std::vector<std::vector<size_t>> detectors() const {
        std::vector<std::vector<size_t>> out;
        for (size_t t = 0; t < lay.rounds; ++t) {
            for (size_t i = 0; i < lay.nbase; ++i) {
                out.push_back({lay.idx_before(t, i)});
            }
        }
        for (size_t c = 0; c < lay.ncyc; ++c) {
            out.push_back({lay.idx_merge(0, lay.nv + c)});
        }
        for (size_t s = 0; s < lay.ndef; ++s) {
            out.push_back({lay.idx_merge(0, lay.nv + lay.ncyc + s)});
        }
        for (size_t t = 0; t + 1 < lay.rounds; ++t) {
            for (size_t j = 0; j < lay.merge_width(); ++j) {
                out.push_back({lay.idx_merge(t, j), lay.idx_merge(t + 1, j)});
            }
        }
        for (size_t c = 0; c < lay.ncyc; ++c) {
            std::vector<size_t> det{lay.idx_merge(lay.rounds - 1, lay.nv + c)};
            for (size_t e = 0; e < lay.edges; ++e) {
                if (merged.cycle_checks[c].letter_at(code.n + e) != 'I') {
                    det.push_back(lay.idx_split(e));
                }
            }
            out.push_back(std::move(det));
        }
        for (size_t t = 0; t < lay.rounds; ++t) {
            for (size_t i = 0; i < lay.nbase; ++i) {
                out.push_back({lay.idx_after(t, i)});
            }
        }
        for (size_t i = 0; i < lay.nbase; ++i) {
            out.push_back({lay.idx_ideal(i)});
        }
        return out;
    }
};

struct Column {
    f2::BitVector det;
    f2::BitVector frame;
    bool sigma = false;
};

struct Model {
    Driver driver;
    std::vector<std::vector<size_t>> dets;
    Trace reference;

    Model(const pauli::StabilizerCode& code, const surgery::MergedCode& merged, size_t rounds)
        : driver(code, merged, rounds), dets(driver.detectors()) {
        // The detector list is a claim about the protocol; check it against a
        // few randomness branches before trusting it.
        for (uint64_t seed : {0u, 1u, 2u}) {
            PlusSource plus;
            SeededSource seeded(0x5eedbeef + seed);
            RandomSource& src = seed == 0 ? static_cast<RandomSource&>(plus) : seeded;
            Trace tr = driver.run({}, src);
            for (const auto& det : dets) {
                int parity = +1;
                for (size_t idx : det) {
                    parity *= tr.records[idx];
                }
                if (parity != +1) {
                    throw std::logic_error("fault search: detector is not deterministic");
                }
            }
            if (seed == 0) {
                reference = std::move(tr);
            }
        }
    }

    Column column_of(const Trace& tr) const {
        Column col;
        col.det = f2::BitVector(dets.size());
        for (size_t d = 0; d < dets.size(); ++d) {
            bool vio = false;
            for (size_t idx : dets[d]) {
                vio ^= tr.records[idx] != reference.records[idx];
            }
            col.det.set(d, vio);
        }
        col.frame = f2::BitVector(tr.frame.size());
        for (size_t i = 0; i < tr.frame.size(); ++i) {
            if (tr.frame[i].x != reference.frame[i].x || tr.frame[i].z != reference.frame[i].z) {
                throw std::logic_error("fault search: canonical frame drift across replays");
            }
            col.frame.set(i, tr.frame[i].sign != reference.frame[i].sign);
        }
        col.sigma = tr.sigma != reference.sigma;
        return col;
    }

    Column replay(const std::vector<FaultLocation>& faults) const {
        PlusSource plus;
        return column_of(driver.run(faults, plus));
    }

    static bool violates(const Column& col) {
        return col.det.none() && (col.sigma || col.frame.any());
    }
};

// Lexicographically first violating index combination of the given weight.
std::optional<std::vector<size_t>> scan_weight(const std::vector<Column>& cols, size_t w,
                                               bool parallel) {
    size_t m = cols.size();
    if (w == 0 || m < w) {
        return std::nullopt;
    }
    std::optional<std::vector<size_t>> best;

#pragma omp parallel if (parallel)
    {
        std::optional<std::vector<size_t>> local;
#pragma omp for schedule(dynamic) nowait
        for (size_t first = 0; first <= m - w; ++first) {
            if (local.has_value()) {
                continue;
            }
            std::vector<size_t> pick{first};
            Column acc = cols[first];
            auto extend = [&](auto&& self, size_t from) -> bool {
                if (pick.size() == w) {
                    return Model::violates(acc);
                }
                for (size_t i = from; i < m; ++i) {
                    acc.det ^= cols[i].det;
                    acc.frame ^= cols[i].frame;
                    acc.sigma ^= cols[i].sigma;
                    pick.push_back(i);
                    if (self(self, i + 1)) {
                        return true;
                    }
                    pick.pop_back();
                    acc.det ^= cols[i].det;
                    acc.frame ^= cols[i].frame;
                    acc.sigma ^= cols[i].sigma;
                }
                return false;
            };
            if (extend(extend, first + 1)) {
                local = pick;
            }
        }
#pragma omp critical
        {
            if (local.has_value() && (!best.has_value() || local->front() < best->front())) {
                best = std::move(local);
            }
        }
    }
    return best;
}

size_t binom_saturating(size_t n, size_t k, size_t cap) {
    size_t out = 1;
    for (size_t i = 0; i < k; ++i) {
        if (out > cap / (n - i)) {
            return cap + 1;
        }
        out = out * (n - i) / (i + 1);
    }
    return out;
}

FaultSearchResult search_impl(const pauli::StabilizerCode& code,
                              const surgery::MergedCode& merged, size_t rounds,
                              size_t max_weight, bool parallel) {
    Model model(code, merged, rounds);
    std::vector<FaultLocation> locs = model.driver.locations();
    std::vector<Column> cols;
    cols.reserve(locs.size());
    for (const auto& loc : locs) {
        cols.push_back(model.replay({loc}));
    }

    const size_t budget = 20'000'000;
    size_t spent = 0;
    FaultSearchResult result;
    for (size_t w = 1; w <= max_weight; ++w) {
        size_t cost = binom_saturating(locs.size(), w, budget);
        if (spent + cost > budget) {
            result.exhaustive = false;
            result.verdict = "no violation up to weight " +
                             std::to_string(result.searched_weight) + " (budget limit)";
            return result;
        }
        spent += cost;
        auto hit = scan_weight(cols, w, parallel);
        if (hit.has_value()) {
            std::vector<FaultLocation> faults;
            for (size_t i : *hit) {
                faults.push_back(locs[i]);
            }
            if (!Model::violates(model.replay(faults))) {
                throw std::logic_error("fault search: replay disagrees with the linear model");
            }
            result.searched_weight = w;
            result.violation = std::move(faults);
            result.verdict = "violation at weight " + std::to_string(w);
            return result;
        }
        result.searched_weight = w;
    }
    result.verdict = "no violation up to weight " + std::to_string(result.searched_weight);
    return result;
}

}  // namespace

std::string FaultLocation::to_string() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::qubit:
            os << "qubit " << slot << " " << index << " " << letter;
            break;
        case Kind::record:
            os << "record " << slot << " " << index;
            break;
        case Kind::split_record:
            os << "split " << slot << " " << index;
            break;
    }
    return os.str();
}

FaultLocation FaultLocation::parse(const std::string& line) {
    std::istringstream is(line);
    std::string word;
    FaultLocation f;
    if (!(is >> word >> f.slot >> f.index)) {
        throw std::invalid_argument("fault location: unparseable line: " + line);
    }
    if (word == "qubit") {
        f.kind = Kind::qubit;
        if (!(is >> f.letter)) {
            throw std::invalid_argument("fault location: missing letter: " + line);
        }
    } else if (word == "record") {
        f.kind = Kind::record;
    } else if (word == "split") {
        f.kind = Kind::split_record;
    } else {
        throw std::invalid_argument("fault location: unknown kind: " + line);
    }
    std::string rest;
    if (is >> rest) {
        throw std::invalid_argument("fault location: trailing input: " + line);
    }
    return f;
}

FaultSearchResult fault_search(const pauli::StabilizerCode& code,
                               const surgery::MergedCode& merged, size_t rounds,
                               size_t max_weight) {
    return search_impl(code, merged, rounds, max_weight, true);
}

FaultSearchResult fault_search_serial(const pauli::StabilizerCode& code,
                                      const surgery::MergedCode& merged, size_t rounds,
                                      size_t max_weight) {
    return search_impl(code, merged, rounds, max_weight, false);
}

bool replay_faults(const pauli::StabilizerCode& code, const surgery::MergedCode& merged,
                   size_t rounds, const std::vector<FaultLocation>& faults) {
    Model model(code, merged, rounds);
    for (const auto& f : faults) {
        if (!model.driver.valid(f)) {
            throw std::invalid_argument("replay: invalid fault location: " + f.to_string());
        }
    }
    return Model::violates(model.replay(faults));
}

}  // namespace qsurg::sim
