#include "qsurg/simkit.hpp"

#include <algorithm>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace qsurg::sim {

namespace {

pauli::PauliOperator pad_to(const pauli::PauliOperator& p, size_t total) {
    if (p.n > total) {
        throw std::invalid_argument("pad_to: operator longer than target");
    }
    pauli::PauliOperator out(total);
    out.sign = p.sign;
    for (size_t q = 0; q < p.n; ++q) {
        out.x.set(q, p.x.get(q));
        out.z.set(q, p.z.get(q));
    }
    return out;
}

// Symplectic form row [z | x]: dot with [x' | z'] counts anticommutation.
f2::BitVector form_row(const pauli::PauliOperator& p) {
    f2::BitVector r(2 * p.n);
    for (size_t q = 0; q < p.n; ++q) {
        r.set(q, p.z.get(q));
        r.set(p.n + q, p.x.get(q));
    }
    return r;
}

}  // namespace

Tableau Tableau::zero_state(size_t n) {
    Tableau t;
    t.n = n;
    t.stab.reserve(n);
    t.destab.reserve(n);
    for (size_t q = 0; q < n; ++q) {
        t.stab.push_back(pauli::PauliOperator::single(n, q, 'Z'));
        t.destab.push_back(pauli::PauliOperator::single(n, q, 'X'));
    }
    return t;
}

bool Tableau::valid_frame() const {
    if (stab.size() != n || destab.size() != n) {
        return false;
    }
    for (size_t i = 0; i < n; ++i) {
        if (stab[i].n != n || destab[i].n != n) {
            return false;
        }
        for (size_t j = 0; j < n; ++j) {
            if (!pauli::commutes(stab[i], stab[j]) || !pauli::commutes(destab[i], destab[j])) {
                return false;
            }
            if (pauli::commutes(destab[i], stab[j]) == (i == j)) {
                return false;
            }
        }
    }
    f2::RowBasis basis(2 * n);
    for (size_t i = 0; i < n; ++i) {
        if (!basis.insert(stab[i].symplectic())) {
            return false;
        }
    }
    return true;
}

MeasureResult measure_pauli(Tableau& t, const pauli::PauliOperator& p, std::optional<int> forced,
                            RandomSource* random) {
    if (p.n != t.n) {
        throw std::invalid_argument("measure_pauli: qubit count mismatch");
    }
    if (p.is_identity()) {
        return {p.sign, true};
    }
    std::vector<size_t> anti;
    for (size_t i = 0; i < t.n; ++i) {
        if (!pauli::commutes(t.stab[i], p)) {
            anti.push_back(i);
        }
    }
    if (anti.empty()) {
        auto s = deterministic_sign(t, p);
        if (!s.has_value()) {
            throw std::logic_error("measure_pauli: commuting operator outside the frame span");
        }
        if (forced.has_value() && *forced != *s) {
            throw std::logic_error("measure_pauli: forced outcome contradicts a deterministic one");
        }
        return {*s, true};
    }
    size_t pivot = anti[0];
    pauli::PauliOperator prow = t.stab[pivot];
    for (size_t i : anti) {
        if (i != pivot) {
            t.stab[i] = pauli::multiply(t.stab[i], prow);
        }
    }
    for (size_t i = 0; i < t.n; ++i) {
        if (i != pivot && !pauli::commutes(t.destab[i], p)) {
            t.destab[i] = pauli::multiply(t.destab[i], prow);
        }
    }
    t.destab[pivot] = prow;
    int outcome;
    if (forced.has_value()) {
        outcome = *forced;
    } else if (random != nullptr) {
        outcome = random->next_sign();
    } else {
        throw std::invalid_argument("measure_pauli: indeterminate outcome needs a random source");
    }
    if (outcome != +1 && outcome != -1) {
        throw std::invalid_argument("measure_pauli: outcome must be +1 or -1");
    }
    t.stab[pivot] = p;
    t.stab[pivot].sign = p.sign * outcome;
    return {outcome, false};
}

void apply_pauli(Tableau& t, const pauli::PauliOperator& p) {
    if (p.n != t.n) {
        throw std::invalid_argument("apply_pauli: qubit count mismatch");
    }
    for (auto& row : t.stab) {
        if (!pauli::commutes(row, p)) {
            row.sign = -row.sign;
        }
    }
    for (auto& row : t.destab) {
        if (!pauli::commutes(row, p)) {
            row.sign = -row.sign;
        }
    }
}

std::optional<int> deterministic_sign(const Tableau& t, const pauli::PauliOperator& p) {
    for (const auto& row : t.stab) {
        if (!pauli::commutes(row, p)) {
            return std::nullopt;
        }
    }
    pauli::PhasedPauli acc(t.n);
    for (size_t i = 0; i < t.n; ++i) {
        if (!pauli::commutes(t.destab[i], p)) {
            acc *= pauli::PhasedPauli::from_operator(t.stab[i]);
        }
    }
    pauli::PauliOperator prod = acc.to_operator();
    if (prod.x != p.x || prod.z != p.z) {
        throw std::logic_error("deterministic_sign: frame does not span the operator");
    }
    return prod.sign * p.sign;
}

bool is_stabilized(const Tableau& t, const pauli::PauliOperator& p) {
    auto s = deterministic_sign(t, p);
    return s.has_value() && *s == +1;
}

std::vector<pauli::PauliOperator> canonical_generators(const Tableau& t) {
    std::vector<pauli::PauliOperator> rows = t.stab;
    size_t done = 0;
    for (size_t c = 0; c < 2 * t.n && done < rows.size(); ++c) {
        size_t pivot = rows.size();
        for (size_t i = done; i < rows.size(); ++i) {
            if (rows[i].symplectic().get(c)) {
                pivot = i;
                break;
            }
        }
        if (pivot == rows.size()) {
            continue;
        }
        std::swap(rows[done], rows[pivot]);
        for (size_t i = 0; i < rows.size(); ++i) {
            if (i != done && rows[i].symplectic().get(c)) {
                rows[i] = pauli::multiply(rows[i], rows[done]);
            }
        }
        ++done;
    }
    return rows;
}

Tableau code_state(const pauli::StabilizerCode& code) {
    Tableau t = Tableau::zero_state(code.n);
    std::vector<pauli::PauliOperator> fixed;
    for (const auto& g : code.generators) {
        auto det = deterministic_sign(t, g);
        if (!det.has_value()) {
            measure_pauli(t, g, +1);
        } else if (*det == -1) {
            // Flip the sign with a Pauli that anticommutes with g but keeps
            // every previously fixed generator.
            f2::BitMatrix m(fixed.size() + 1, 2 * code.n);
            for (size_t i = 0; i < fixed.size(); ++i) {
                m.row[i] = form_row(fixed[i]);
            }
            m.row[fixed.size()] = form_row(g);
            f2::BitVector rhs(fixed.size() + 1);
            rhs.set(fixed.size(), true);
            auto sol = f2::solve(m, rhs);
            if (!sol.has_value()) {
                throw std::logic_error("code_state: no sign fix exists");
            }
            pauli::PauliOperator fix(code.n);
            for (size_t q = 0; q < code.n; ++q) {
                fix.x.set(q, sol->get(q));
                fix.z.set(q, sol->get(code.n + q));
            }
            apply_pauli(t, fix);
        }
        fixed.push_back(g);
    }
    return t;
}

ProtocolTrace run_protocol(const pauli::StabilizerCode& code, const surgery::MergedCode& merged,
                           Tableau& state, RandomSource& random) {
    const size_t n = code.n;
    const size_t total = merged.total_qubits();
    if (merged.base.n != n) {
        throw std::invalid_argument("run_protocol: merged code built from a different base");
    }
    if (state.n != total) {
        throw std::invalid_argument("run_protocol: state has the wrong qubit count");
    }
    for (const auto& g : code.generators) {
        auto s = deterministic_sign(state, pad_to(g, total));
        if (!s.has_value() || *s != +1) {
            throw std::invalid_argument("run_protocol: initial state is not a code state");
        }
    }

    ProtocolTrace tr;
    auto log_line = [&tr](const char* stage, size_t id, int outcome) {
        std::ostringstream os;
        os << stage << " " << id << " " << (outcome < 0 ? "-1" : "+1");
        tr.log.push_back(os.str());
    };

    for (size_t e = 0; e < merged.edge_qubits; ++e) {
        pauli::PauliOperator xe = pauli::PauliOperator::single(total, n + e, 'X');
        auto det = deterministic_sign(state, xe);
        if (!det.has_value()) {
            measure_pauli(state, xe, +1);
        } else if (*det == -1) {
            apply_pauli(state, pauli::PauliOperator::single(total, n + e, 'Z'));
        }
        log_line("init", e, +1);
    }

    tr.epsilon.resize(merged.vertex_checks.size(), +1);
    tr.sigma = +1;
    for (size_t v = 0; v < merged.vertex_checks.size(); ++v) {
        auto r = measure_pauli(state, merged.vertex_checks[v], std::nullopt, &random);
        tr.epsilon[v] = r.outcome;
        tr.sigma *= r.outcome;
        log_line("vertex", v, r.outcome);
    }
    for (size_t c = 0; c < merged.cycle_checks.size(); ++c) {
        auto r = measure_pauli(state, merged.cycle_checks[c], std::nullopt, &random);
        log_line("cycle", c, r.outcome);
    }
    for (size_t i = 0; i < merged.deformed_checks.size(); ++i) {
        auto r = measure_pauli(state, merged.deformed_checks[i], std::nullopt, &random);
        log_line("deformed", i, r.outcome);
    }

    tr.omega.resize(merged.edge_qubits, +1);
    for (size_t e = 0; e < merged.edge_qubits; ++e) {
        auto r = measure_pauli(state, pauli::PauliOperator::single(total, n + e, 'X'),
                               std::nullopt, &random);
        tr.omega[e] = r.outcome;
        log_line("split", e, r.outcome);
    }

    // Recover the measurement graph from the vertex checks, then push the
    // split outcomes to tree path parities from the anchor vertex 0.
    const size_t nv = merged.vertex_checks.size();
    std::vector<std::vector<std::pair<size_t, size_t>>> adj(nv);
    for (size_t e = 0; e < merged.edge_qubits; ++e) {
        std::vector<size_t> ends;
        for (size_t v = 0; v < nv; ++v) {
            if (merged.vertex_checks[v].letter_at(n + e) != 'I') {
                ends.push_back(v);
            }
        }
        if (ends.size() != 2) {
            throw std::invalid_argument("run_protocol: edge without two endpoints");
        }
        adj[ends[0]].push_back({e, ends[1]});
        adj[ends[1]].push_back({e, ends[0]});
    }
    std::vector<int> phi(nv, 0);
    if (nv > 0) {
        phi[0] = +1;
        std::queue<size_t> bfs;
        bfs.push(0);
        while (!bfs.empty()) {
            size_t v = bfs.front();
            bfs.pop();
            for (const auto& [e, u] : adj[v]) {
                if (phi[u] == 0) {
                    phi[u] = phi[v] * tr.omega[e];
                    bfs.push(u);
                }
            }
        }
    }
    for (size_t v = 0; v < nv; ++v) {
        if (phi[v] == 0) {
            throw std::invalid_argument("run_protocol: measurement graph is not connected");
        }
        size_t q = total;
        for (size_t b = 0; b < n; ++b) {
            if (merged.vertex_checks[v].letter_at(b) != 'I') {
                q = b;
                break;
            }
        }
        if (q == total) {
            continue;
        }
        log_line("correct", q, phi[v]);
        if (phi[v] == -1) {
            apply_pauli(state,
                        pauli::PauliOperator::single(total, q, merged.target.letter_at(q)));
            tr.corrections.push_back(q);
        }
    }
    std::sort(tr.corrections.begin(), tr.corrections.end());

    for (const auto& g : code.generators) {
        if (!is_stabilized(state, pad_to(g, total))) {
            throw std::logic_error("run_protocol: code space was not restored");
        }
    }
    pauli::PauliOperator measured = merged.target;
    measured.sign *= tr.sigma;
    if (!is_stabilized(state, measured)) {
        throw std::logic_error("run_protocol: recorded outcome disagrees with the state");
    }
    return tr;
}

}  // namespace qsurg::sim
