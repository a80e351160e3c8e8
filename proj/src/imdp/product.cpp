#include <algorithm>
#include <deque>

#include <nlohmann/json.hpp>

#include "gpimdp/errors.h"
#include "gpimdp/imdp.h"

namespace gpimdp {

std::uint32_t Pimdp::index(std::uint32_t cell, std::uint32_t dfaState) const {
    if (cell >= abstraction.stateCount() || dfaState >= automaton.stateCount()) return noState;
    return lookup[cell * automaton.stateCount() + dfaState];
}

std::uint32_t Pimdp::initialState(std::uint32_t cell) const {
    if (cell >= abstraction.stateCount()) return noState;
    return index(cell, automaton.successor(automaton.initialState(), abstraction.label(cell)));
}

std::uint32_t Pimdp::successorDfaState(std::size_t s) const {
    State const st = states[s];
    return automaton.successor(st.dfa, abstraction.label(st.cell));
}

bool Pimdp::isDoomed(std::size_t s) const { return violating[s] || automaton.isSink(successorDfaState(s)); }

nlohmann::json Pimdp::toJson() const {
    nlohmann::json j;
    j["states"] = stateCount();
    j["actions"] = actionCount();
    j["dfa_states"] = automaton.stateCount();
    auto& st = j["product_states"] = nlohmann::json::array();
    for (std::size_t s = 0; s < stateCount(); ++s) {
        st.push_back({{"id", s}, {"cell", states[s].cell}, {"dfa", states[s].dfa}, {"accepting", accepting[s]}, {"violating", violating[s]}});
    }
    auto& trans = j["transitions"] = nlohmann::json::array();
    auto& tails = j["tail_upper"] = nlohmann::json::array();
    for (std::size_t s = 0; s < stateCount(); ++s) {
        std::uint32_t const z = successorDfaState(s);
        for (std::size_t a = 0; a < actionCount(); ++a) {
            Row const& r = row(s, a);
            for (auto const& e : r.entries) {
                std::uint32_t const t = index(e.dest, z);
                if (t != noState) trans.push_back({s, a, t, e.lower, e.upper});
            }
            if (r.tailUpper > 0.0) tails.push_back({s, a, r.tailUpper});
        }
    }
    return j;
}

Pimdp product(Imdp imdp, ltlf::Dfa dfa, bool prune) {
    if (!(imdp.propositions() == dfa.propositions())) throw ModelError("imdp", "IMDP and automaton use different proposition sets");
    Pimdp p;
    std::size_t const cells = imdp.stateCount();
    std::size_t const zs = dfa.stateCount();
    p.abstraction = std::move(imdp);
    p.automaton = std::move(dfa);
    Imdp const& m = p.abstraction;
    ltlf::Dfa const& d = p.automaton;
    auto const outside = m.outsideState();

    auto isViolating = [&](std::size_t q, std::uint32_t z) { return (outside && q == *outside) || d.isSink(z); };
    auto isAccepting = [&](std::size_t q, std::uint32_t z) { return !isViolating(q, z) && d.isAccepting(z); };

    std::vector<char> keep(cells * zs, prune ? 0 : 1);
    if (prune) {
        std::deque<std::size_t> queue;
        auto visit = [&](std::size_t q, std::uint32_t z) {
            auto const k = q * zs + z;
            if (!keep[k]) {
                keep[k] = 1;
                queue.push_back(k);
            }
        };
        for (std::size_t q = 0; q < cells; ++q) visit(q, d.successor(d.initialState(), m.label(q)));
        std::vector<char> layerDone(zs, 0);
        while (!queue.empty()) {
            auto const k = queue.front();
            queue.pop_front();
            std::size_t const q = k / zs;
            auto const z = static_cast<std::uint32_t>(k % zs);
            if (isViolating(q, z) || isAccepting(q, z)) continue;
            std::uint32_t const next = d.successor(z, m.label(q));
            bool anyTail = false;
            for (std::size_t a = 0; a < m.actionCount(); ++a) {
                Row const& r = m.row(q, a);
                anyTail = anyTail || r.tailUpper > 0.0;
                for (auto const& e : r.entries) {
                    if (e.upper > 0.0) visit(e.dest, next);
                }
            }
            if (anyTail && !layerDone[next]) {
                layerDone[next] = 1;
                for (std::size_t t = 0; t < cells; ++t) visit(t, next);
            }
        }
    }

    p.lookup.assign(cells * zs, noState);
    for (std::size_t q = 0; q < cells; ++q) {
        for (std::uint32_t z = 0; z < zs; ++z) {
            if (!keep[q * zs + z]) continue;
            p.lookup[q * zs + z] = static_cast<std::uint32_t>(p.states.size());
            p.states.push_back({static_cast<std::uint32_t>(q), z});
            p.accepting.push_back(isAccepting(q, z));
            p.violating.push_back(isViolating(q, z));
        }
    }
    return p;
}

std::vector<std::uint32_t> pimdpDistance(Pimdp const& p, EdgeSet edges) {
    std::size_t const n = p.stateCount();
    // Predecessors per product state; tail edges are kept per DFA layer to
    // avoid materialising a dense graph.
    std::vector<std::vector<std::uint32_t>> preds(n);
    std::vector<std::vector<std::uint32_t>> tailPreds(p.dfa().stateCount());
    for (std::uint32_t s = 0; s < n; ++s) {
        if (p.isAccepting(s) || p.isViolating(s)) continue;
        std::uint32_t const z = p.successorDfaState(s);
        bool tail = false;
        for (std::size_t a = 0; a < p.actionCount(); ++a) {
            Row const& r = p.row(s, a);
            if (edges == EdgeSet::Possible && r.tailUpper > 0.0) tail = true;
            for (auto const& e : r.entries) {
                bool const use = edges == EdgeSet::Possible ? e.upper > 0.0 : e.nominal;
                if (!use) continue;
                std::uint32_t const t = p.index(e.dest, z);
                if (t != noState) preds[t].push_back(s);
            }
        }
        if (tail) tailPreds[z].push_back(s);
    }
    std::vector<std::uint32_t> dist(n, ltlf::unreachableDistance);
    std::deque<std::uint32_t> queue;
    for (std::uint32_t s = 0; s < n; ++s) {
        if (p.isAccepting(s)) {
            dist[s] = 0;
            queue.push_back(s);
        }
    }
    std::vector<char> tailDone(p.dfa().stateCount(), 0);
    auto relax = [&](std::uint32_t pred, std::uint32_t d) {
        if (dist[pred] == ltlf::unreachableDistance) {
            dist[pred] = d;
            queue.push_back(pred);
        }
    };
    while (!queue.empty()) {
        auto const s = queue.front();
        queue.pop_front();
        for (auto pr : preds[s]) relax(pr, dist[s] + 1);
        auto const z = p.state(s).dfa;
        if (!tailDone[z]) {
            tailDone[z] = 1;
            for (auto pr : tailPreds[z]) relax(pr, dist[s] + 1);
        }
    }
    return dist;
}

}  // namespace gpimdp
