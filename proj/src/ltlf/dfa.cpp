#include "gpimdp/dfa.h"

#include <algorithm>
#include <deque>
#include <iterator>
#include <map>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "gpimdp/errors.h"

namespace gpimdp::ltlf {

namespace {

enum class Kind : std::uint8_t { True, False, Pos, Neg, And, Or, Next, WeakNext, Until, Release, Eventually, Globally };

struct Node {
    Kind kind;
    int atom = -1;
    std::vector<std::uint32_t> kids;

    bool operator<(Node const& o) const {
        if (kind != o.kind) return kind < o.kind;
        if (atom != o.atom) return atom < o.atom;
        return kids < o.kids;
    }
};

// Hash-consed negation normal form. Structurally equal formulas share one id,
// and conjunctions/disjunctions are kept flat, sorted and duplicate free, so
// equal ids stand for syntactically equal canonical formulas.
class Store {
   public:
    Store() {
        trueId = intern({Kind::True, -1, {}});
        falseId = intern({Kind::False, -1, {}});
        nonEmptyId = intern({Kind::Eventually, -1, {trueId}});
        emptyId = intern({Kind::Globally, -1, {falseId}});
    }

    std::uint32_t fromFormula(Formula const& f, bool negated) {
        switch (f.op()) {
            case Op::True:
                return negated ? falseId : trueId;
            case Op::False:
                return negated ? trueId : falseId;
            case Op::Atom:
                return intern({negated ? Kind::Neg : Kind::Pos, f.atomIndex(), {}});
            case Op::Not:
                return fromFormula(f.left(), !negated);
            case Op::And:
            case Op::Or: {
                bool const conj = (f.op() == Op::And) != negated;
                std::vector<std::uint32_t> kids{fromFormula(f.left(), negated), fromFormula(f.right(), negated)};
                return conj ? mkAnd(std::move(kids)) : mkOr(std::move(kids));
            }
            case Op::Next:
            case Op::WeakNext: {
                bool const strong = (f.op() == Op::Next) != negated;
                auto const c = fromFormula(f.left(), negated);
                return strong ? mkNext(c) : mkWeakNext(c);
            }
            case Op::Until:
            case Op::Release: {
                bool const until = (f.op() == Op::Until) != negated;
                auto const a = fromFormula(f.left(), negated);
                auto const b = fromFormula(f.right(), negated);
                return until ? mkUntil(a, b) : mkRelease(a, b);
            }
            case Op::Eventually:
            case Op::Globally: {
                bool const ev = (f.op() == Op::Eventually) != negated;
                auto const c = fromFormula(f.left(), negated);
                return ev ? mkEventually(c) : mkGlobally(c);
            }
        }
        throw ModelError("ltlf", "unknown operator");
    }

    std::uint32_t progress(std::uint32_t id, Symbol symbol) {
        auto const key = (static_cast<std::uint64_t>(id) << 32) | symbol;
        if (auto it = progCache.find(key); it != progCache.end()) return it->second;
        Node const n = nodes[id];
        std::uint32_t r = falseId;
        switch (n.kind) {
            case Kind::True:
                r = trueId;
                break;
            case Kind::False:
                r = falseId;
                break;
            case Kind::Pos:
                r = ((symbol >> n.atom) & 1u) ? trueId : falseId;
                break;
            case Kind::Neg:
                r = ((symbol >> n.atom) & 1u) ? falseId : trueId;
                break;
            case Kind::And:
            case Kind::Or: {
                std::vector<std::uint32_t> kids;
                kids.reserve(n.kids.size());
                for (auto k : n.kids) kids.push_back(progress(k, symbol));
                r = n.kind == Kind::And ? mkAnd(std::move(kids)) : mkOr(std::move(kids));
                break;
            }
            case Kind::Next:
                r = mkAnd({n.kids[0], nonEmptyId});
                break;
            case Kind::WeakNext:
                r = mkOr({n.kids[0], emptyId});
                break;
            case Kind::Until:
                r = mkOr({progress(n.kids[1], symbol), mkAnd({progress(n.kids[0], symbol), id})});
                break;
            case Kind::Release:
                r = mkAnd({progress(n.kids[1], symbol), mkOr({progress(n.kids[0], symbol), id})});
                break;
            case Kind::Eventually:
                r = mkOr({progress(n.kids[0], symbol), id});
                break;
            case Kind::Globally:
                r = mkAnd({progress(n.kids[0], symbol), id});
                break;
        }
        progCache.emplace(key, r);
        return r;
    }

    // Disjunctive normal form over the non-Boolean subformulas with
    // subsumed clauses removed. Progression only ever produces Boolean
    // combinations of a finite closure of subformulas, so canonical forms
    // are finitely many and equivalent obligations collapse to one state.
    std::uint32_t canonical(std::uint32_t id) {
        if (auto it = canonCache.find(id); it != canonCache.end()) return it->second;
        auto clauses = dnf(id);
        std::sort(clauses.begin(), clauses.end(), [](auto const& a, auto const& b) { return a.size() < b.size() || (a.size() == b.size() && a < b); });
        std::vector<std::vector<std::uint32_t>> kept;
        for (auto const& c : clauses) {
            bool subsumed = false;
            for (auto const& k : kept) {
                if (std::includes(c.begin(), c.end(), k.begin(), k.end())) {
                    subsumed = true;
                    break;
                }
            }
            if (!subsumed) kept.push_back(c);
        }
        std::vector<std::uint32_t> terms;
        for (auto& c : kept) terms.push_back(mkAnd(std::move(c)));
        auto const r = mkOr(std::move(terms));
        canonCache.emplace(id, r);
        return r;
    }

    bool acceptsEmpty(std::uint32_t id) const {
        Node const& n = nodes[id];
        switch (n.kind) {
            case Kind::True:
            case Kind::Neg:
            case Kind::WeakNext:
            case Kind::Release:
            case Kind::Globally:
                return true;
            case Kind::False:
            case Kind::Pos:
            case Kind::Next:
            case Kind::Until:
            case Kind::Eventually:
                return false;
            case Kind::And:
                return std::all_of(n.kids.begin(), n.kids.end(), [&](auto k) { return acceptsEmpty(k); });
            case Kind::Or:
                return std::any_of(n.kids.begin(), n.kids.end(), [&](auto k) { return acceptsEmpty(k); });
        }
        return false;
    }

    std::string toString(std::uint32_t id, PropositionSet const& ap) const {
        Node const& n = nodes[id];
        auto atomName = [&](int a) { return a < static_cast<int>(ap.size()) ? ap.name(static_cast<std::size_t>(a)) : "p" + std::to_string(a); };
        auto unary = [&](char const* op) { return std::string(op) + "(" + toString(n.kids[0], ap) + ")"; };
        auto binary = [&](char const* op) { return "(" + toString(n.kids[0], ap) + " " + op + " " + toString(n.kids[1], ap) + ")"; };
        switch (n.kind) {
            case Kind::True:
                return "true";
            case Kind::False:
                return "false";
            case Kind::Pos:
                return atomName(n.atom);
            case Kind::Neg:
                return "!" + atomName(n.atom);
            case Kind::And:
            case Kind::Or: {
                std::string s = "(";
                for (std::size_t i = 0; i < n.kids.size(); ++i) {
                    if (i > 0) s += n.kind == Kind::And ? " & " : " | ";
                    s += toString(n.kids[i], ap);
                }
                return s + ")";
            }
            case Kind::Next:
                return unary("X");
            case Kind::WeakNext:
                return unary("WX");
            case Kind::Until:
                return binary("U");
            case Kind::Release:
                return binary("R");
            case Kind::Eventually:
                return unary("F");
            case Kind::Globally:
                return unary("G");
        }
        return {};
    }

   private:
    std::uint32_t intern(Node n) {
        if (auto it = index.find(n); it != index.end()) return it->second;
        auto const id = static_cast<std::uint32_t>(nodes.size());
        nodes.push_back(n);
        index.emplace(std::move(n), id);
        return id;
    }

    bool complementary(std::uint32_t a, std::uint32_t b) const {
        Node const& x = nodes[a];
        Node const& y = nodes[b];
        if ((x.kind == Kind::Pos && y.kind == Kind::Neg) || (x.kind == Kind::Neg && y.kind == Kind::Pos)) return x.atom == y.atom;
        return (a == nonEmptyId && b == emptyId) || (a == emptyId && b == nonEmptyId);
    }

    std::uint32_t mkJunction(std::vector<std::uint32_t> kids, bool conj) {
        Kind const self = conj ? Kind::And : Kind::Or;
        std::uint32_t const unit = conj ? trueId : falseId;
        std::uint32_t const zero = conj ? falseId : trueId;
        std::vector<std::uint32_t> flat;
        for (auto k : kids) {
            if (k == zero) return zero;
            if (k == unit) continue;
            if (nodes[k].kind == self) {
                flat.insert(flat.end(), nodes[k].kids.begin(), nodes[k].kids.end());
            } else {
                flat.push_back(k);
            }
        }
        std::sort(flat.begin(), flat.end());
        flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
        for (std::size_t i = 0; i < flat.size(); ++i) {
            for (std::size_t j = i + 1; j < flat.size(); ++j) {
                if (complementary(flat[i], flat[j])) return zero;
            }
        }
        if (flat.empty()) return unit;
        if (flat.size() == 1) return flat[0];
        return intern({self, -1, std::move(flat)});
    }

    using Clauses = std::vector<std::vector<std::uint32_t>>;

    // Sorted, duplicate-free clauses; contradictory clauses are dropped.
    Clauses dnf(std::uint32_t id) {
        Node const n = nodes[id];
        if (id == trueId) return {{}};
        if (id == falseId) return {};
        if (n.kind == Kind::Or) {
            Clauses out;
            for (auto k : n.kids) {
                auto part = dnf(k);
                out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
            }
            normalise(out);
            return out;
        }
        if (n.kind == Kind::And) {
            Clauses out{{}};
            for (auto k : n.kids) {
                Clauses const part = dnf(k);
                Clauses next;
                for (auto const& a : out) {
                    for (auto const& b : part) {
                        std::vector<std::uint32_t> c;
                        std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(c));
                        if (!contradictory(c)) next.push_back(std::move(c));
                    }
                }
                if (next.size() > maxClauses) throw CapacityError("ltlf", "normal form exceeds " + std::to_string(maxClauses) + " clauses");
                out = std::move(next);
                normalise(out);
            }
            return out;
        }
        return {{id}};
    }

    bool contradictory(std::vector<std::uint32_t> const& clause) const {
        for (std::size_t i = 0; i < clause.size(); ++i) {
            for (std::size_t j = i + 1; j < clause.size(); ++j) {
                if (complementary(clause[i], clause[j])) return true;
            }
        }
        return false;
    }

    static void normalise(Clauses& clauses) {
        std::sort(clauses.begin(), clauses.end());
        clauses.erase(std::unique(clauses.begin(), clauses.end()), clauses.end());
    }

    static constexpr std::size_t maxClauses = 100000;

    std::uint32_t mkAnd(std::vector<std::uint32_t> kids) { return mkJunction(std::move(kids), true); }
    std::uint32_t mkOr(std::vector<std::uint32_t> kids) { return mkJunction(std::move(kids), false); }

    std::uint32_t mkNext(std::uint32_t c) { return c == falseId ? falseId : intern({Kind::Next, -1, {c}}); }
    std::uint32_t mkWeakNext(std::uint32_t c) { return c == trueId ? trueId : intern({Kind::WeakNext, -1, {c}}); }
    std::uint32_t mkEventually(std::uint32_t c) { return c == falseId ? falseId : intern({Kind::Eventually, -1, {c}}); }
    std::uint32_t mkGlobally(std::uint32_t c) { return c == trueId ? trueId : intern({Kind::Globally, -1, {c}}); }

    std::uint32_t mkUntil(std::uint32_t a, std::uint32_t b) {
        if (b == falseId) return falseId;
        if (a == trueId) return mkEventually(b);
        if (a == falseId) return mkAnd({b, nonEmptyId});
        return intern({Kind::Until, -1, {a, b}});
    }

    std::uint32_t mkRelease(std::uint32_t a, std::uint32_t b) {
        if (b == trueId) return trueId;
        if (a == falseId) return mkGlobally(b);
        if (a == trueId) return mkOr({b, emptyId});
        return intern({Kind::Release, -1, {a, b}});
    }

    std::vector<Node> nodes;
    std::map<Node, std::uint32_t> index;
    std::unordered_map<std::uint64_t, std::uint32_t> progCache;
    std::unordered_map<std::uint32_t, std::uint32_t> canonCache;
    std::uint32_t trueId = 0, falseId = 0, nonEmptyId = 0, emptyId = 0;
};

}  // namespace

Dfa::Dfa(PropositionSet propositions, std::size_t states, std::uint32_t initial, std::vector<std::uint32_t> transitions, std::vector<bool> accepting)
    : ap(std::move(propositions)), init(initial), table(std::move(transitions)), accept(std::move(accepting)) {
    if (accept.size() != states) throw ModelError("ltlf", "accepting vector size does not match state count");
    if (states == 0 || init >= states) throw ModelError("ltlf", "initial state out of range");
    if (table.size() != states * symbolCount()) throw ModelError("ltlf", "transition table size does not match states x symbols");
    for (auto t : table) {
        if (t >= states) throw ModelError("ltlf", "transition target out of range");
    }
    computeSinks();
}

void Dfa::computeSinks() {
    std::size_t const n = stateCount();
    std::vector<std::vector<std::uint32_t>> preds(n);
    for (std::uint32_t s = 0; s < n; ++s) {
        for (Symbol a = 0; a < symbolCount(); ++a) preds[successor(s, a)].push_back(s);
    }
    std::vector<bool> live(accept);
    std::deque<std::uint32_t> queue;
    for (std::uint32_t s = 0; s < n; ++s) {
        if (live[s]) queue.push_back(s);
    }
    while (!queue.empty()) {
        auto const s = queue.front();
        queue.pop_front();
        for (auto p : preds[s]) {
            if (!live[p]) {
                live[p] = true;
                queue.push_back(p);
            }
        }
    }
    sink.assign(n, false);
    for (std::size_t s = 0; s < n; ++s) sink[s] = !live[s];
}

std::uint32_t Dfa::run(Trace const& trace) const { return run(init, trace); }

std::uint32_t Dfa::run(std::uint32_t from, Trace const& trace) const {
    std::uint32_t s = from;
    for (auto a : trace) {
        if (a >= symbolCount()) throw ModelError("ltlf", "symbol outside alphabet");
        s = successor(s, a);
    }
    return s;
}

nlohmann::json Dfa::toJson() const {
    nlohmann::json j;
    j["propositions"] = ap.names();
    j["states"] = stateCount();
    j["initial"] = init;
    std::vector<std::uint32_t> acc;
    std::vector<std::uint32_t> sinks;
    for (std::uint32_t s = 0; s < stateCount(); ++s) {
        if (accept[s]) acc.push_back(s);
        if (sink[s]) sinks.push_back(s);
    }
    j["accepting"] = acc;
    j["sinks"] = sinks;
    auto& trans = j["transitions"] = nlohmann::json::array();
    for (std::uint32_t s = 0; s < stateCount(); ++s) {
        nlohmann::json row = nlohmann::json::object();
        for (Symbol a = 0; a < symbolCount(); ++a) row[std::to_string(a)] = successor(s, a);
        trans.push_back(std::move(row));
    }
    if (!stateLabels.empty()) j["labels"] = stateLabels;
    return j;
}

Dfa Dfa::fromJson(nlohmann::json const& j) {
    try {
        PropositionSet ap(j.at("propositions").get<std::vector<std::string>>());
        auto const n = j.at("states").get<std::size_t>();
        std::vector<bool> acc(n, false);
        for (auto s : j.at("accepting").get<std::vector<std::uint32_t>>()) {
            if (s >= n) throw ModelError("ltlf", "accepting state out of range");
            acc[s] = true;
        }
        auto const& trans = j.at("transitions");
        if (trans.size() != n) throw ModelError("ltlf", "transition rows do not match state count");
        std::vector<std::uint32_t> table(n * ap.symbolCount());
        for (std::size_t s = 0; s < n; ++s) {
            for (Symbol a = 0; a < ap.symbolCount(); ++a) table[s * ap.symbolCount() + a] = trans[s].at(std::to_string(a)).get<std::uint32_t>();
        }
        Dfa dfa(ap, n, j.at("initial").get<std::uint32_t>(), std::move(table), std::move(acc));
        if (j.contains("labels")) dfa.stateLabels = j["labels"].get<std::vector<std::string>>();
        return dfa;
    } catch (nlohmann::json::exception const& e) {
        throw ModelError("ltlf", std::string("malformed automaton JSON: ") + e.what());
    }
}

Dfa toDfa(Formula const& f, PropositionSet const& ap, std::size_t maxStates) {
    if (f.maxAtom() >= static_cast<int>(ap.size())) throw ModelError("ltlf", "formula references a proposition outside the set");
    Store store;
    std::uint32_t const root = store.canonical(store.fromFormula(f, false));
    std::unordered_map<std::uint32_t, std::uint32_t> stateOf{{root, 0}};
    std::vector<std::uint32_t> formulas{root};
    std::vector<std::uint32_t> table;
    Symbol const symbols = ap.symbolCount();
    for (std::size_t s = 0; s < formulas.size(); ++s) {
        for (Symbol a = 0; a < symbols; ++a) {
            auto const next = store.canonical(store.progress(formulas[s], a));
            auto [it, inserted] = stateOf.try_emplace(next, static_cast<std::uint32_t>(formulas.size()));
            if (inserted) {
                if (formulas.size() >= maxStates) {
                    throw CapacityError("ltlf", "automaton exceeds the limit of " + std::to_string(maxStates) + " states");
                }
                formulas.push_back(next);
            }
            table.push_back(it->second);
        }
    }
    std::vector<bool> accepting;
    std::vector<std::string> labels;
    for (auto id : formulas) {
        accepting.push_back(store.acceptsEmpty(id));
        labels.push_back(store.toString(id, ap));
    }
    Dfa dfa(ap, formulas.size(), 0, std::move(table), std::move(accepting));
    dfa.stateLabels = std::move(labels);
    return dfa;
}

std::vector<std::uint32_t> dfaDistance(Dfa const& dfa) {
    std::size_t const n = dfa.stateCount();
    std::vector<std::vector<std::uint32_t>> preds(n);
    for (std::uint32_t s = 0; s < n; ++s) {
        for (Symbol a = 0; a < dfa.symbolCount(); ++a) preds[dfa.successor(s, a)].push_back(s);
    }
    std::vector<std::uint32_t> dist(n, unreachableDistance);
    std::deque<std::uint32_t> queue;
    for (std::uint32_t s = 0; s < n; ++s) {
        if (dfa.isAccepting(s)) {
            dist[s] = 0;
            queue.push_back(s);
        }
    }
    while (!queue.empty()) {
        auto const s = queue.front();
        queue.pop_front();
        for (auto p : preds[s]) {
            if (dist[p] == unreachableDistance) {
                dist[p] = dist[s] + 1;
                queue.push_back(p);
            }
        }
    }
    return dist;
}

}  // namespace gpimdp::ltlf
