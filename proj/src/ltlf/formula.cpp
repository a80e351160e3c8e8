#include "gpimdp/ltlf.h"

#include <algorithm>

#include "gpimdp/errors.h"

namespace gpimdp::ltlf {

PropositionSet::PropositionSet(std::vector<std::string> names) : propNames(std::move(names)) {
    if (propNames.size() > maxSize) {
        throw CapacityError("ltlf", "at most " + std::to_string(maxSize) + " propositions are supported, got " + std::to_string(propNames.size()));
    }
    for (std::size_t i = 0; i < propNames.size(); ++i) {
        if (propNames[i].empty()) throw ModelError("ltlf", "empty proposition name");
        for (std::size_t j = 0; j < i; ++j) {
            if (propNames[i] == propNames[j]) throw ModelError("ltlf", "duplicate proposition '" + propNames[i] + "'");
        }
    }
}

int PropositionSet::find(std::string_view name) const {
    for (std::size_t i = 0; i < propNames.size(); ++i) {
        if (propNames[i] == name) return static_cast<int>(i);
    }
    return -1;
}

Formula Formula::make(Op op, int atom, std::shared_ptr<FormulaNode const> lhs, std::shared_ptr<FormulaNode const> rhs) {
    return Formula(std::make_shared<FormulaNode const>(FormulaNode{op, atom, std::move(lhs), std::move(rhs)}));
}

Formula Formula::makeTrue() { return make(Op::True, -1, nullptr, nullptr); }
Formula Formula::makeFalse() { return make(Op::False, -1, nullptr, nullptr); }
Formula Formula::atom(int index) { return make(Op::Atom, index, nullptr, nullptr); }
Formula Formula::negation(Formula const& f) { return make(Op::Not, -1, f.node, nullptr); }
Formula Formula::conjunction(Formula const& a, Formula const& b) { return make(Op::And, -1, a.node, b.node); }
Formula Formula::disjunction(Formula const& a, Formula const& b) { return make(Op::Or, -1, a.node, b.node); }
Formula Formula::next(Formula const& f) { return make(Op::Next, -1, f.node, nullptr); }
Formula Formula::weakNext(Formula const& f) { return make(Op::WeakNext, -1, f.node, nullptr); }
Formula Formula::until(Formula const& a, Formula const& b) { return make(Op::Until, -1, a.node, b.node); }
Formula Formula::release(Formula const& a, Formula const& b) { return make(Op::Release, -1, a.node, b.node); }
Formula Formula::eventually(Formula const& f) { return make(Op::Eventually, -1, f.node, nullptr); }
Formula Formula::globally(Formula const& f) { return make(Op::Globally, -1, f.node, nullptr); }

int Formula::maxAtom() const {
    int m = node->op == Op::Atom ? node->atom : -1;
    if (node->lhs) m = std::max(m, left().maxAtom());
    if (node->rhs) m = std::max(m, right().maxAtom());
    return m;
}

namespace {

bool sameNode(FormulaNode const* a, FormulaNode const* b) {
    if (a == b) return true;
    if (!a || !b) return false;
    return a->op == b->op && a->atom == b->atom && sameNode(a->lhs.get(), b->lhs.get()) && sameNode(a->rhs.get(), b->rhs.get());
}

}  // namespace

bool operator==(Formula const& a, Formula const& b) { return sameNode(a.node.get(), b.node.get()); }

std::string Formula::toString(PropositionSet const& ap) const {
    auto unary = [&](char const* op) { return std::string(op) + "(" + left().toString(ap) + ")"; };
    auto binary = [&](char const* op) { return "(" + left().toString(ap) + " " + op + " " + right().toString(ap) + ")"; };
    switch (op()) {
        case Op::True:
            return "true";
        case Op::False:
            return "false";
        case Op::Atom:
            return atomIndex() < static_cast<int>(ap.size()) ? ap.name(static_cast<std::size_t>(atomIndex())) : "p" + std::to_string(atomIndex());
        case Op::Not:
            return "!" + std::string(left().op() == Op::Atom ? left().toString(ap) : "(" + left().toString(ap) + ")");
        case Op::And:
            return binary("&");
        case Op::Or:
            return binary("|");
        case Op::Next:
            return unary("X");
        case Op::WeakNext:
            return unary("WX");
        case Op::Until:
            return binary("U");
        case Op::Release:
            return binary("R");
        case Op::Eventually:
            return unary("F");
        case Op::Globally:
            return unary("G");
    }
    return {};
}

namespace {

// Truth value of f at every position 0..n of the trace (n = empty suffix).
std::vector<char> evaluateAll(Formula const& f, Trace const& trace) {
    std::size_t const n = trace.size();
    std::vector<char> sat(n + 1, 0);
    switch (f.op()) {
        case Op::True:
            std::fill(sat.begin(), sat.end(), 1);
            break;
        case Op::False:
            break;
        case Op::Atom:
            for (std::size_t i = 0; i < n; ++i) sat[i] = (trace[i] >> f.atomIndex()) & 1u;
            break;
        case Op::Not: {
            auto const a = evaluateAll(f.left(), trace);
            for (std::size_t i = 0; i <= n; ++i) sat[i] = !a[i];
            break;
        }
        case Op::And:
        case Op::Or: {
            auto const a = evaluateAll(f.left(), trace);
            auto const b = evaluateAll(f.right(), trace);
            for (std::size_t i = 0; i <= n; ++i) sat[i] = f.op() == Op::And ? (a[i] && b[i]) : (a[i] || b[i]);
            break;
        }
        case Op::Next:
        case Op::WeakNext: {
            auto const a = evaluateAll(f.left(), trace);
            bool const weak = f.op() == Op::WeakNext;
            for (std::size_t i = 0; i < n; ++i) sat[i] = i + 1 < n ? a[i + 1] : weak;
            sat[n] = weak;
            break;
        }
        case Op::Until:
        case Op::Release: {
            auto const a = evaluateAll(f.left(), trace);
            auto const b = evaluateAll(f.right(), trace);
            bool const release = f.op() == Op::Release;
            sat[n] = release;
            for (std::size_t i = n; i-- > 0;) {
                sat[i] = release ? (b[i] && (a[i] || sat[i + 1])) : (b[i] || (a[i] && sat[i + 1]));
            }
            break;
        }
        case Op::Eventually:
        case Op::Globally: {
            auto const a = evaluateAll(f.left(), trace);
            bool const globally = f.op() == Op::Globally;
            sat[n] = globally;
            for (std::size_t i = n; i-- > 0;) sat[i] = globally ? (a[i] && sat[i + 1]) : (a[i] || sat[i + 1]);
            break;
        }
    }
    return sat;
}

}  // namespace

bool evaluate(Formula const& f, Trace const& trace, std::size_t position) {
    if (position > trace.size()) throw ModelError("ltlf", "position beyond end of trace");
    return evaluateAll(f, trace)[position] != 0;
}

}  // namespace gpimdp::ltlf
