#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace gpimdp::ltlf {

/// Set of atomic propositions. Index in the list is the bit used in symbols.
class PropositionSet {
   public:
    static constexpr std::size_t maxSize = 16;

    PropositionSet() = default;
    explicit PropositionSet(std::vector<std::string> names);

    std::size_t size() const { return propNames.size(); }
    std::string const& name(std::size_t index) const { return propNames.at(index); }
    std::vector<std::string> const& names() const { return propNames; }
    /// Index of `name`, or -1.
    int find(std::string_view name) const;
    std::uint32_t symbolCount() const { return 1u << propNames.size(); }

    bool operator==(PropositionSet const&) const = default;

   private:
    std::vector<std::string> propNames;
};

/// A symbol is a subset of AP encoded as a bitmask.
using Symbol = std::uint32_t;
using Trace = std::vector<Symbol>;

enum class Op : std::uint8_t { True, False, Atom, Not, And, Or, Next, WeakNext, Until, Release, Eventually, Globally };

class Formula;

struct FormulaNode {
    Op op;
    int atom = -1;
    std::shared_ptr<FormulaNode const> lhs;
    std::shared_ptr<FormulaNode const> rhs;
};

/// Immutable LTLf syntax tree. Derived operators (F, G, R, WX) are kept as
/// their own nodes; the DFA construction expands them on demand.
class Formula {
   public:
    Formula() : Formula(makeTrue()) {}

    static Formula makeTrue();
    static Formula makeFalse();
    static Formula atom(int index);
    static Formula negation(Formula const& f);
    static Formula conjunction(Formula const& a, Formula const& b);
    static Formula disjunction(Formula const& a, Formula const& b);
    static Formula next(Formula const& f);
    static Formula weakNext(Formula const& f);
    static Formula until(Formula const& a, Formula const& b);
    static Formula release(Formula const& a, Formula const& b);
    static Formula eventually(Formula const& f);
    static Formula globally(Formula const& f);

    Op op() const { return node->op; }
    int atomIndex() const { return node->atom; }
    Formula left() const { return Formula(node->lhs); }
    Formula right() const { return Formula(node->rhs); }

    /// Highest atom index referenced, or -1.
    int maxAtom() const;
    std::string toString(PropositionSet const& ap) const;

    friend bool operator==(Formula const& a, Formula const& b);

   private:
    explicit Formula(std::shared_ptr<FormulaNode const> n) : node(std::move(n)) {}
    static Formula make(Op op, int atom, std::shared_ptr<FormulaNode const> lhs, std::shared_ptr<FormulaNode const> rhs);

    std::shared_ptr<FormulaNode const> node;
};

/// Parses the ASCII grammar
///   true | false | <ident> | ! f | X f | WX f | F f | G f | f U f | f R f | f & f | f | f | ( f )
/// Precedence: unary > U,R (right associative) > & > | ; & and | associate left.
/// Throws ParseError on bad tokens, arity or unknown propositions.
Formula parse(std::string_view text, PropositionSet const& ap);

/// rho, i |= f with the finite-trace semantics. Positions i == |rho| denote
/// the empty suffix: atoms, X, U and F are false there; WX, R and G are true.
bool evaluate(Formula const& f, Trace const& trace, std::size_t position = 0);

}  // namespace gpimdp::ltlf
