#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "gpimdp/box.h"
#include "gpimdp/dfa.h"
#include "gpimdp/ltlf.h"

namespace gpimdp {

struct Entry {
    std::uint32_t dest = 0;
    double lower = 0.0;
    double upper = 0.0;
    /// The destination is hit by the nominal (noise- and error-free) image,
    /// as opposed to being bounded only by tail probabilities.
    bool nominal = false;
};

/// Interval transition row. Destinations listed in `entries` (sorted by
/// dest) carry their own bounds; every other destination has [0, tailUpper].
struct Row {
    std::vector<Entry> entries;
    double tailUpper = 0.0;

    /// Interval of `dest`.
    Entry at(std::uint32_t dest) const;
    Entry const* find(std::uint32_t dest) const;
    double lowerSum() const;
    /// Sum of upper bounds over a universe of `destinations` states.
    double upperSum(std::size_t destinations) const;
    /// Interval row conditions within `slack`: 0 <= lower <= upper <= 1,
    /// sum of lowers <= 1 <= sum of uppers.
    bool wellFormed(std::size_t destinations, double slack = 1e-9) const;
    /// Expands to one interval per destination.
    std::vector<Entry> dense(std::size_t destinations) const;
    /// Compresses a dense row, using the most common [0, u] bound as tail.
    static Row fromDense(std::vector<Entry> const& dense);
};

/// Interval MDP. Every action is available in every state; rows are indexed
/// by (state, action).
class Imdp {
   public:
    Imdp() = default;
    Imdp(std::size_t states, std::size_t actions, ltlf::PropositionSet ap);

    std::size_t stateCount() const { return numStates; }
    std::size_t actionCount() const { return numActions; }
    ltlf::PropositionSet const& propositions() const { return ap; }

    Row const& row(std::size_t state, std::size_t action) const { return rows[state * numActions + action]; }
    void setRow(std::size_t state, std::size_t action, Row r) { rows[state * numActions + action] = std::move(r); }

    ltlf::Symbol label(std::size_t state) const { return labels[state]; }
    void setLabel(std::size_t state, ltlf::Symbol l) { labels[state] = l; }
    /// Optional Outside state (always absorbing, violating in the product).
    std::optional<std::size_t> outsideState() const { return outside; }
    void setOutsideState(std::size_t s) { outside = s; }
    /// Geometry for export; empty boxes for states without one.
    std::vector<Box> boxes;

    /// Throws ModelError naming the first row that is not a valid interval row.
    void validate(double slack = 1e-9) const;

    nlohmann::json toJson() const;
    static Imdp fromJson(nlohmann::json const& j);

   private:
    std::size_t numStates = 0;
    std::size_t numActions = 0;
    ltlf::PropositionSet ap;
    std::vector<Row> rows;
    std::vector<ltlf::Symbol> labels;
    std::optional<std::size_t> outside;
};

inline constexpr std::uint32_t noState = static_cast<std::uint32_t>(-1);

/// Product of an IMDP with a DFA. Rows are shared with the IMDP: state
/// (q, z) under action u moves to (q', delta(z, L(q))) with the bounds of
/// IMDP row (q, u), so refining the IMDP refines the product.
class Pimdp {
   public:
    struct State {
        std::uint32_t cell;
        std::uint32_t dfa;
    };

    Pimdp() = default;

    Imdp const& imdp() const { return abstraction; }
    /// Single-writer access for online refinement.
    Imdp& mutableImdp() { return abstraction; }
    ltlf::Dfa const& dfa() const { return automaton; }

    std::size_t stateCount() const { return states.size(); }
    std::size_t actionCount() const { return abstraction.actionCount(); }
    State state(std::size_t s) const { return states[s]; }
    /// Product index of (cell, dfa state) or noState when pruned.
    std::uint32_t index(std::uint32_t cell, std::uint32_t dfaState) const;
    /// Initial product state for a start cell: (q, delta(z0, L(q))).
    std::uint32_t initialState(std::uint32_t cell) const;

    bool isAccepting(std::size_t s) const { return accepting[s]; }
    /// Outside states and states whose DFA component is a sink.
    bool isViolating(std::size_t s) const { return violating[s]; }
    /// Violating, or every transition out of it enters a DFA sink.
    bool isDoomed(std::size_t s) const;
    /// DFA component shared by all successors of s.
    std::uint32_t successorDfaState(std::size_t s) const;
    std::uint32_t successorDfaState(std::uint32_t dfaState, ltlf::Symbol label) const { return automaton.successor(dfaState, label); }

    Row const& row(std::size_t s, std::size_t action) const { return abstraction.row(states[s].cell, action); }

    nlohmann::json toJson() const;

    friend Pimdp product(Imdp imdp, ltlf::Dfa dfa, bool prune);

   private:
    Imdp abstraction;
    ltlf::Dfa automaton;
    std::vector<State> states;
    std::vector<std::uint32_t> lookup;
    std::vector<bool> accepting;
    std::vector<bool> violating;
};

/// Product with the automaton (state labels are read on departure). With `prune`, only states reachable from the initial
/// set over upper > 0 edges are kept. Throws ModelError when the IMDP and
/// DFA disagree on the proposition set.
Pimdp product(Imdp imdp, ltlf::Dfa dfa, bool prune = true);

enum class EdgeSet {
    /// Every edge with a positive upper bound.
    Possible,
    /// Only edges hit by the nominal image.
    Nominal,
};

/// Backward BFS hop distance to the accepting set; unreachableDistance for
/// states that cannot reach it (including violating states).
std::vector<std::uint32_t> pimdpDistance(Pimdp const& p, EdgeSet edges = EdgeSet::Possible);

}  // namespace gpimdp
