#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "gpimdp/ltlf.h"

namespace gpimdp::ltlf {

inline constexpr std::uint32_t unreachableDistance = std::numeric_limits<std::uint32_t>::max();

/// Complete deterministic automaton over the dense alphabet 2^AP.
class Dfa {
   public:
    Dfa() = default;
    Dfa(PropositionSet ap, std::size_t states, std::uint32_t initial, std::vector<std::uint32_t> transitions, std::vector<bool> accepting);

    PropositionSet const& propositions() const { return ap; }
    std::size_t stateCount() const { return accept.size(); }
    std::uint32_t symbolCount() const { return ap.symbolCount(); }
    std::uint32_t initialState() const { return init; }
    std::uint32_t successor(std::uint32_t state, Symbol symbol) const { return table[state * symbolCount() + symbol]; }
    bool isAccepting(std::uint32_t state) const { return accept[state]; }
    /// States from which no accepting state is reachable.
    bool isSink(std::uint32_t state) const { return sink[state]; }

    std::uint32_t run(Trace const& trace) const;
    std::uint32_t run(std::uint32_t from, Trace const& trace) const;
    bool accepts(Trace const& trace) const { return isAccepting(run(trace)); }

    /// Human-readable formula resident in each state (empty when loaded from JSON).
    std::vector<std::string> stateLabels;

    nlohmann::json toJson() const;
    static Dfa fromJson(nlohmann::json const& j);

   private:
    void computeSinks();

    PropositionSet ap;
    std::uint32_t init = 0;
    std::vector<std::uint32_t> table;
    std::vector<bool> accept;
    std::vector<bool> sink;
};

/// Compiles a formula by progression over canonical formulas. Throws
/// CapacityError when more than `maxStates` states would be created.
Dfa toDfa(Formula const& f, PropositionSet const& ap, std::size_t maxStates = 100000);

/// Hop distance from each state to the accepting set; sinks get unreachableDistance.
std::vector<std::uint32_t> dfaDistance(Dfa const& dfa);

}  // namespace gpimdp::ltlf
