#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gpimdp/imdp.h"

namespace gpimdp::synthesis {

enum class Extremum { Minimize, Maximize };

/// Extremal expected value of `values` over all distributions p with
/// lower <= p <= upper and sum(p) = 1. Order-based greedy: destinations
/// sorted by value (ascending to minimize, descending to maximize, ties by
/// index) receive their upper bound until the lower bounds of the rest pin
/// the remaining mass. Throws ModelError when the row is infeasible.
double extremalExpectation(std::span<double const> values, std::span<double const> lower, std::span<double const> upper, Extremum mode);

/// Extremal distribution attaining extremalExpectation.
std::vector<double> extremalDistribution(std::span<double const> values, std::span<double const> lower, std::span<double const> upper,
                                         Extremum mode);

/// Values of every destination of a row, with the destinations presorted by value.
struct DestinationValues {
    std::span<double const> values;
    /// Destination ids by value ascending, ties by id ascending.
    std::span<std::uint32_t const> ascending;
    /// Destination ids by value descending, ties by id ascending.
    std::span<std::uint32_t const> descending;
};

/// Same as extremalExpectation for a compressed Row over values.size() destinations.
double extremalExpectation(Row const& row, DestinationValues const& dest, Extremum mode);

/// Sorts destinations of a value vector for DestinationValues.
void sortDestinations(std::span<double const> values, std::vector<std::uint32_t>& ascending, std::vector<std::uint32_t>& descending);

struct SolverOptions {
    double tolerance = 1e-6;
    std::size_t maxIterations = 10000;
    /// Scores closer than this are treated as equal when picking actions.
    double tieTolerance = 1e-9;
};

enum class Mode { Pessimistic, Optimistic };

struct ReachValues {
    std::vector<double> values;
    /// Argmax action per state; -1 on accepting and violating states.
    std::vector<int> strategy;
    std::size_t iterations = 0;
    double residual = 0.0;
    bool converged = false;
};

/// Jacobi value iteration for max_u ext_adversary P[reach S_F], starting from
/// 1 on S_F and 0 elsewhere. Pessimistic uses the minimizing adversary.
/// Ties in the argmax go to the lowest action id.
ReachValues robustReach(Pimdp const& p, Mode mode, SolverOptions const& options = {});

/// Satisfaction intervals and strategy.
struct ValueResult {
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<int> strategy;
    std::size_t iterations = 0;
    double residual = 0.0;
    bool converged = false;
};

/// Fixed-strategy interval evaluation: lower under the minimizing adversary,
/// upper under the maximizing one. `strategy` entries on accepting and
/// violating states are ignored. `initialLower`, when given, must be a
/// sub-solution of the lower iteration (e.g. a previous lower bound for the
/// same strategy on a looser model); iteration then starts from it.
ValueResult satisfactionIntervals(Pimdp const& p, std::vector<int> const& strategy, SolverOptions const& options = {},
                                  std::vector<double> const* initialLower = nullptr);

/// Robust strategy maximizing the pessimistic value; ties prefer the higher
/// optimistic value, then the lowest action id. Returns the strategy with
/// its satisfaction intervals.
ValueResult synthesize(Pimdp const& p, SolverOptions const& options = {});

/// Q-value of (s, action) under `values` and the given adversary.
double actionValue(Pimdp const& p, std::size_t s, std::size_t action, std::vector<double> const& values, Extremum mode);

}  // namespace gpimdp::synthesis

namespace gpimdp::synthesis {

/// Per-DFA-layer views of a product value vector: for each DFA state z,
/// the value of (q, z) for every cell q (0 for pruned pairs) and the sort
/// orders used by the greedy adversary.
class LayeredValues {
   public:
    LayeredValues(Pimdp const& p, std::vector<double> const& values);

    DestinationValues layer(std::uint32_t dfaState) const;

   private:
    std::size_t cells = 0;
    std::vector<double> dense;
    std::vector<std::uint32_t> asc;
    std::vector<std::uint32_t> desc;
};

}  // namespace gpimdp::synthesis
