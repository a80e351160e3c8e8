#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "gpimdp/abstraction.h"
#include "gpimdp/gp.h"
#include "gpimdp/imdp.h"
#include "gpimdp/synthesis.h"

namespace gpimdp::online {

/// Product state built around the exact continuous state x: one row per
/// action towards the cells, all sharing the DFA successor delta(z, L(x)).
struct AugmentedState {
    Vector x;
    std::uint32_t dfaState = 0;
    std::uint32_t successorDfa = 0;
    std::vector<Row> rows;
    std::vector<abstraction::RowChoice> choices;
};

/// Rows from the singleton {x}: the image is the exact mean
/// prediction and epsilon uses the posterior std at x.
/// Throws ModelError when x is outside the partition domain.
AugmentedState augment(Vector const& x, std::uint32_t dfaState, gp::ModelSet const& models, abstraction::Partition const& partition,
                       Pimdp const& pimdp, abstraction::NoiseModel const& noise, abstraction::BoundsGrid const& grid);

struct ActionScore {
    int action = 0;
    /// Worst-case expected lower satisfaction bound.
    double lower = 0.0;
    /// Worst-case expected upper satisfaction bound.
    double upper = 0.0;
    /// Worst-case probability of entering a doomed product state.
    double sinkRisk = 0.0;
    /// Worst-case expected nominal hop distance; infinity when a nominal
    /// successor cannot reach the accepting set.
    double distance = 0.0;
};

struct SelectionOptions {
    bool useSinkMetric = true;
    bool useProgressMetric = true;
    double tieTolerance = 1e-6;
};

struct Selection {
    int action = 0;
    std::vector<ActionScore> scores;
};

std::vector<ActionScore> scoreActions(AugmentedState const& a, Pimdp const& pimdp, synthesis::ValueResult const& values,
                                      std::vector<std::uint32_t> const& distances);

/// Lexicographic choice: max lower, max upper, min sink risk, min distance,
/// lowest id. Scores within tieTolerance tie.
Selection selectAction(AugmentedState const& a, Pimdp const& pimdp, synthesis::ValueResult const& values,
                       std::vector<std::uint32_t> const& distances, SelectionOptions const& options = {});

/// Applies the lexicographic rule to precomputed scores.
int chooseAction(std::vector<ActionScore> const& scores, SelectionOptions const& options = {});

struct RefinementRecord {
    std::uint32_t source;
    std::uint32_t action;
    std::uint32_t dest;
    abstraction::TransitionInterval before;
    abstraction::TransitionInterval after;
    std::size_t step;
};

struct RefinementLog {
    std::vector<RefinementRecord> accepted;
    /// Recomputed (source, action, destination) intervals, changed or not.
    std::size_t attempted = 0;
    /// Destinations whose candidate interval was not nested in the current one.
    std::size_t rejected = 0;
    /// Rows whose merged bounds would break the row sum conditions.
    std::size_t rejectedRows = 0;
};

/// Recomputes the rows of (q, action) for q in `neighbourhood` with the
/// given models and keeps, per destination, the new interval only if it is
/// nested in the current one. Returns the number of accepted updates.
std::size_t refineTransitions(Imdp& imdp, abstraction::Partition const& partition, gp::ActionModel const& model,
                              std::vector<int> const& neighbourhood, abstraction::NoiseModel const& noise,
                              abstraction::BoundsGrid const& grid, RefinementLog& log, std::size_t step);

/// Strategy update that keeps every state's interval nested in the previous
/// one: the fresh robust strategy is adopted except where it would widen an
/// interval, in which case the previous action is restored.
synthesis::ValueResult resynthesize(Pimdp const& p, synthesis::ValueResult const& previous, synthesis::SolverOptions const& options,
                                    double slack = 1e-9, std::size_t* reverted = nullptr);

}  // namespace gpimdp::online
