#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gpimdp/config.h"
#include "gpimdp/control.h"
#include "gpimdp/pipeline.h"
#include "gpimdp/plant.h"

namespace gpimdp {

/// Aggregate over the episodes of one (start, metric, mode) combination.
struct StatsRow {
    std::size_t start = 0;
    Vector x0;
    online::Metrics metric = online::Metrics::Offline;
    online::GpMode mode = online::GpMode::GlobalStatic;
    std::size_t runs = 0;
    double pViolate = 0.0;
    double pSatisfy = 0.0;
    double pTimeout = 0.0;
    double pAborted = 0.0;
    double meanSteps = 0.0;
    /// Mean wall-clock seconds per step; only filled when timing is recorded.
    double meanStepSeconds = 0.0;
    double meanAttempted = 0.0;
    double meanAccepted = 0.0;
    std::size_t nestingViolations = 0;
    std::size_t nonNestedUpdates = 0;
    /// Lower / upper satisfaction bound of the offline strategy at the start state.
    double offlineLower = 0.0;
    double offlineUpper = 0.0;
};

struct MonteCarloOptions {
    std::size_t runs = 200;
    std::vector<Vector> starts;
    std::vector<online::Metrics> metrics;
    std::vector<online::GpMode> modes;
    std::uint64_t seed = 1;
    online::OnlineConfig online;
};

MonteCarloOptions monteCarloOptions(Config const& config);

/// Episode seed stream: all (metric, mode) combinations of a start share the
/// noise sequence of run r, so comparisons use common random numbers.
std::uint64_t episodeSubstream(std::size_t start, std::size_t run, std::size_t runs);

/// Runs every (start, metric, mode, run) episode. The offline metric ignores
/// the GP mode and runs once per start. Local-update episodes each start
/// from a fresh copy of the offline model. When `runLog` is given, every
/// RunRecord is appended as JSON lines prefixed by an episode header.
std::vector<StatsRow> monteCarlo(Config const& config, OfflineResult const& offline, sim::Plant const& plant, MonteCarloOptions const& options,
                                 std::ostream* runLog = nullptr);

void writeStats(std::ostream& out, std::vector<StatsRow> const& rows, bool withTiming);

}  // namespace gpimdp
