#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "gpimdp/abstraction.h"
#include "gpimdp/gp.h"
#include "gpimdp/imdp.h"
#include "gpimdp/online.h"
#include "gpimdp/plant.h"
#include "gpimdp/rng.h"
#include "gpimdp/synthesis.h"

namespace gpimdp::online {

enum class GpMode {
    /// Offline models for every prediction; no refinement.
    GlobalStatic,
    /// Local GPs on the initial dataset; no refinement.
    LocalStatic,
    /// Local GPs on the growing dataset, transition refinement and re-synthesis.
    LocalUpdate,
};

enum class Metrics {
    /// Follow the offline strategy on the containing cell.
    Offline,
    /// Online selection with the sink tier only.
    Sink,
    /// Online selection with the sink and progression tiers.
    SinkProg,
};

std::string toString(GpMode m);
std::string toString(Metrics m);
GpMode parseGpMode(std::string const& s);
Metrics parseMetrics(std::string const& s);

struct OnlineConfig {
    std::size_t localCount = 75;
    /// Accepted transition updates between strategy re-syntheses; one more runs when the episode ends.
    std::size_t resynthesisEvery = 50;
    int neighbourhoodRadius = 1;
    std::size_t stepBound = 500;
    GpMode mode = GpMode::LocalUpdate;
    Metrics metrics = Metrics::SinkProg;
    double tieTolerance = 1e-6;
    synthesis::SolverOptions solver{1e-12, 100000, 1e-9};
    double nestingSlack = 1e-9;
    /// Wall-clock per step is recorded only when set (it breaks byte-identical output).
    bool recordTiming = false;
    /// Refit full-dataset GPs every step instead of local ones (timing baseline).
    bool globalRefit = false;
};

/// Everything the offline stage hands to the online loop.
struct Controller {
    abstraction::Partition const* partition = nullptr;
    abstraction::NoiseModel noise;
    abstraction::BoundsGrid grid;
    std::vector<gp::KernelParams> kernels;
    std::vector<gp::BoundParams> bounds;
    gp::TargetMode targetMode = gp::TargetMode::Full;
    gp::ModelSet const* globalModels = nullptr;
};

enum class Outcome { Satisfied, Violated, Timeout, Aborted };
std::string toString(Outcome o);

struct StepRecord {
    std::size_t step = 0;
    Vector x;
    int action = -1;
    std::uint32_t dfaState = 0;
    std::vector<ActionScore> scores;
    std::size_t acceptedUpdates = 0;
    double seconds = 0.0;
};

struct RunRecord {
    std::vector<Vector> states;
    std::vector<int> actions;
    std::vector<std::uint32_t> dfaStates;
    std::vector<StepRecord> steps;
    Outcome outcome = Outcome::Timeout;
    std::string abortReason;
    std::size_t attemptedUpdates = 0;
    std::size_t acceptedUpdates = 0;
    std::size_t rejectedUpdates = 0;
    std::size_t resyntheses = 0;
    std::size_t revertedActions = 0;
    /// Nesting violations seen at re-synthesis (states x re-syntheses).
    std::size_t nestingViolations = 0;
    /// Accepted updates that were not nested in the interval they replaced.
    std::size_t nonNestedUpdates = 0;
    double totalSeconds = 0.0;

    /// One JSON object per step.
    std::vector<nlohmann::json> toJsonLines() const;
};

/// Mutable state carried by a local-update episode.
struct EpisodeModel {
    Pimdp pimdp;
    synthesis::ValueResult values;
    std::vector<std::uint32_t> distances;
    gp::Dataset data;
    RefinementLog log;
};

/// Runs one episode of the online loop from x0 until the DFA accepts, a
/// violation (sink or Outside), or the step bound.
RunRecord controlLoop(Controller const& ctl, EpisodeModel& model, sim::Plant const& plant, Vector const& x0, OnlineConfig const& config,
                      Philox& rng);

}  // namespace gpimdp::online
