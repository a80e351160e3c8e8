#include "gpimdp/control.h"

#include <chrono>
#include <cmath>

#include <nlohmann/json.hpp>

#include "gpimdp/errors.h"

namespace gpimdp::online {

std::string toString(GpMode m) {
    switch (m) {
        case GpMode::GlobalStatic:
            return "global-static";
        case GpMode::LocalStatic:
            return "local-static";
        case GpMode::LocalUpdate:
            return "local-update";
    }
    return {};
}

std::string toString(Metrics m) {
    switch (m) {
        case Metrics::Offline:
            return "offline";
        case Metrics::Sink:
            return "sink";
        case Metrics::SinkProg:
            return "sink+prog";
    }
    return {};
}

std::string toString(Outcome o) {
    switch (o) {
        case Outcome::Satisfied:
            return "satisfied";
        case Outcome::Violated:
            return "violated";
        case Outcome::Timeout:
            return "timeout";
        case Outcome::Aborted:
            return "aborted";
    }
    return {};
}

GpMode parseGpMode(std::string const& s) {
    for (auto m : {GpMode::GlobalStatic, GpMode::LocalStatic, GpMode::LocalUpdate}) {
        if (toString(m) == s) return m;
    }
    throw ConfigError("unknown mode '" + s + "' (expected global-static, local-static or local-update)");
}

Metrics parseMetrics(std::string const& s) {
    for (auto m : {Metrics::Offline, Metrics::Sink, Metrics::SinkProg}) {
        if (toString(m) == s) return m;
    }
    throw ConfigError("unknown metrics '" + s + "' (expected offline, sink or sink+prog)");
}

std::vector<nlohmann::json> RunRecord::toJsonLines() const {
    std::vector<nlohmann::json> lines;
    for (auto const& st : steps) {
        nlohmann::json j{{"type", "step"}, {"step", st.step}, {"x", st.x}, {"action", st.action}, {"dfa_state", st.dfaState}, {"accepted_updates", st.acceptedUpdates}};
        auto& sc = j["scores"] = nlohmann::json::array();
        for (auto const& s : st.scores) {
            sc.push_back({{"action", s.action},
                          {"lower", s.lower},
                          {"upper", s.upper},
                          {"sink_risk", s.sinkRisk},
                          {"distance", std::isinf(s.distance) ? nlohmann::json(nullptr) : nlohmann::json(s.distance)}});
        }
        if (st.seconds > 0.0) j["seconds"] = st.seconds;
        lines.push_back(std::move(j));
    }
    nlohmann::json summary{{"type", "summary"},
                           {"outcome", toString(outcome)},
                           {"steps", steps.size()},
                           {"final_state", states.empty() ? nlohmann::json(nullptr) : nlohmann::json(states.back())},
                           {"final_dfa_state", dfaStates.empty() ? nlohmann::json(nullptr) : nlohmann::json(dfaStates.back())},
                           {"attempted_updates", attemptedUpdates},
                           {"accepted_updates", acceptedUpdates},
                           {"rejected_updates", rejectedUpdates},
                           {"resyntheses", resyntheses},
                           {"reverted_actions", revertedActions},
                           {"nesting_violations", nestingViolations},
                           {"non_nested_updates", nonNestedUpdates}};
    if (!abortReason.empty()) summary["abort_reason"] = abortReason;
    if (totalSeconds > 0.0) summary["seconds"] = totalSeconds;
    lines.push_back(std::move(summary));
    return lines;
}

namespace {

using Clock = std::chrono::steady_clock;

double secondsSince(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

gp::ModelSet stepModels(Controller const& ctl, EpisodeModel const& model, Vector const& x, OnlineConfig const& config) {
    if (config.mode == GpMode::GlobalStatic) {
        if (!ctl.globalModels) throw ModelError("online", "global-static mode needs offline models");
        return *ctl.globalModels;
    }
    gp::ModelSet models;
    for (int a = 0; a < model.data.actionCount(); ++a) {
        auto const i = static_cast<std::size_t>(a);
        auto const& bound = ctl.bounds.empty() ? gp::BoundParams{} : ctl.bounds[i];
        if (config.globalRefit) {
            models.push_back(gp::fitAction(model.data, a, ctl.kernels.at(i), ctl.targetMode, bound));
        } else {
            models.push_back(gp::localGp(model.data, x, a, config.localCount, ctl.kernels.at(i), ctl.targetMode, bound));
        }
    }
    return models;
}

std::size_t countNestingBreaks(synthesis::ValueResult const& fresh, synthesis::ValueResult const& previous, double slack) {
    std::size_t n = 0;
    for (std::size_t s = 0; s < fresh.lower.size(); ++s) {
        if (fresh.lower[s] < previous.lower[s] - slack || fresh.upper[s] > previous.upper[s] + slack) ++n;
    }
    return n;
}

}  // namespace

RunRecord controlLoop(Controller const& ctl, EpisodeModel& model, sim::Plant const& plant, Vector const& x0, OnlineConfig const& config, Philox& rng) {
    if (!ctl.partition) throw ModelError("online", "controller has no partition");
    abstraction::Partition const& partition = *ctl.partition;
    ltlf::Dfa const& dfa = model.pimdp.dfa();
    auto const runStart = Clock::now();

    RunRecord rec;
    Vector x = x0;
    int cell = partition.locate(x);
    std::uint32_t z = cell == partition.outsideId() ? dfa.initialState() : dfa.successor(dfa.initialState(), partition.cell(cell).label);
    rec.states.push_back(x);
    rec.dfaStates.push_back(z);

    SelectionOptions const selection{config.metrics != Metrics::Offline, config.metrics == Metrics::SinkProg, config.tieTolerance};
    std::size_t const acceptedBefore = model.log.accepted.size();
    std::size_t const attemptedBefore = model.log.attempted;
    std::size_t const rejectedBefore = model.log.rejected;
    bool const refining = config.mode == GpMode::LocalUpdate && config.metrics != Metrics::Offline;
    std::size_t pendingUpdates = 0;
    auto resynthesizeNow = [&] {
        std::size_t reverted = 0;
        auto fresh = resynthesize(model.pimdp, model.values, config.solver, config.nestingSlack, &reverted);
        rec.nestingViolations += countNestingBreaks(fresh, model.values, config.nestingSlack);
        model.values = std::move(fresh);
        model.distances = pimdpDistance(model.pimdp, EdgeSet::Nominal);
        rec.revertedActions += reverted;
        ++rec.resyntheses;
    };

    for (std::size_t t = 0;; ++t) {
        if (cell == partition.outsideId() || dfa.isSink(z)) {
            rec.outcome = Outcome::Violated;
            break;
        }
        if (dfa.isAccepting(z)) {
            rec.outcome = Outcome::Satisfied;
            break;
        }
        if (t >= config.stepBound) {
            rec.outcome = Outcome::Timeout;
            break;
        }
        auto const stepStart = Clock::now();
        StepRecord step;
        step.step = t;
        step.x = x;
        step.dfaState = z;

        std::uint32_t const s = model.pimdp.index(static_cast<std::uint32_t>(cell), z);
        if (config.metrics == Metrics::Offline) {
            if (s == noState || model.values.strategy.at(s) < 0) {
                rec.outcome = Outcome::Aborted;
                rec.abortReason = "no offline action for cell " + std::to_string(cell) + ", automaton state " + std::to_string(z);
                break;
            }
            step.action = model.values.strategy[s];
        } else {
            auto const models = stepModels(ctl, model, x, config);
            auto const aug = augment(x, z, models, partition, model.pimdp, ctl.noise, ctl.grid);
            auto sel = selectAction(aug, model.pimdp, model.values, model.distances, selection);
            step.action = sel.action;
            step.scores = std::move(sel.scores);
            if (refining) {
                auto const neighbours = partition.neighbourhood(cell, config.neighbourhoodRadius);
                step.acceptedUpdates = refineTransitions(model.pimdp.mutableImdp(), partition, models[static_cast<std::size_t>(step.action)], neighbours,
                                                         ctl.noise, ctl.grid, model.log, t);
            }
        }

        Vector next = plant.step(x, step.action, rng);
        if (refining) model.data.add({x, step.action, next});
        z = dfa.successor(z, partition.cell(cell).label);
        x = std::move(next);
        cell = partition.locate(x);

        pendingUpdates += step.acceptedUpdates;
        if (refining && config.resynthesisEvery > 0 && pendingUpdates >= config.resynthesisEvery) {
            resynthesizeNow();
            pendingUpdates = 0;
        }

        if (config.recordTiming) step.seconds = secondsSince(stepStart);
        rec.actions.push_back(step.action);
        rec.steps.push_back(std::move(step));
        rec.states.push_back(x);
        rec.dfaStates.push_back(z);
    }

    if (pendingUpdates > 0) resynthesizeNow();

    rec.attemptedUpdates = model.log.attempted - attemptedBefore;
    rec.acceptedUpdates = model.log.accepted.size() - acceptedBefore;
    rec.rejectedUpdates = model.log.rejected - rejectedBefore;
    for (std::size_t i = acceptedBefore; i < model.log.accepted.size(); ++i) {
        auto const& r = model.log.accepted[i];
        if (r.after.lower < r.before.lower || r.after.upper > r.before.upper) ++rec.nonNestedUpdates;
    }
    if (config.recordTiming) rec.totalSeconds = secondsSince(runStart);
    return rec;
}

}  // namespace gpimdp::online
