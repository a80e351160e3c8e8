#include "gpimdp/montecarlo.h"

#include <ostream>

#include <nlohmann/json.hpp>

#include "gpimdp/errors.h"
#include "gpimdp/io.h"

namespace gpimdp {

MonteCarloOptions monteCarloOptions(Config const& config) {
    MonteCarloOptions o;
    o.runs = config.benchmark.runs;
    o.starts = config.benchmark.starts;
    o.metrics = config.benchmark.metrics;
    o.modes = config.benchmark.modes;
    o.seed = config.benchmark.seed;
    o.online = config.online;
    return o;
}

std::uint64_t episodeSubstream(std::size_t start, std::size_t run, std::size_t runs) { return static_cast<std::uint64_t>(start) * runs + run; }

std::vector<StatsRow> monteCarlo(Config const& config, OfflineResult const& offline, sim::Plant const& plant, MonteCarloOptions const& options,
                                 std::ostream* runLog) {
    if (options.starts.empty()) throw ConfigError("no start states given ('benchmark.starts')");
    online::Controller const ctl = makeController(config, offline);
    online::EpisodeModel const base = initialEpisode(config, offline);

    std::vector<StatsRow> rows;
    for (std::size_t si = 0; si < options.starts.size(); ++si) {
        Vector const& x0 = options.starts[si];
        int const cell = offline.partition.locate(x0);
        std::uint32_t const s0 = cell == offline.partition.outsideId() ? noState : base.pimdp.initialState(static_cast<std::uint32_t>(cell));
        for (auto metric : options.metrics) {
            for (auto mode : options.modes) {
                // The offline strategy does not use GP predictions; one mode suffices.
                if (metric == online::Metrics::Offline && mode != options.modes.front()) continue;
                online::OnlineConfig cfg = options.online;
                cfg.metrics = metric;
                cfg.mode = metric == online::Metrics::Offline ? online::GpMode::GlobalStatic : mode;

                StatsRow row;
                row.start = si;
                row.x0 = x0;
                row.metric = metric;
                row.mode = cfg.mode;
                row.runs = options.runs;
                if (s0 != noState) {
                    row.offlineLower = base.values.lower[s0];
                    row.offlineUpper = base.values.upper[s0];
                }
                std::size_t satisfied = 0, violated = 0, timeout = 0, aborted = 0, steps = 0, attempted = 0, accepted = 0;
                double seconds = 0.0;
                for (std::size_t r = 0; r < options.runs; ++r) {
                    online::EpisodeModel model = base;
                    Philox rng(options.seed, episodeSubstream(si, r, options.runs));
                    auto const rec = online::controlLoop(ctl, model, plant, x0, cfg, rng);
                    switch (rec.outcome) {
                        case online::Outcome::Satisfied:
                            ++satisfied;
                            break;
                        case online::Outcome::Violated:
                            ++violated;
                            break;
                        case online::Outcome::Timeout:
                            ++timeout;
                            break;
                        case online::Outcome::Aborted:
                            ++aborted;
                            break;
                    }
                    steps += rec.steps.size();
                    attempted += rec.attemptedUpdates;
                    accepted += rec.acceptedUpdates;
                    row.nestingViolations += rec.nestingViolations;
                    row.nonNestedUpdates += rec.nonNestedUpdates;
                    for (auto const& st : rec.steps) seconds += st.seconds;
                    if (runLog) {
                        nlohmann::json header{{"type", "episode"},         {"start", si}, {"x0", x0}, {"metric", online::toString(metric)},
                                              {"mode", online::toString(cfg.mode)}, {"run", r},   {"seed", options.seed},
                                              {"substream", episodeSubstream(si, r, options.runs)}};
                        *runLog << header.dump() << "\n";
                        for (auto const& line : rec.toJsonLines()) *runLog << line.dump() << "\n";
                    }
                }
                double const n = static_cast<double>(options.runs);
                row.pSatisfy = static_cast<double>(satisfied) / n;
                row.pViolate = static_cast<double>(violated) / n;
                row.pTimeout = static_cast<double>(timeout) / n;
                row.pAborted = static_cast<double>(aborted) / n;
                row.meanSteps = static_cast<double>(steps) / n;
                row.meanAttempted = static_cast<double>(attempted) / n;
                row.meanAccepted = static_cast<double>(accepted) / n;
                row.meanStepSeconds = steps > 0 ? seconds / static_cast<double>(steps) : 0.0;
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

void writeStats(std::ostream& out, std::vector<StatsRow> const& rows, bool withTiming) {
    out << "start,x0,metric,mode,runs,p_violate,p_satisfy,p_timeout,p_aborted,mean_steps,mean_attempted_updates,mean_accepted_updates,"
           "nesting_violations,offline_lower,offline_upper";
    if (withTiming) out << ",mean_step_seconds";
    out << "\n";
    for (auto const& r : rows) {
        std::string x0;
        for (double v : r.x0) x0 += (x0.empty() ? "" : " ") + io::formatNumber(v);
        out << r.start << "," << x0 << "," << online::toString(r.metric) << "," << online::toString(r.mode) << "," << r.runs << ","
            << io::formatNumber(r.pViolate) << "," << io::formatNumber(r.pSatisfy) << "," << io::formatNumber(r.pTimeout) << ","
            << io::formatNumber(r.pAborted) << "," << io::formatNumber(r.meanSteps) << "," << io::formatNumber(r.meanAttempted) << ","
            << io::formatNumber(r.meanAccepted) << "," << r.nestingViolations << "," << io::formatNumber(r.offlineLower) << ","
            << io::formatNumber(r.offlineUpper);
        if (withTiming) out << "," << io::formatNumber(r.meanStepSeconds);
        out << "\n";
    }
}

}  // namespace gpimdp
