// Acceptance checks. Prints one PASS/FAIL line per criterion (also written to
// ./acceptance_artifacts/summary.txt) and exits non-zero if any criterion
// fails. Artifacts of the stochastic criteria are written to
// ./acceptance_artifacts/run{1,2} and compared byte for byte.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fixtures.h"
#include "gpimdp/control.h"
#include "gpimdp/dfa.h"
#include "gpimdp/gp.h"
#include "gpimdp/io.h"
#include "gpimdp/ltlf.h"
#include "gpimdp/montecarlo.h"
#include "gpimdp/pipeline.h"
#include "gpimdp/plant.h"
#include "gpimdp/rng.h"
#include "gpimdp/synthesis.h"
#include "oracles.h"

using namespace gpimdp;
namespace fs = std::filesystem;

namespace {

struct Result {
    bool pass = false;
    std::string detail;
    /// Deterministic output compared across reruns.
    std::string artifact;
};

using Clock = std::chrono::steady_clock;

double secondsSince(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

Result dfaEquivalence() {
    auto const t0 = Clock::now();
    std::size_t mismatches = 0;
    std::size_t checked = 0;
    ltlf::PropositionSet const abc({"a", "b", "c"});
    auto const traces = oracle::allTraces(abc.symbolCount(), 6);
    auto check = [&](std::string const& text, ltlf::PropositionSet const& ap, std::vector<ltlf::Trace> const& all) {
        auto const f = ltlf::parse(text, ap);
        auto const dfa = ltlf::toDfa(f, ap);
        for (auto const& t : all) {
            ++checked;
            if (dfa.accepts(t) != oracle::holds(f, t)) ++mismatches;
        }
    };
    auto const corpus = oracle::formulaCorpus();
    for (auto const& text : corpus) check(text, abc, traces);
    ltlf::PropositionSet const regions({"O", "D1", "D2"});
    check(fixture::benchmarkConfig().formula, regions, traces);
    double const seconds = secondsSince(t0);
    Result r;
    r.pass = corpus.size() + 1 >= 20 && mismatches == 0 && seconds < 120.0;
    r.detail = std::to_string(corpus.size() + 1) + " formulas, " + std::to_string(checked) + " trace checks, " + std::to_string(mismatches) +
               " mismatches, " + fmt(seconds, 3) + " s";
    return r;
}

Result gpNumerics() {
    auto const t0 = Clock::now();
    Philox rng(202);
    double worstMean = 0.0;
    double worstVar = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        int const n = 1 + static_cast<int>(rng.nextU32() % 3);
        int const m = 1 + static_cast<int>(rng.nextU32() % 50);
        Eigen::MatrixXd X(m, n);
        Eigen::VectorXd y(m);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < n; ++j) X(i, j) = rng.uniform(-2.0, 2.0);
            y(i) = std::sin(X(i, 0)) + 0.1 * rng.normal();
        }
        gp::KernelParams params;
        for (int j = 0; j < n; ++j) params.lengthscales.push_back(rng.uniform(0.3, 2.0));
        params.signalVariance = rng.uniform(0.1, 2.0);
        params.noiseVariance = rng.uniform(1e-3, 0.1);
        auto const model = gp::GpModel::fit(X, y, params);
        for (int k = 0; k < 10; ++k) {
            Vector x(static_cast<std::size_t>(n));
            for (auto& v : x) v = rng.uniform(-2.5, 2.5);
            auto const got = model.posterior(x);
            auto const want = oracle::directPosterior(X, y, params, x);
            worstMean = std::max(worstMean, std::abs(got.mean - want.mean));
            worstVar = std::max(worstVar, std::abs(got.std * got.std - std::max(want.variance, gp::varianceFloor)));
        }
    }
    double const seconds = secondsSince(t0);
    Result r;
    r.pass = worstMean <= 1e-8 && worstVar <= 1e-8 && seconds < 60.0;
    r.detail = "100 datasets, max |mean error| " + fmt(worstMean) + ", max |variance error| " + fmt(worstVar) + ", " + fmt(seconds, 3) + " s";
    return r;
}

Result adversaryExtremization() {
    auto const t0 = Clock::now();
    Philox rng(303);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::size_t const k = 1 + rng.nextU32() % 6;
        auto const [lo, hi] = oracle::randomFeasibleRow(rng, k);
        std::vector<double> values(k);
        for (auto& v : values) v = rng.uniform();
        for (auto mode : {synthesis::Extremum::Minimize, synthesis::Extremum::Maximize}) {
            double const got = synthesis::extremalExpectation(values, lo, hi, mode);
            double const want = oracle::vertexExtremum(values, lo, hi, mode == synthesis::Extremum::Maximize);
            worst = std::max(worst, std::abs(got - want));
        }
    }
    double const seconds = secondsSince(t0);
    Result r;
    r.pass = worst <= 1e-9 && seconds < 60.0;
    r.detail = "1000 rows, both adversaries, max error " + fmt(worst) + ", " + fmt(seconds, 3) + " s";
    return r;
}

Result valueIteration() {
    Philox rng(404);
    synthesis::SolverOptions const tight{1e-13, 100000, 1e-9};
    double worst = 0.0;
    std::size_t monotoneBreaks = 0;
    std::size_t orderBreaks = 0;
    std::size_t largest = 0;
    for (int trial = 0; trial < 50; ++trial) {
        auto const p = oracle::randomProduct(rng, 3 + rng.nextU32() % 13);
        largest = std::max(largest, p.stateCount());
        auto const lower = synthesis::robustReach(p, synthesis::Mode::Pessimistic, tight);
        auto const upper = synthesis::robustReach(p, synthesis::Mode::Optimistic, tight);
        auto const wantLower = oracle::bruteForceReach(p, false);
        auto const wantUpper = oracle::bruteForceReach(p, true);
        for (std::size_t s = 0; s < p.stateCount(); ++s) {
            worst = std::max({worst, std::abs(lower.values[s] - wantLower[s]), std::abs(upper.values[s] - wantUpper[s])});
            if (lower.values[s] > upper.values[s] + 1e-12) ++orderBreaks;
        }
        for (auto mode : {synthesis::Mode::Pessimistic, synthesis::Mode::Optimistic}) {
            std::vector<double> previous(p.stateCount(), 0.0);
            for (std::size_t k = 1; k <= 40; ++k) {
                auto const it = synthesis::robustReach(p, mode, {0.0, k, 1e-9});
                for (std::size_t s = 0; s < p.stateCount(); ++s) {
                    if (it.values[s] < previous[s] - 1e-12) ++monotoneBreaks;
                }
                previous = it.values;
            }
        }
    }
    Result r;
    r.pass = worst <= 1e-6 && monotoneBreaks == 0 && orderBreaks == 0 && largest <= 30;
    r.detail = "50 products (<= " + std::to_string(largest) + " states), max error " + fmt(worst) + ", " + std::to_string(monotoneBreaks) +
               " non-monotone iterates, " + std::to_string(orderBreaks) + " lower > upper";
    return r;
}

Result abstractionSoundness() {
    auto const t0 = Clock::now();
    auto const& cfg = fixture::benchmarkConfig();
    auto const& off = fixture::benchmarkOffline();
    auto const plant = makePlant(cfg);
    auto const& imdp = off.pimdp.imdp();
    std::size_t const n = imdp.stateCount();
    double const maxDelta = *std::max_element(cfg.grid.deltas.begin(), cfg.grid.deltas.end());
    double const deltaTotal = 1.0 - std::pow(1.0 - maxDelta, static_cast<double>(cfg.system.dimension));
    int const draws = 10000;

    Philox pick(505);
    std::ostringstream art;
    std::size_t considered = 0;
    std::size_t inside = 0;
    double worstPairFraction = 1.0;
    for (int pair = 0; pair < 50; ++pair) {
        auto const q = static_cast<int>(pick.nextU32() % off.partition.cellCount());
        auto const u = static_cast<int>(pick.nextU32() % static_cast<std::uint32_t>(cfg.system.actions));
        Box const& box = off.partition.cell(q).box;
        Vector x(box.lower.size());
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = pick.uniform(box.lower[i], box.upper[i]);
        Philox noise(506, static_cast<std::uint64_t>(pair));
        std::vector<double> freq(n, 0.0);
        for (int k = 0; k < draws; ++k) freq[static_cast<std::size_t>(off.partition.locate(plant.step(x, u, noise)))] += 1.0;
        auto const row = imdp.row(static_cast<std::size_t>(q), static_cast<std::size_t>(u)).dense(n);
        std::size_t pairConsidered = 0;
        std::size_t pairInside = 0;
        art << "pair " << q << " " << u;
        for (std::size_t d = 0; d < n; ++d) {
            double const f = freq[d] / draws;
            if (f == 0.0 && row[d].lower == 0.0) continue;
            double const se = std::sqrt(std::max(f, 1.0 / draws) * (1.0 - f) / draws);
            bool const ok = f >= row[d].lower - 3.0 * se && f <= row[d].upper + 3.0 * se;
            ++pairConsidered;
            pairInside += ok ? 1 : 0;
            art << " " << d << ":" << io::formatNumber(f) << "[" << io::formatNumber(row[d].lower) << "," << io::formatNumber(row[d].upper) << "]";
        }
        art << "\n";
        considered += pairConsidered;
        inside += pairInside;
        worstPairFraction = std::min(worstPairFraction, static_cast<double>(pairInside) / static_cast<double>(pairConsidered));
    }
    double const seconds = secondsSince(t0);
    double const fraction = static_cast<double>(inside) / static_cast<double>(considered);
    Result r;
    r.pass = worstPairFraction >= 1.0 - deltaTotal && seconds < 900.0;
    r.detail = "50 pairs, " + std::to_string(inside) + "/" + std::to_string(considered) + " destinations inside (" + fmt(fraction) +
               "), worst pair " + fmt(worstPairFraction) + ", required >= " + fmt(1.0 - deltaTotal) + ", " + fmt(seconds, 3) + " s";
    r.artifact = art.str();
    return r;
}

Result nesting() {
    auto const& cfg = fixture::benchmarkConfig();
    auto const& off = fixture::benchmarkOffline();
    auto const plant = makePlant(cfg);
    auto const ctl = makeController(cfg, off);
    online::OnlineConfig oc = cfg.online;
    oc.mode = online::GpMode::LocalUpdate;
    oc.metrics = online::Metrics::SinkProg;
    std::size_t resyntheses = 0;
    std::size_t reported = 0;
    std::size_t audited = 0;
    std::size_t updates = 0;
    std::ostringstream art;
    for (std::size_t run = 0; run < 20; ++run) {
        auto model = initialEpisode(cfg, off);
        auto const initial = model.values;
        Philox rng(606, run);
        auto const& x0 = cfg.benchmark.starts[run % cfg.benchmark.starts.size()];
        auto const rec = online::controlLoop(ctl, model, plant, x0, oc, rng);
        resyntheses += rec.resyntheses;
        reported += rec.nestingViolations + rec.nonNestedUpdates;
        // Independent audit: each accepted update is a sub-interval, and
        // (nesting being transitive) the final intervals sit inside the initial ones.
        for (auto const& u : model.log.accepted) {
            ++updates;
            if (u.after.lower < u.before.lower || u.after.upper > u.before.upper) ++audited;
        }
        for (std::size_t s = 0; s < initial.lower.size(); ++s) {
            if (model.values.lower[s] < initial.lower[s] - oc.nestingSlack || model.values.upper[s] > initial.upper[s] + oc.nestingSlack) ++audited;
        }
        for (auto const& line : rec.toJsonLines()) art << line.dump() << "\n";
    }
    Result r;
    r.pass = reported == 0 && audited == 0 && resyntheses > 0;
    r.detail = "20 episodes, " + std::to_string(resyntheses) + " re-syntheses, " + std::to_string(updates) + " accepted updates, " +
               std::to_string(reported + audited) + " violations";
    r.artifact = art.str();
    return r;
}

Result directionOfEffect() {
    auto const& cfg = fixture::benchmarkConfig();
    auto const& off = fixture::benchmarkOffline();
    auto const plant = makePlant(cfg);
    auto opts = monteCarloOptions(cfg);
    opts.runs = std::max<std::size_t>(opts.runs, 200);
    opts.metrics = {online::Metrics::Offline, online::Metrics::SinkProg};
    opts.modes = {online::GpMode::LocalUpdate};
    auto const rows = monteCarlo(cfg, off, plant, opts);
    bool pass = opts.starts.size() >= 2;
    std::ostringstream detail;
    for (std::size_t si = 0; si < opts.starts.size(); ++si) {
        StatsRow const* offline = nullptr;
        StatsRow const* onlineRow = nullptr;
        for (auto const& row : rows) {
            if (row.start != si) continue;
            if (row.metric == online::Metrics::Offline) offline = &row;
            if (row.metric == online::Metrics::SinkProg && row.mode == online::GpMode::LocalUpdate) onlineRow = &row;
        }
        if (!offline || !onlineRow) return {false, "missing rows for start " + std::to_string(si), ""};
        bool const ok = offline->offlineLower == 0.0 && onlineRow->pSatisfy > offline->pSatisfy && onlineRow->pViolate <= offline->pViolate;
        pass = pass && ok;
        detail << (si ? "; " : "") << "start " << si << " (offline lower " << fmt(offline->offlineLower) << "): offline sat/viol " << fmt(offline->pSatisfy)
               << "/" << fmt(offline->pViolate) << ", online sat/viol " << fmt(onlineRow->pSatisfy) << "/" << fmt(onlineRow->pViolate);
    }
    std::ostringstream art;
    writeStats(art, rows, false);
    return {pass, std::to_string(opts.runs) + " runs per configuration; " + detail.str(), art.str()};
}

Result localSpeedup() {
    auto const& cfg = fixture::benchmarkConfig();
    auto const& off = fixture::benchmarkOffline();
    auto const plant = makePlant(cfg);
    auto const ctl = makeController(cfg, off);
    std::size_t const perAction = 1000;
    auto const big = sim::sampleDataset(plant, perAction, cfg.system.bounds, 808);

    std::ostringstream art;
    auto measure = [&](bool globalRefit) {
        online::OnlineConfig oc = cfg.online;
        oc.mode = online::GpMode::LocalUpdate;
        oc.metrics = online::Metrics::SinkProg;
        oc.recordTiming = true;
        oc.globalRefit = globalRefit;
        double seconds = 0.0;
        std::size_t steps = 0;
        for (std::size_t run = 0; steps < 100; ++run) {
            auto model = initialEpisode(cfg, off);
            model.data = big;
            oc.stepBound = 100 - steps;
            Philox rng(809, run);
            auto const rec = online::controlLoop(ctl, model, plant, cfg.benchmark.starts[run % cfg.benchmark.starts.size()], oc, rng);
            for (auto const& st : rec.steps) seconds += st.seconds;
            steps += rec.steps.size();
            art << (globalRefit ? "global" : "local") << " run " << run << " actions";
            for (int a : rec.actions) art << " " << a;
            art << " outcome " << online::toString(rec.outcome) << "\n";
            if (rec.steps.empty()) break;
        }
        return std::make_pair(seconds / static_cast<double>(std::max<std::size_t>(steps, 1)), steps);
    };
    auto const [local, localSteps] = measure(false);
    auto const [global, globalSteps] = measure(true);
    double const ratio = global / local;
    Result r;
    r.pass = localSteps >= 100 && globalSteps >= 100 && ratio >= 10.0;
    r.detail = "m = " + std::to_string(perAction) + "/action, " + std::to_string(localSteps) + " steps each: local " + fmt(local * 1e3) + " ms/step, full refit " +
               fmt(global * 1e3) + " ms/step, ratio " + fmt(ratio, 3);
    r.artifact = art.str();
    return r;
}

void writeArtifact(fs::path const& dir, std::string const& name, std::string const& content) {
    fs::create_directories(dir);
    std::ofstream out(dir / name, std::ios::binary);
    out << content;
}

Result run(std::function<Result()> const& f) {
    try {
        return f();
    } catch (std::exception const& e) {
        return {false, std::string("exception: ") + e.what(), ""};
    }
}

}  // namespace

int main() {
    fs::path const artifacts = fs::current_path() / "acceptance_artifacts";
    std::vector<std::pair<std::string, std::function<Result()>>> const criteria{
        {"LTLf/DFA oracle equivalence", dfaEquivalence},
        {"GP posterior against direct inversion", gpNumerics},
        {"adversary extremization against vertex enumeration", adversaryExtremization},
        {"value iteration against brute-force enumeration", valueIteration},
        {"abstraction soundness (Monte Carlo)", abstractionSoundness},
        {"interval nesting under online updates", nesting},
        {"online sink+prog local-update versus offline", directionOfEffect},
        {"local GP per-step speedup", localSpeedup},
    };

    fs::create_directories(artifacts);
    std::ofstream summary(artifacts / "summary.txt");
    auto report = [&](std::string const& line) {
        std::cout << line << std::endl;
        summary << line << std::endl;
    };

    bool allPass = true;
    std::vector<std::string> firstRun(criteria.size());
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        auto const t0 = Clock::now();
        auto const r = run(criteria[i].second);
        allPass = allPass && r.pass;
        firstRun[i] = r.artifact;
        if (!r.artifact.empty()) writeArtifact(artifacts / "run1", "criterion" + std::to_string(i + 1) + ".txt", r.artifact);
        report("CRITERION " + std::to_string(i + 1) + " " + (r.pass ? "PASS" : "FAIL") + ": " + criteria[i].first + ": " + r.detail + " [" +
               fmt(secondsSince(t0), 3) + " s]");
    }

    // Determinism: rerun the stochastic criteria with the same seeds.
    auto const t0 = Clock::now();
    std::size_t identical = 0;
    std::size_t compared = 0;
    std::string differing;
    for (std::size_t i = 4; i < criteria.size(); ++i) {
        auto const r = run(criteria[i].second);
        writeArtifact(artifacts / "run2", "criterion" + std::to_string(i + 1) + ".txt", r.artifact);
        ++compared;
        if (!firstRun[i].empty() && r.artifact == firstRun[i]) {
            ++identical;
        } else {
            differing += " " + std::to_string(i + 1);
        }
    }
    bool const deterministic = identical == compared;
    allPass = allPass && deterministic;
    report("CRITERION 9 " + std::string(deterministic ? "PASS" : "FAIL") + ": determinism: " + std::to_string(identical) + "/" +
           std::to_string(compared) + " artifacts of criteria 5-8 byte-identical on rerun" + (differing.empty() ? "" : ", differing:" + differing) +
           " [" + fmt(secondsSince(t0), 3) + " s]");
    return allPass ? 0 : 1;
}
