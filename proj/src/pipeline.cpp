#include "gpimdp/pipeline.h"

#include <chrono>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gpimdp/errors.h"
#include "gpimdp/io.h"
#include "gpimdp/rng.h"

namespace gpimdp {

sim::Plant makePlant(Config const& config) {
    auto const& sys = config.system;
    if (sys.plant == "tabulated") {
        if (!config.dataset.path) throw ConfigError("a tabulated plant needs 'dataset.path'");
        return sim::Plant::tabulated(io::readDataset(*config.dataset.path, sys.dimension, sys.actions), sys.noise);
    }
    sim::Plant const bm = sim::Plant::benchmark();
    if (sys.dimension != bm.stateDimension() || sys.actions != bm.actionCount()) {
        throw ConfigError("the benchmark plant has dimension " + std::to_string(bm.stateDimension()) + " and " + std::to_string(bm.actionCount()) +
                          " actions");
    }
    return sim::Plant(bm.name(), bm.stateDimension(), bm.actionCount(), [bm](Vector const& x, int u) { return bm.mean(x, u); }, sys.noise);
}

gp::Dataset loadDataset(Config const& config, sim::Plant const* plant) {
    if (config.dataset.path) return io::readDataset(*config.dataset.path, config.system.dimension, config.system.actions);
    if (!plant) throw ConfigError("no dataset path and no plant to sample from");
    return sim::sampleDataset(*plant, config.dataset.samplesPerAction, config.system.bounds, config.dataset.seed);
}

ltlf::Dfa compileSpecification(Config const& config, ltlf::PropositionSet const& ap) {
    return ltlf::toDfa(ltlf::parse(config.formula, ap), ap, config.maxDfaStates);
}

OfflineResult runOffline(Config const& config, gp::Dataset data) {
    auto const t0 = std::chrono::steady_clock::now();
    OfflineResult r;
    r.data = std::move(data);
    r.models = gp::fitAll(r.data, config.kernels, config.targetMode, config.bounds);
    r.partition = abstraction::buildPartition(config.system.bounds, config.cells, config.regions, config.maxCells);
    r.dfa = compileSpecification(config, r.partition.propositions());
    auto imdp = abstraction::buildImdp(r.partition, r.models, config.system.noise, config.grid);
    imdp.validate();
    r.pimdp = product(std::move(imdp), r.dfa);
    r.values = synthesis::synthesize(r.pimdp, config.solver);
    r.distances = pimdpDistance(r.pimdp, EdgeSet::Nominal);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

nlohmann::json manifest(Config const& config, OfflineResult const& result, bool recordTiming) {
    double maxLower = 0.0;
    double maxUpper = 0.0;
    for (std::size_t s = 0; s < result.pimdp.stateCount(); ++s) {
        if (result.pimdp.isAccepting(s)) continue;
        maxLower = std::max(maxLower, result.values.lower[s]);
        maxUpper = std::max(maxUpper, result.values.upper[s]);
    }
    nlohmann::json j{{"config_hash", config.hash},
                     {"dataset_seed", config.dataset.seed},
                     {"benchmark_seed", config.benchmark.seed},
                     {"rng", std::string(Philox::algorithm)},
                     {"formula", config.formula},
                     {"dataset_size", result.data.size()},
                     {"cells", result.partition.cellCount()},
                     {"imdp_states", result.pimdp.imdp().stateCount()},
                     {"actions", result.pimdp.actionCount()},
                     {"dfa_states", result.dfa.stateCount()},
                     {"product_states", result.pimdp.stateCount()},
                     {"synthesis",
                      {{"iterations", result.values.iterations},
                       {"residual", result.values.residual},
                       {"converged", result.values.converged},
                       {"tolerance", config.solver.tolerance}}},
                     {"max_lower_bound", maxLower},
                     {"max_upper_bound", maxUpper}};
    if (recordTiming) j["seconds"] = result.seconds;
    return j;
}

nlohmann::json provenance(Config const& config) {
    return {{"config_hash", config.hash},
            {"dataset_seed", config.dataset.seed},
            {"benchmark_seed", config.benchmark.seed},
            {"rng", std::string(Philox::algorithm)}};
}

std::string provenanceComment(Config const& config) {
    return "# config_hash=" + config.hash + " dataset_seed=" + std::to_string(config.dataset.seed) +
           " benchmark_seed=" + std::to_string(config.benchmark.seed) + " rng=" + std::string(Philox::algorithm) + "\n";
}

void writeOfflineArtifacts(std::filesystem::path const& dir, Config const& config, OfflineResult const& result) {
    auto stamped = [&](nlohmann::json j) {
        j["provenance"] = provenance(config);
        return j;
    };
    io::writeJson(dir / "imdp.json", stamped(result.pimdp.imdp().toJson()));
    io::writeJson(dir / "pimdp.json", stamped(result.pimdp.toJson()));
    io::writeJson(dir / "dfa.json", stamped(result.dfa.toJson()));
    std::ostringstream strategy;
    strategy << provenanceComment(config);
    io::writeStrategy(strategy, result.pimdp, result.values);
    io::writeText(dir / "strategy.csv", strategy.str());
    io::writeJson(dir / "manifest.json", manifest(config, result, config.online.recordTiming));
}

online::Controller makeController(Config const& config, OfflineResult const& result) {
    return {&result.partition, config.system.noise, config.grid, config.kernels, config.bounds, config.targetMode, &result.models};
}

online::EpisodeModel initialEpisode(Config const& config, OfflineResult const& result) {
    online::EpisodeModel m;
    m.pimdp = result.pimdp;
    m.values = synthesis::satisfactionIntervals(result.pimdp, result.values.strategy, config.online.solver);
    m.distances = result.distances;
    m.data = result.data;
    return m;
}

}  // namespace gpimdp
