#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "gpimdp/abstraction.h"
#include "gpimdp/config.h"
#include "gpimdp/control.h"
#include "gpimdp/dfa.h"
#include "gpimdp/gp.h"
#include "gpimdp/imdp.h"
#include "gpimdp/plant.h"
#include "gpimdp/synthesis.h"

namespace gpimdp {

/// Everything the offline stage produces.
struct OfflineResult {
    gp::Dataset data;
    gp::ModelSet models;
    abstraction::Partition partition;
    ltlf::Dfa dfa;
    Pimdp pimdp;
    synthesis::ValueResult values;
    /// Hop distances over nominal edges, used by the progression metric.
    std::vector<std::uint32_t> distances;
    double seconds = 0.0;
};

/// Ground-truth plant described by the configuration.
sim::Plant makePlant(Config const& config);

/// Loads the configured dataset, or samples one from the plant.
gp::Dataset loadDataset(Config const& config, sim::Plant const* plant);

ltlf::Dfa compileSpecification(Config const& config, ltlf::PropositionSet const& ap);

OfflineResult runOffline(Config const& config, gp::Dataset data);

/// Configuration hash, seeds and generator name stamped on every output file.
nlohmann::json provenance(Config const& config);
/// provenance() as a single "# key=value ..." comment line for CSV outputs.
std::string provenanceComment(Config const& config);

/// Summary of an offline run: configuration hash, sizes, solver residual.
nlohmann::json manifest(Config const& config, OfflineResult const& result, bool recordTiming);

/// Writes imdp.json, pimdp.json, dfa.json, strategy.csv and manifest.json.
void writeOfflineArtifacts(std::filesystem::path const& dir, Config const& config, OfflineResult const& result);

/// Controller view of an offline result (borrows from `result`).
online::Controller makeController(Config const& config, OfflineResult const& result);

/// Episode state starting from the offline strategy, with its intervals
/// recomputed at the online solver tolerance.
online::EpisodeModel initialEpisode(Config const& config, OfflineResult const& result);

}  // namespace gpimdp
