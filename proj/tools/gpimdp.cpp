#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gpimdp/config.h"
#include "gpimdp/errors.h"
#include "gpimdp/io.h"
#include "gpimdp/montecarlo.h"
#include "gpimdp/pipeline.h"

using namespace gpimdp;

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
};

Config load(Common const& c) {
    Config cfg = loadConfig(c.config);
    if (c.seed) {
        cfg.dataset.seed = *c.seed;
        cfg.benchmark.seed = *c.seed;
    }
    if (!c.out.empty()) cfg.output.directory = c.out;
    return cfg;
}

OfflineResult offline(Config const& cfg, sim::Plant const& plant) { return runOffline(cfg, loadDataset(cfg, &plant)); }

int offlineSynth(Common const& c) {
    Config const cfg = load(c);
    auto const plant = makePlant(cfg);
    auto const result = offline(cfg, plant);
    writeOfflineArtifacts(cfg.output.directory, cfg, result);
    std::ostringstream data;
    data << provenanceComment(cfg);
    io::writeDataset(data, result.data);
    io::writeText(cfg.output.directory / "dataset.csv", data.str());
    std::cout << manifest(cfg, result, cfg.online.recordTiming).dump(2) << "\n";
    return 0;
}

int runEpisodes(Common const& c, std::optional<std::string> const& mode, std::optional<std::string> const& metrics, std::optional<std::size_t> runs,
                bool benchmark) {
    Config cfg = load(c);
    auto const plant = makePlant(cfg);
    auto const result = offline(cfg, plant);
    MonteCarloOptions opts = monteCarloOptions(cfg);
    if (!benchmark) {
        opts.modes = {mode ? online::parseGpMode(*mode) : cfg.online.mode};
        opts.metrics = {metrics ? online::parseMetrics(*metrics) : cfg.online.metrics};
        opts.runs = runs.value_or(1);
    } else {
        if (mode) opts.modes = {online::parseGpMode(*mode)};
        if (metrics) opts.metrics = {online::parseMetrics(*metrics)};
        if (runs) opts.runs = *runs;
    }
    std::filesystem::create_directories(cfg.output.directory);
    std::ofstream log(cfg.output.directory / "runs.jsonl", std::ios::binary);
    if (!log) throw IoError("cannot write '" + (cfg.output.directory / "runs.jsonl").string() + "'");
    nlohmann::json header = provenance(cfg);
    header["type"] = "provenance";
    log << header.dump() << "\n";
    auto const rows = monteCarlo(cfg, result, plant, opts, &log);
    std::ostringstream stats;
    stats << provenanceComment(cfg);
    writeStats(stats, rows, cfg.online.recordTiming);
    io::writeText(cfg.output.directory / "stats.csv", stats.str());
    writeOfflineArtifacts(cfg.output.directory, cfg, result);
    std::cout << stats.str();
    return 0;
}

int dfaCommand(Common const& c, std::string const& formula, std::vector<std::string> const& props) {
    ltlf::Dfa dfa;
    if (!formula.empty()) {
        ltlf::PropositionSet const ap(props);
        dfa = ltlf::toDfa(ltlf::parse(formula, ap), ap);
    } else {
        if (c.config.empty()) throw ConfigError("give --formula or --config");
        Config const cfg = load(c);
        std::vector<std::string> names;
        for (auto const& r : cfg.regions) names.push_back(r.proposition);
        ltlf::PropositionSet const ap(names);
        dfa = compileSpecification(cfg, ap);
    }
    nlohmann::json j = dfa.toJson();
    auto& distance = j["distance"] = nlohmann::json::array();
    for (auto d : ltlf::dfaDistance(dfa)) distance.push_back(d == ltlf::unreachableDistance ? nlohmann::json(nullptr) : nlohmann::json(d));
    if (c.out.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        io::writeJson(c.out, j);
    }
    return 0;
}

int checkModel(Common const& c, std::string const& imdpFile) {
    if (!imdpFile.empty()) {
        std::ifstream in(imdpFile);
        if (!in) throw IoError("cannot read '" + imdpFile + "'");
        nlohmann::json j;
        try {
            in >> j;
        } catch (nlohmann::json::exception const& e) {
            throw IoError("'" + imdpFile + "' is not valid JSON: " + e.what());
        }
        auto const imdp = Imdp::fromJson(j);
        imdp.validate();
        std::cout << "ok: " << imdp.stateCount() << " states, " << imdp.actionCount() << " actions\n";
        return 0;
    }
    Config const cfg = load(c);
    auto const plant = makePlant(cfg);
    auto const result = offline(cfg, plant);
    result.pimdp.imdp().validate();
    std::cout << "ok: " << manifest(cfg, result, false).dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Controller synthesis for GP-learned systems via interval MDP abstractions"};
    app.require_subcommand(1);
    Common common;
    auto addCommon = [&](CLI::App* sub, bool configRequired) {
        auto* opt = sub->add_option("--config", common.config, "TOML configuration file");
        if (configRequired) opt->required();
        sub->add_option("--seed", common.seed, "Override the dataset and benchmark seeds");
        sub->add_option("--out", common.out, "Output directory (file for dfa)");
    };

    auto* synth = app.add_subcommand("offline-synth", "Learn, abstract and synthesize the offline strategy");
    addCommon(synth, true);

    std::optional<std::string> mode, metrics;
    std::optional<std::size_t> runs;
    auto* simulate = app.add_subcommand("simulate", "Run closed-loop episodes for one mode and metric");
    addCommon(simulate, true);
    auto* bench = app.add_subcommand("benchmark", "Monte Carlo table over starts, metrics and modes");
    addCommon(bench, true);
    for (auto* sub : {simulate, bench}) {
        sub->add_option("--mode", mode, "global-static | local-static | local-update")
            ->check(CLI::IsMember({"global-static", "local-static", "local-update"}));
        sub->add_option("--metrics", metrics, "offline | sink | sink+prog")->check(CLI::IsMember({"offline", "sink", "sink+prog"}));
        sub->add_option("--runs", runs, "Episodes per start");
    }

    std::string formula;
    std::vector<std::string> props;
    auto* dfa = app.add_subcommand("dfa", "Compile an LTLf formula and print the automaton as JSON");
    addCommon(dfa, false);
    dfa->add_option("--formula", formula, "LTLf formula");
    dfa->add_option("--props", props, "Proposition names")->delimiter(',');

    std::string imdpFile;
    auto* check = app.add_subcommand("check-model", "Validate an exported IMDP or the model built from a configuration");
    addCommon(check, false);
    check->add_option("--imdp", imdpFile, "IMDP JSON file");

    CLI11_PARSE(app, argc, argv);
    try {
        if (synth->parsed()) return offlineSynth(common);
        if (simulate->parsed()) return runEpisodes(common, mode, metrics, runs, false);
        if (bench->parsed()) return runEpisodes(common, mode, metrics, runs, true);
        if (dfa->parsed()) return dfaCommand(common, formula, props);
        if (check->parsed()) {
            if (imdpFile.empty() && common.config.empty()) throw ConfigError("give --imdp or --config");
            return checkModel(common, imdpFile);
        }
    } catch (ConfigError const& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (IoError const& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (Error const& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (std::exception const& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
