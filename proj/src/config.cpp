#include "gpimdp/config.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <toml.hpp>

#include "gpimdp/errors.h"

namespace gpimdp {

std::string fnv1a64Hex(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

using toml::node_view;

double number(node_view<toml::node const> n, std::string const& field) {
    if (auto v = n.value<double>()) return *v;
    throw ConfigError("field '" + field + "' must be a number");
}

std::int64_t integer(node_view<toml::node const> n, std::string const& field) {
    if (auto v = n.value<std::int64_t>()) return *v;
    throw ConfigError("field '" + field + "' must be an integer");
}

std::size_t count(node_view<toml::node const> n, std::string const& field, bool allowZero = false) {
    auto const v = integer(n, field);
    if (v < 0 || (!allowZero && v == 0)) throw ConfigError("field '" + field + "' must be " + (allowZero ? "non-negative" : "positive"));
    return static_cast<std::size_t>(v);
}

std::string text(node_view<toml::node const> n, std::string const& field) {
    if (auto v = n.value<std::string>()) return *v;
    throw ConfigError("field '" + field + "' must be a string");
}

Vector numbers(node_view<toml::node const> n, std::string const& field) {
    auto const* arr = n.as_array();
    if (!arr) throw ConfigError("field '" + field + "' must be an array of numbers");
    Vector out;
    for (std::size_t i = 0; i < arr->size(); ++i) out.push_back(number(node_view<toml::node const>(arr->get(i)), field + "[" + std::to_string(i) + "]"));
    return out;
}

template <typename T, typename F>
void optional(node_view<toml::node const> n, T& target, F&& read) {
    if (n) target = read(n);
}

Box boxFrom(node_view<toml::node const> lo, node_view<toml::node const> hi, std::string const& field, std::size_t dim) {
    Vector const l = numbers(lo, field + ".lower");
    Vector const u = numbers(hi, field + ".upper");
    if (l.size() != dim || u.size() != dim) throw ConfigError("field '" + field + "' must have " + std::to_string(dim) + " coordinates");
    for (std::size_t i = 0; i < dim; ++i) {
        if (l[i] > u[i]) throw ConfigError("field '" + field + "' has lower > upper in dimension " + std::to_string(i));
    }
    return Box(l, u);
}

gp::KernelParams kernelFrom(node_view<toml::node const> n, std::string const& field, std::size_t dim, gp::BoundParams& bound) {
    gp::KernelParams k;
    k.lengthscales = numbers(n["lengthscales"], field + ".lengthscales");
    if (k.lengthscales.size() == 1 && dim > 1) k.lengthscales.assign(dim, k.lengthscales[0]);
    optional(n["signal_variance"], k.signalVariance, [&](auto v) { return number(v, field + ".signal_variance"); });
    optional(n["noise_variance"], k.noiseVariance, [&](auto v) { return number(v, field + ".noise_variance"); });
    try {
        k.validate(dim);
    } catch (Error const& e) {
        throw ConfigError("field '" + field + "': " + e.what());
    }
    if (n["B"]) bound.rkhsBound = number(n["B"], field + ".B");
    if (n["R"]) bound.subGaussianScale = number(n["R"], field + ".R");
    if (n["gamma"]) bound.informationGain = number(n["gamma"], field + ".gamma");
    return k;
}

}  // namespace

Config parseConfig(std::string const& source, std::filesystem::path const& baseDir) {
    toml::table doc;
    try {
        doc = toml::parse(source);
    } catch (toml::parse_error const& e) {
        std::ostringstream os;
        os << "TOML syntax error at line " << e.source().begin.line << ": " << e.description();
        throw ConfigError(os.str());
    }
    node_view<toml::node const> root(doc);
    Config c;
    c.hash = fnv1a64Hex(source);

    auto sys = root["system"];
    if (!sys) throw ConfigError("missing [system] section");
    optional(sys["plant"], c.system.plant, [](auto v) { return text(v, "system.plant"); });
    if (c.system.plant != "benchmark" && c.system.plant != "tabulated") throw ConfigError("field 'system.plant' must be 'benchmark' or 'tabulated'");
    c.system.dimension = count(sys["dimension"], "system.dimension");
    c.system.actions = static_cast<int>(count(sys["actions"], "system.actions"));
    auto const* boundsArr = sys["bounds"].as_array();
    if (!boundsArr || boundsArr->size() != c.system.dimension) throw ConfigError("field 'system.bounds' must list one [lo, hi] pair per dimension");
    Vector lo, hi;
    for (std::size_t i = 0; i < boundsArr->size(); ++i) {
        Vector const pair = numbers(node_view<toml::node const>(boundsArr->get(i)), "system.bounds[" + std::to_string(i) + "]");
        if (pair.size() != 2 || !(pair[0] < pair[1])) throw ConfigError("field 'system.bounds[" + std::to_string(i) + "]' must be [lo, hi] with lo < hi");
        lo.push_back(pair[0]);
        hi.push_back(pair[1]);
    }
    c.system.bounds = Box(lo, hi);
    std::string noiseKind = "gaussian";
    optional(sys["noise"], noiseKind, [](auto v) { return text(v, "system.noise"); });
    if (noiseKind == "gaussian") {
        c.system.noise.kind = abstraction::NoiseKind::Gaussian;
    } else if (noiseKind == "uniform") {
        c.system.noise.kind = abstraction::NoiseKind::Uniform;
    } else {
        throw ConfigError("field 'system.noise' must be 'gaussian' or 'uniform'");
    }
    c.system.noise.scale = numbers(sys["noise_scale"], "system.noise_scale");
    if (c.system.noise.scale.size() != c.system.dimension) throw ConfigError("field 'system.noise_scale' must have one entry per dimension");
    for (double s : c.system.noise.scale) {
        if (!(s >= 0.0)) throw ConfigError("field 'system.noise_scale' must be non-negative");
    }

    if (auto ds = root["dataset"]) {
        if (ds["path"]) {
            std::filesystem::path p = text(ds["path"], "dataset.path");
            c.dataset.path = p.is_absolute() ? p : baseDir / p;
        }
        optional(ds["samples_per_action"], c.dataset.samplesPerAction, [](auto v) { return count(v, "dataset.samples_per_action"); });
        optional(ds["seed"], c.dataset.seed, [](auto v) { return static_cast<std::uint64_t>(count(v, "dataset.seed", true)); });
    }
    if (c.system.plant == "tabulated" && !c.dataset.path) throw ConfigError("a tabulated plant needs 'dataset.path'");

    if (auto const* regions = root["region"].as_array()) {
        for (std::size_t i = 0; i < regions->size(); ++i) {
            std::string const field = "region[" + std::to_string(i) + "]";
            node_view<toml::node const> r(regions->get(i));
            abstraction::RegionOfInterest roi;
            roi.proposition = text(r["proposition"], field + ".proposition");
            for (char const* kw : {"true", "false", "X", "WX", "F", "G", "U", "R"}) {
                if (roi.proposition == kw) throw ConfigError("field '" + field + ".proposition' uses the reserved word '" + kw + "'");
            }
            roi.boxes.push_back(boxFrom(r["lower"], r["upper"], field, c.system.dimension));
            bool merged = false;
            for (auto& existing : c.regions) {
                if (existing.proposition == roi.proposition) {
                    existing.boxes.push_back(roi.boxes.front());
                    merged = true;
                }
            }
            if (!merged) c.regions.push_back(std::move(roi));
        }
    }

    auto specSection = root["specification"];
    if (!specSection) throw ConfigError("missing [specification] section");
    c.formula = text(specSection["formula"], "specification.formula");
    optional(specSection["max_dfa_states"], c.maxDfaStates, [](auto v) { return count(v, "specification.max_dfa_states"); });

    auto gpSec = root["gp"];
    if (!gpSec) throw ConfigError("missing [gp] section");
    std::string target = "full";
    optional(gpSec["target"], target, [](auto v) { return text(v, "gp.target"); });
    if (target == "increment") {
        c.targetMode = gp::TargetMode::Increment;
    } else if (target == "full") {
        c.targetMode = gp::TargetMode::Full;
    } else {
        throw ConfigError("field 'gp.target' must be 'increment' or 'full'");
    }
    auto const* actionsArr = gpSec["action"].as_array();
    if (!actionsArr || actionsArr->empty()) throw ConfigError("field 'gp.action' must list kernel parameters ([[gp.action]])");
    if (actionsArr->size() != 1 && actionsArr->size() != static_cast<std::size_t>(c.system.actions)) {
        throw ConfigError("field 'gp.action' must have one entry, or one per action");
    }
    for (int a = 0; a < c.system.actions; ++a) {
        std::size_t const i = actionsArr->size() == 1 ? 0 : static_cast<std::size_t>(a);
        gp::BoundParams bound;
        c.kernels.push_back(kernelFrom(node_view<toml::node const>(actionsArr->get(i)), "gp.action[" + std::to_string(i) + "]", c.system.dimension, bound));
        c.bounds.push_back(bound);
    }

    if (auto ab = root["abstraction"]) {
        if (ab["cells"]) {
            c.cells.clear();
            for (double v : numbers(ab["cells"], "abstraction.cells")) {
                if (v < 1 || v != static_cast<int>(v)) throw ConfigError("field 'abstraction.cells' must hold positive integers");
                c.cells.push_back(static_cast<int>(v));
            }
        }
        optional(ab["deltas"], c.grid.deltas, [](auto v) { return numbers(v, "abstraction.deltas"); });
        optional(ab["eta_multiples"], c.grid.etaMultiples, [](auto v) { return numbers(v, "abstraction.eta_multiples"); });
        optional(ab["max_cells"], c.maxCells, [](auto v) { return count(v, "abstraction.max_cells"); });
    }
    if (c.cells.size() != c.system.dimension) throw ConfigError("field 'abstraction.cells' must have one entry per dimension");
    if (c.grid.deltas.empty() || c.grid.etaMultiples.empty()) throw ConfigError("confidence grid must not be empty");
    for (double d : c.grid.deltas) {
        if (!(d > 0.0 && d < 1.0)) throw ConfigError("field 'abstraction.deltas' entries must lie in (0, 1)");
    }
    for (double m : c.grid.etaMultiples) {
        if (!(m > 0.0)) throw ConfigError("field 'abstraction.eta_multiples' entries must be positive");
    }

    if (auto syn = root["synthesis"]) {
        optional(syn["tolerance"], c.solver.tolerance, [](auto v) { return number(v, "synthesis.tolerance"); });
        optional(syn["max_iterations"], c.solver.maxIterations, [](auto v) { return count(v, "synthesis.max_iterations"); });
        optional(syn["tie_tolerance"], c.solver.tieTolerance, [](auto v) { return number(v, "synthesis.tie_tolerance"); });
    }
    if (!(c.solver.tolerance > 0.0)) throw ConfigError("field 'synthesis.tolerance' must be positive");

    if (auto on = root["online"]) {
        auto& o = c.online;
        optional(on["local_count"], o.localCount, [](auto v) { return count(v, "online.local_count"); });
        optional(on["resynthesis_every"], o.resynthesisEvery, [](auto v) { return count(v, "online.resynthesis_every", true); });
        optional(on["neighbourhood_radius"], o.neighbourhoodRadius, [](auto v) { return static_cast<int>(count(v, "online.neighbourhood_radius", true)); });
        optional(on["step_bound"], o.stepBound, [](auto v) { return count(v, "online.step_bound"); });
        optional(on["tie_tolerance"], o.tieTolerance, [](auto v) { return number(v, "online.tie_tolerance"); });
        optional(on["solver_tolerance"], o.solver.tolerance, [](auto v) { return number(v, "online.solver_tolerance"); });
        optional(on["nesting_slack"], o.nestingSlack, [](auto v) { return number(v, "online.nesting_slack"); });
        if (on["mode"]) o.mode = online::parseGpMode(text(on["mode"], "online.mode"));
        if (on["metrics"]) o.metrics = online::parseMetrics(text(on["metrics"], "online.metrics"));
    }

    if (auto bm = root["benchmark"]) {
        auto& b = c.benchmark;
        optional(bm["runs"], b.runs, [](auto v) { return count(v, "benchmark.runs"); });
        optional(bm["seed"], b.seed, [](auto v) { return static_cast<std::uint64_t>(count(v, "benchmark.seed", true)); });
        if (auto const* starts = bm["starts"].as_array()) {
            for (std::size_t i = 0; i < starts->size(); ++i) {
                std::string const field = "benchmark.starts[" + std::to_string(i) + "]";
                Vector x = numbers(node_view<toml::node const>(starts->get(i)), field);
                if (x.size() != c.system.dimension) throw ConfigError("field '" + field + "' has the wrong dimension");
                if (!c.system.bounds.contains(x)) throw ConfigError("field '" + field + "' lies outside system.bounds");
                b.starts.push_back(std::move(x));
            }
        } else if (bm["starts"]) {
            throw ConfigError("field 'benchmark.starts' must be an array of points");
        }
        if (auto const* ms = bm["metrics"].as_array()) {
            b.metrics.clear();
            for (std::size_t i = 0; i < ms->size(); ++i) b.metrics.push_back(online::parseMetrics(text(node_view<toml::node const>(ms->get(i)), "benchmark.metrics")));
        }
        if (auto const* ms = bm["modes"].as_array()) {
            b.modes.clear();
            for (std::size_t i = 0; i < ms->size(); ++i) b.modes.push_back(online::parseGpMode(text(node_view<toml::node const>(ms->get(i)), "benchmark.modes")));
        }
    }

    if (auto out = root["output"]) {
        if (out["directory"]) {
            std::filesystem::path p = text(out["directory"], "output.directory");
            c.output.directory = p.is_absolute() ? p : baseDir / p;
        }
        optional(out["record_timing"], c.online.recordTiming, [](auto v) {
            if (auto b = v.template value<bool>()) return *b;
            throw ConfigError("field 'output.record_timing' must be a boolean");
        });
    } else {
        c.output.directory = baseDir / c.output.directory;
    }
    return c;
}

Config loadConfig(std::filesystem::path const& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("cannot read configuration file '" + file.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parseConfig(ss.str(), file.parent_path().empty() ? std::filesystem::path(".") : file.parent_path());
}

}  // namespace gpimdp
