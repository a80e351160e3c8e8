#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gpimdp/abstraction.h"
#include "gpimdp/control.h"
#include "gpimdp/gp.h"
#include "gpimdp/synthesis.h"

namespace gpimdp {

struct SystemConfig {
    /// "benchmark" (built-in dynamics) or "tabulated" (nearest-sample drift from the dataset).
    std::string plant = "benchmark";
    std::size_t dimension = 2;
    int actions = 4;
    Box bounds;
    abstraction::NoiseModel noise;
};

struct DatasetConfig {
    /// CSV with columns x_1..x_n,u,xplus_1..xplus_n; sampled from the plant when unset.
    std::optional<std::filesystem::path> path;
    std::size_t samplesPerAction = 200;
    std::uint64_t seed = 1;
};

struct BenchmarkConfig {
    std::size_t runs = 200;
    std::vector<Vector> starts;
    std::vector<online::Metrics> metrics{online::Metrics::Offline, online::Metrics::Sink, online::Metrics::SinkProg};
    std::vector<online::GpMode> modes{online::GpMode::GlobalStatic, online::GpMode::LocalStatic, online::GpMode::LocalUpdate};
    std::uint64_t seed = 1;
};

struct OutputConfig {
    std::filesystem::path directory = "out";
};

struct Config {
    SystemConfig system;
    DatasetConfig dataset;
    std::vector<abstraction::RegionOfInterest> regions;
    std::string formula;
    std::size_t maxDfaStates = 100000;
    gp::TargetMode targetMode = gp::TargetMode::Full;
    std::vector<gp::KernelParams> kernels;
    std::vector<gp::BoundParams> bounds;
    std::vector<int> cells{20, 20};
    abstraction::BoundsGrid grid;
    std::size_t maxCells = 100000;
    synthesis::SolverOptions solver;
    online::OnlineConfig online;
    BenchmarkConfig benchmark;
    OutputConfig output;
    /// FNV-1a 64 of the configuration text, as 16 hex digits.
    std::string hash;
};

/// Parses TOML text; relative paths resolve against `baseDir`. Throws
/// ConfigError naming the offending field.
Config parseConfig(std::string const& text, std::filesystem::path const& baseDir = ".");
/// Throws IoError when the file cannot be read.
Config loadConfig(std::filesystem::path const& file);

std::string fnv1a64Hex(std::string_view data);

}  // namespace gpimdp
