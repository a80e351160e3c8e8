#pragma once

#include <filesystem>

#include "gpimdp/config.h"
#include "gpimdp/pipeline.h"

namespace gpimdp::fixture {

std::filesystem::path sourceDir();

/// configs/benchmark.toml, parsed once.
Config const& benchmarkConfig();
/// Offline pipeline on the benchmark configuration, run once per process.
OfflineResult const& benchmarkOffline();

/// tests/data/tiny.toml, parsed once.
Config const& tinyConfig();
OfflineResult const& tinyOffline();

}  // namespace gpimdp::fixture
