#include "fixtures.h"

namespace gpimdp::fixture {

std::filesystem::path sourceDir() { return GPIMDP_SOURCE_DIR; }

Config const& benchmarkConfig() {
    static Config const config = loadConfig(sourceDir() / "configs" / "benchmark.toml");
    return config;
}

OfflineResult const& benchmarkOffline() {
    static OfflineResult const result = [] {
        auto const& c = benchmarkConfig();
        auto const plant = makePlant(c);
        return runOffline(c, loadDataset(c, &plant));
    }();
    return result;
}

Config const& tinyConfig() {
    static Config const config = loadConfig(sourceDir() / "tests" / "data" / "tiny.toml");
    return config;
}

OfflineResult const& tinyOffline() {
    static OfflineResult const result = [] {
        auto const& c = tinyConfig();
        auto const plant = makePlant(c);
        return runOffline(c, loadDataset(c, &plant));
    }();
    return result;
}

}  // namespace gpimdp::fixture
