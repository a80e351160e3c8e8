#include <gtest/gtest.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fixtures.h"
#include "gpimdp/config.h"
#include "gpimdp/errors.h"
#include "gpimdp/io.h"

using namespace gpimdp;
namespace fs = std::filesystem;

namespace {

std::string const minimal = R"(
[system]
dimension = 2
actions = 4
bounds = [[-1.0, 1.0], [-1.0, 1.0]]
noise_scale = [0.1, 0.1]

[[region]]
proposition = "a"
lower = [0.0, 0.0]
upper = [1.0, 1.0]

[specification]
formula = "F a"

[gp]
[[gp.action]]
lengthscales = [1.0, 1.0]
)";

std::string configError(std::string const& text) {
    try {
        parseConfig(text);
    } catch (ConfigError const& e) {
        return e.what();
    }
    return "";
}

std::string readFile(fs::path const& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path scratchDir(std::string const& name) {
    auto const dir = fs::temp_directory_path() / ("gpimdp_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int runCli(std::string const& args) {
    int const status = std::system((std::string(GPIMDP_CLI) + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, MinimalDefaults) {
    auto const c = parseConfig(minimal);
    EXPECT_EQ(c.system.plant, "benchmark");
    EXPECT_EQ(c.kernels.size(), 4u);
    EXPECT_EQ(c.cells, (std::vector<int>{20, 20}));
    EXPECT_EQ(c.online.localCount, 75u);
    EXPECT_EQ(c.online.resynthesisEvery, 50u);
    EXPECT_EQ(c.hash.size(), 16u);
    EXPECT_EQ(c.hash, parseConfig(minimal).hash);
    EXPECT_NE(c.hash, parseConfig(minimal + "\n# changed\n").hash);
}

TEST(Config, ErrorsNameTheField) {
    auto replace = [](std::string text, std::string const& from, std::string const& to) {
        text.replace(text.find(from), from.size(), to);
        return text;
    };
    EXPECT_NE(configError(replace(minimal, "noise_scale = [0.1, 0.1]", "noise_scale = [0.1]")).find("system.noise_scale"), std::string::npos);
    EXPECT_NE(configError(replace(minimal, "[[-1.0, 1.0], [-1.0, 1.0]]", "[[1.0, -1.0], [-1.0, 1.0]]")).find("system.bounds[0]"), std::string::npos);
    EXPECT_NE(configError(minimal + "[abstraction]\ncells = [0, 3]\n").find("abstraction.cells"), std::string::npos);
    EXPECT_NE(configError(minimal + "[abstraction]\ndeltas = [1.5]\n").find("abstraction.deltas"), std::string::npos);
    EXPECT_NE(configError(replace(minimal, "[specification]", "[spec]")).find("[specification]"), std::string::npos);
    EXPECT_NE(configError("[system\n").size(), 0u);
}

TEST(Config, ReservedPropositionNames) {
    for (std::string kw : {"X", "G", "F", "U", "true"}) {
        std::string text = minimal;
        text.replace(text.find("proposition = \"a\""), 17, "proposition = \"" + kw + "\"");
        EXPECT_NE(configError(text).find("reserved word '" + kw + "'"), std::string::npos) << kw;
    }
}

TEST(Config, MissingFileRaisesIoError) { EXPECT_THROW(loadConfig("/nonexistent/config.toml"), IoError); }

TEST(Io, DatasetRoundTrip) {
    gp::Dataset data(2, 2);
    data.add({{0.1, -0.2}, 1, {0.3, 1.0 / 3.0}});
    data.add({{1e-300, 5.0}, 0, {-7.25, 0.0}});
    auto const dir = scratchDir("dataset");
    std::ostringstream os;
    io::writeDataset(os, data);
    io::writeText(dir / "d.csv", "# generated\n" + os.str());
    auto const back = io::readDataset(dir / "d.csv", 2, 2);
    ASSERT_EQ(back.size(), 2u);
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_EQ(back[i].x, data[i].x);
        EXPECT_EQ(back[i].action, data[i].action);
        EXPECT_EQ(back[i].next, data[i].next);
    }
}

TEST(Io, DatasetErrorsNameThePath) {
    auto const dir = scratchDir("bad");
    try {
        io::readDataset(dir / "missing.csv", 2, 4);
        FAIL();
    } catch (IoError const& e) {
        EXPECT_NE(std::string(e.what()).find("missing.csv"), std::string::npos);
    }
    io::writeText(dir / "header.csv", "a,b\n");
    EXPECT_THROW(io::readDataset(dir / "header.csv", 2, 4), IoError);
    io::writeText(dir / "action.csv", "x_1,x_2,u,xplus_1,xplus_2\n0,0,7,0,0\n");
    EXPECT_THROW(io::readDataset(dir / "action.csv", 2, 4), IoError);
    io::writeText(dir / "number.csv", "x_1,x_2,u,xplus_1,xplus_2\n0,zero,1,0,0\n");
    EXPECT_THROW(io::readDataset(dir / "number.csv", 2, 4), IoError);
}

TEST(Io, NumbersRoundTrip) {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5, 0.0}) EXPECT_EQ(std::stod(io::formatNumber(v)), v);
}

TEST(Cli, ExitCodes) {
    auto const dir = scratchDir("cli");
    io::writeText(dir / "c.toml", minimal + "[dataset]\npath = \"nowhere.csv\"\n");
    EXPECT_EQ(runCli("offline-synth --config " + (dir / "c.toml").string() + " --out " + (dir / "out").string()), 2);
    EXPECT_EQ(runCli("offline-synth --config " + (dir / "absent.toml").string()), 2);
    EXPECT_EQ(runCli("dfa --formula 'F a' --props a"), 0);
    EXPECT_EQ(runCli("dfa --formula 'F (a' --props a"), 1);
    EXPECT_NE(runCli("simulate"), 0);
}

TEST(Cli, TinyRunIsFastAndReproducible) {
    auto const config = (fixture::sourceDir() / "tests" / "data" / "tiny.toml").string();
    auto const a = scratchDir("tiny_a");
    auto const b = scratchDir("tiny_b");
    auto const t0 = std::chrono::steady_clock::now();
    ASSERT_EQ(runCli("benchmark --config " + config + " --out " + a.string()), 0);
    double const seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    EXPECT_LT(seconds, 5.0);
    ASSERT_EQ(runCli("benchmark --config " + config + " --out " + b.string()), 0);
    std::size_t compared = 0;
    for (auto const& entry : fs::directory_iterator(a)) {
        auto const name = entry.path().filename();
        ASSERT_TRUE(fs::exists(b / name)) << name;
        EXPECT_EQ(readFile(entry.path()), readFile(b / name)) << name;
        EXPECT_NE(readFile(entry.path()).find(fixture::tinyConfig().hash), std::string::npos) << name << " lacks the config hash";
        ++compared;
    }
    EXPECT_GE(compared, 6u);
    auto const manifest = nlohmann::json::parse(readFile(a / "manifest.json"));
    EXPECT_EQ(manifest["config_hash"], fixture::tinyConfig().hash);
}
