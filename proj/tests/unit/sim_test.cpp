#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "fixtures.h"
#include "gpimdp/errors.h"
#include "gpimdp/montecarlo.h"
#include "gpimdp/plant.h"
#include "gpimdp/rng.h"

using namespace gpimdp;

TEST(Philox, KnownAnswerForZeroKeyAndCounter) {
    Philox rng(0, 0);
    EXPECT_EQ(rng.nextU32(), 0x6627e8d5u);
    EXPECT_EQ(rng.nextU32(), 0xe169c58du);
    EXPECT_EQ(rng.nextU32(), 0xbc57ac4cu);
    EXPECT_EQ(rng.nextU32(), 0x9b00dbd8u);
}

TEST(Philox, StreamsAreReproducibleAndDistinct) {
    Philox a(5, 1), b(5, 1), otherStream(5, 2), otherSeed(6, 1);
    std::vector<std::uint32_t> xs;
    for (int i = 0; i < 100; ++i) {
        xs.push_back(a.nextU32());
        EXPECT_EQ(xs.back(), b.nextU32());
    }
    std::vector<std::uint32_t> ys, zs;
    for (int i = 0; i < 100; ++i) {
        ys.push_back(otherStream.nextU32());
        zs.push_back(otherSeed.nextU32());
    }
    EXPECT_NE(xs, ys);
    EXPECT_NE(xs, zs);
}

TEST(Philox, UniformAndNormalMoments) {
    Philox rng(12);
    int const n = 100000;
    double su = 0.0, sn = 0.0, sn2 = 0.0;
    for (int i = 0; i < n; ++i) {
        double const u = rng.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        su += u;
        double const z = rng.normal();
        sn += z;
        sn2 += z * z;
    }
    EXPECT_NEAR(su / n, 0.5, 5 * std::sqrt(1.0 / 12 / n));
    EXPECT_NEAR(sn / n, 0.0, 5 / std::sqrt(n));
    EXPECT_NEAR(sn2 / n, 1.0, 5 * std::sqrt(2.0 / n));
}

TEST(Plant, BenchmarkMeanDynamics) {
    auto const p = sim::Plant::benchmark();
    EXPECT_EQ(p.actionCount(), 4);
    auto const m0 = p.mean({0.25, 0.1}, 0);
    EXPECT_NEAR(m0[0], 0.25 + 0.25 + 0.05 * std::sin(0.1), 1e-15);
    EXPECT_NEAR(m0[1], 0.1 + 0.1 * std::cos(0.25), 1e-15);
    auto const m1 = p.mean({-0.25, 0.1}, 1);
    EXPECT_NEAR(m1[0], -0.25 - 0.25 + 0.05 * std::sin(0.1), 1e-15);
    EXPECT_NEAR(m1[1], 0.1 + 0.1 * std::cos(-0.25), 1e-15);
    auto const m2 = p.mean({0.3, -0.2}, 2);
    EXPECT_NEAR(m2[0], 0.3 + 0.1 * std::cos(-0.2), 1e-15);
    EXPECT_NEAR(m2[1], -0.2 + 0.25 + 0.05 * std::sin(0.3), 1e-15);
    auto const m3 = p.mean({0.3, -0.2}, 3);
    EXPECT_NEAR(m3[1], -0.2 - 0.25 + 0.05 * std::sin(0.3), 1e-15);
    EXPECT_THROW(p.mean({0.0, 0.0}, 4), ModelError);
}

TEST(Plant, NoiseMoments) {
    auto const p = sim::Plant::benchmark();
    Philox rng(13);
    int const n = 100000;
    double m[2] = {0, 0}, v[2] = {0, 0}, cross = 0.0;
    for (int i = 0; i < n; ++i) {
        auto const w = p.sampleNoise(rng);
        for (int d = 0; d < 2; ++d) {
            m[d] += w[d] / n;
            v[d] += w[d] * w[d] / n;
        }
        cross += w[0] * w[1] / n;
    }
    for (int d = 0; d < 2; ++d) {
        EXPECT_NEAR(m[d], 0.0, 5 * 0.1 / std::sqrt(n));
        EXPECT_NEAR(v[d], 0.01, 5 * 0.01 * std::sqrt(2.0 / n));
    }
    EXPECT_NEAR(cross, 0.0, 5 * 0.01 / std::sqrt(n));
}

TEST(Plant, TabulatedUsesNearestDrift) {
    gp::Dataset table(1, 1);
    table.add({{0.0}, 0, {0.5}});
    table.add({{1.0}, 0, {0.8}});
    auto const p = sim::Plant::tabulated(table, {abstraction::NoiseKind::Uniform, {0.0}});
    EXPECT_DOUBLE_EQ(p.mean({0.2}, 0)[0], 0.7);
    EXPECT_DOUBLE_EQ(p.mean({0.9}, 0)[0], 0.7);
}

TEST(SampleDataset, CountsBoundsAndDeterminism) {
    auto const p = sim::Plant::benchmark();
    Box const bounds({-2.0, -2.0}, {2.0, 2.0});
    auto const a = sim::sampleDataset(p, 50, bounds, 3);
    auto const b = sim::sampleDataset(p, 50, bounds, 3);
    ASSERT_EQ(a.size(), 200u);
    for (int u = 0; u < 4; ++u) EXPECT_EQ(a.countFor(u), 50u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_TRUE(bounds.contains(a[i].x));
        EXPECT_EQ(a[i].x, b[i].x);
        EXPECT_EQ(a[i].next, b[i].next);
    }
    EXPECT_TRUE(sim::sampleDataset(p, 0, bounds, 3).empty());
}

TEST(MonteCarlo, OutcomesPartitionAndReruns) {
    auto const& cfg = fixture::tinyConfig();
    auto const& off = fixture::tinyOffline();
    auto const plant = makePlant(cfg);
    auto const opts = monteCarloOptions(cfg);
    std::ostringstream log1, log2;
    auto const rows = monteCarlo(cfg, off, plant, opts, &log1);
    auto const again = monteCarlo(cfg, off, plant, opts, &log2);
    // Offline runs once per start; the online metrics run once per mode.
    ASSERT_EQ(rows.size(), opts.starts.size() * (1 + 2 * opts.modes.size()));
    for (auto const& r : rows) {
        EXPECT_EQ(r.runs, opts.runs);
        EXPECT_NEAR(r.pViolate + r.pSatisfy + r.pTimeout + r.pAborted, 1.0, 1e-12);
    }
    EXPECT_EQ(log1.str(), log2.str());
    std::ostringstream s1, s2;
    writeStats(s1, rows, false);
    writeStats(s2, again, false);
    EXPECT_EQ(s1.str(), s2.str());
}

TEST(MonteCarlo, SubstreamsDoNotCollide) {
    EXPECT_EQ(episodeSubstream(0, 3, 10), 3u);
    EXPECT_EQ(episodeSubstream(2, 3, 10), 23u);
    EXPECT_NE(episodeSubstream(1, 0, 10), episodeSubstream(0, 9, 10));
}
