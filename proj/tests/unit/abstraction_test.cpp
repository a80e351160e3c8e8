#include <gtest/gtest.h>

#include <cmath>

#include "gpimdp/abstraction.h"
#include "gpimdp/errors.h"
#include "gpimdp/rng.h"

using namespace gpimdp;
using namespace gpimdp::abstraction;

namespace {

std::vector<RegionOfInterest> benchmarkRegions() {
    return {{"O", {Box({-0.6, -0.6}, {0.6, 0.6})}}, {"D1", {Box({1.2, 1.2}, {2.0, 2.0})}}, {"D2", {Box({-2.0, 1.2}, {-1.2, 2.0})}}};
}

bool hasFace(Vector const& faces, double v) {
    for (double f : faces) {
        if (std::abs(f - v) < 1e-12) return true;
    }
    return false;
}

gp::ActionModel trainedModel(Philox& rng, gp::TargetMode mode) {
    gp::Dataset data(2, 1);
    for (int i = 0; i < 60; ++i) {
        Vector x{rng.uniform(-1, 1), rng.uniform(-1, 1)};
        data.add({x, 0, {x[0] + 0.3 * std::sin(2 * x[1]) + 0.05 * rng.normal(), x[1] - 0.2 * std::cos(x[0]) + 0.05 * rng.normal()}});
    }
    return gp::fitAction(data, 0, {{0.5, 0.5}, 0.5, 0.01}, mode);
}

// Standard normal density integrated over [a, b] by composite Simpson.
double gaussianMass(double a, double b, double mean, double sigma) {
    a = std::max(a, mean - 12 * sigma);
    b = std::min(b, mean + 12 * sigma);
    if (b <= a) return 0.0;
    int const n = 2000;
    double const h = (b - a) / n;
    auto pdf = [&](double t) { return std::exp(-0.5 * (t - mean) * (t - mean) / (sigma * sigma)) / (sigma * std::sqrt(2 * M_PI)); };
    double s = pdf(a) + pdf(b);
    for (int i = 1; i < n; ++i) s += pdf(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

}  // namespace

TEST(Partition, CountsCells) {
    auto const p = buildPartition(Box({-2, -2}, {2, 2}), {4, 4}, {});
    EXPECT_EQ(p.cellCount(), 16u);
    EXPECT_EQ(p.stateCount(), 17u);
    EXPECT_EQ(p.outsideId(), 16);
    EXPECT_EQ(p.propositions().size(), 0u);
}

TEST(Partition, InsertsRegionFaces) {
    auto const p = buildPartition(Box({-2, -2}, {2, 2}), {4, 4}, {{"O", {Box({-1, -0.5}, {1, 0.5})}}});
    EXPECT_TRUE(hasFace(p.breakpoints()[0], -1.0));
    EXPECT_TRUE(hasFace(p.breakpoints()[0], 1.0));
    EXPECT_TRUE(hasFace(p.breakpoints()[1], -0.5));
    EXPECT_TRUE(hasFace(p.breakpoints()[1], 0.5));
    EXPECT_EQ(p.cellCount(), 4u * 6u);
    for (auto const& c : p.allCells()) {
        auto const w = c.box.width();
        for (double fx : {0.01, 0.5, 0.99}) {
            for (double fy : {0.01, 0.5, 0.99}) {
                Vector const x{c.box.lower[0] + fx * w[0], c.box.lower[1] + fy * w[1]};
                EXPECT_EQ(p.labelOf(x), c.label);
            }
        }
    }
}

TEST(Partition, BenchmarkLabelsAreUniform) {
    auto const p = buildPartition(Box({-2, -2}, {2, 2}), {20, 20}, benchmarkRegions());
    for (auto const& c : p.allCells()) {
        EXPECT_EQ(c.label, p.labelOf(c.box.center()));
        auto const w = c.box.width();
        for (double fx : {1e-6, 1 - 1e-6}) {
            for (double fy : {1e-6, 1 - 1e-6}) EXPECT_EQ(p.labelOf({c.box.lower[0] + fx * w[0], c.box.lower[1] + fy * w[1]}), c.label);
        }
    }
}

TEST(Partition, RandomPointsGetTheirCellLabel) {
    auto const p = buildPartition(Box({-2, -2}, {2, 2}), {20, 20}, {{"O", {Box({-0.55, -0.73}, {0.61, 0.4})}}, {"D", {Box({1.01, 1.2}, {2.0, 1.9})}}});
    Philox rng(8);
    for (int i = 0; i < 10000; ++i) {
        Vector const x{rng.uniform(-2, 2), rng.uniform(-2, 2)};
        int const q = p.locate(x);
        ASSERT_NE(q, p.outsideId());
        EXPECT_TRUE(p.cell(q).box.contains(x));
        EXPECT_EQ(p.cell(q).label, p.labelOf(x));
    }
}

TEST(Partition, LocateOnSharedFaces) {
    auto const p = buildPartition(Box({0, 0}, {2, 2}), {2, 2}, {});
    EXPECT_EQ(p.locate({1.0, 0.5}), p.locate({0.5, 0.5}));
    EXPECT_EQ(p.locate({1.0, 1.0}), p.locate({0.5, 0.5}));
    EXPECT_EQ(p.locate({2.0, 2.0}), p.locate({1.5, 1.5}));
    EXPECT_EQ(p.locate({0.0, 0.0}), p.locate({0.5, 0.5}));
    EXPECT_EQ(p.locate({2.0001, 1.0}), p.outsideId());
    EXPECT_EQ(p.locate({-1e-9, 1.0}), p.outsideId());
    EXPECT_THROW(p.locate({1.0}), ModelError);
}

TEST(Partition, Neighbourhoods) {
    auto const p = buildPartition(Box({0, 0}, {5, 5}), {5, 5}, {});
    int const middle = p.locate({2.5, 2.5});
    EXPECT_EQ(p.neighbourhood(middle, 1).size(), 9u);
    EXPECT_EQ(p.neighbourhood(middle, 0), std::vector<int>{middle});
    EXPECT_EQ(p.neighbourhood(p.locate({0.5, 0.5}), 1).size(), 4u);
    EXPECT_EQ(p.neighbourhood(middle, 5).size(), 25u);
    EXPECT_TRUE(p.neighbourhood(p.outsideId(), 1).empty());
}

TEST(Partition, CellsIntersectingABox) {
    auto const p = buildPartition(Box({0, 0}, {5, 5}), {5, 5}, {});
    EXPECT_EQ(p.cellsIntersecting(Box({1.5, 1.5}, {2.5, 2.5})).size(), 4u);
    EXPECT_EQ(p.cellsIntersecting(Box({1.2, 1.2}, {1.8, 1.8})).size(), 1u);
    // Closed boxes: touching a face counts.
    EXPECT_EQ(p.cellsIntersecting(Box({1.0, 1.5}, {1.0, 1.5})).size(), 2u);
    EXPECT_TRUE(p.cellsIntersecting(Box({6, 6}, {7, 7})).empty());
    EXPECT_EQ(p.cellsIntersecting(Box({-10, -10}, {10, 10})).size(), 25u);
}

TEST(Partition, RejectsBadInput) {
    EXPECT_THROW(buildPartition(Box({0, 0}, {1, 1}), {2, 2}, {{"A", {Box({0.5, 0.5}, {1.5, 0.8})}}}), ModelError);
    EXPECT_THROW(buildPartition(Box({0, 0}, {1, 1}), {2}, {}), ModelError);
    EXPECT_THROW(buildPartition(Box({0, 0}, {1, 1}), {0, 2}, {}), ModelError);
    EXPECT_THROW(buildPartition(Box({0, 0}, {1, 1}), {100, 100}, {}, 5000), CapacityError);
}

TEST(Noise, BoxProbability) {
    NoiseModel const g{NoiseKind::Gaussian, {0.1, 0.1}};
    EXPECT_NEAR(noiseBoxProb(g, {0.1, 0.1}), std::pow(0.682689492137, 2), 1e-10);
    EXPECT_NEAR(noiseBoxProb(g, {10, 10}), 1.0, 1e-15);
    EXPECT_LT(noiseBoxProb(g, {1e-12, 1e-12}), 1e-20);
    NoiseModel const u{NoiseKind::Uniform, {0.2}};
    EXPECT_DOUBLE_EQ(noiseBoxProb(u, {0.1}), 0.5);
    EXPECT_DOUBLE_EQ(noiseBoxProb(u, {0.3}), 1.0);
    EXPECT_THROW(noiseBoxProb(g, {0.1}), ModelError);
}

TEST(TransitionBounds, ForcedCases) {
    Box const domain({0, 0}, {4, 4});
    Box const dest({1, 1}, {2, 2});
    Vector const zero{0, 0};
    Vector const eta{0.1, 0.1};
    auto const far = transitionBounds(&dest, domain, Box({3, 3}, {3.2, 3.2}), zero, eta, 1.0, 1.0);
    EXPECT_EQ(far.upper, 0.0);
    EXPECT_EQ(far.lower, 0.0);
    auto const inside = transitionBounds(&dest, domain, Box({1.4, 1.4}, {1.6, 1.6}), zero, eta, 1.0, 1.0);
    EXPECT_EQ(inside.lower, 1.0);
    EXPECT_EQ(inside.upper, 1.0);
    auto const partial = transitionBounds(&dest, domain, Box({1.4, 1.4}, {1.6, 1.6}), zero, eta, 0.9, 0.8);
    EXPECT_NEAR(partial.lower, 0.72, 1e-15);
    EXPECT_EQ(partial.upper, 1.0);
    auto const grazing = transitionBounds(&dest, domain, Box({2.05, 1.5}, {2.3, 1.6}), zero, eta, 0.9, 0.8);
    EXPECT_EQ(grazing.lower, 0.0);
    EXPECT_EQ(grazing.upper, 1.0);
    auto const missed = transitionBounds(&dest, domain, Box({2.3, 1.5}, {2.4, 1.6}), zero, eta, 0.9, 0.8);
    EXPECT_NEAR(missed.upper, 0.28, 1e-15);
}

TEST(TransitionBounds, OutsideState) {
    Box const domain({1}, {2});
    auto const away = transitionBounds(nullptr, domain, Box::point({0.0}), {0.0}, {0.1}, 1.0, 1.0);
    EXPECT_EQ(away.lower, 1.0);
    EXPECT_EQ(away.upper, 1.0);
    Box const cell({1}, {2});
    auto const toCell = transitionBounds(&cell, domain, Box::point({0.0}), {0.0}, {0.1}, 1.0, 1.0);
    EXPECT_EQ(toCell.upper, 0.0);
    auto const within = transitionBounds(nullptr, domain, Box::point({1.5}), {0.1}, {0.1}, 0.9, 0.9);
    EXPECT_EQ(within.lower, 0.0);
    EXPECT_NEAR(within.upper, 1.0 - 0.81, 1e-15);
}

TEST(ImageBox, PointAndPrior) {
    Philox rng(2);
    auto const model = trainedModel(rng, gp::TargetMode::Full);
    Vector const x{0.2, -0.3};
    auto const img = imageBox(model, Box::point(x));
    auto const f = model.predictMean(x);
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_NEAR(img.lower[i], f[i], 1e-12);
        EXPECT_NEAR(img.upper[i], f[i], 1e-12);
    }
    gp::Dataset empty(2, 1);
    auto const prior = gp::fitAction(empty, 0, {{1, 1}, 1, 0.01}, gp::TargetMode::Full);
    auto const flat = imageBox(prior, Box({0, 0}, {1, 1}));
    EXPECT_EQ(flat, Box({0, 0}, {0, 0}));
}

TEST(ImageBox, ContainsSampledImages) {
    Philox rng(6);
    for (auto mode : {gp::TargetMode::Full, gp::TargetMode::Increment}) {
        auto const model = trainedModel(rng, mode);
        Box const q({0, 0}, {0.2, 0.2});
        auto const img = imageBox(model, q);
        for (int i = 0; i < 10000; ++i) {
            auto const f = model.predictMean({rng.uniform(0, 0.2), rng.uniform(0, 0.2)});
            ASSERT_TRUE(img.contains(f));
        }
    }
}

// Prior-mean model of the identity map whose error radius covers a bounded
// perturbation of the true dynamics, so the bounds must hold for every x.
TEST(ComputeRow, ContainsQuadratureProbabilities) {
    auto const partition = buildPartition(Box({0}, {1}), {10}, {});
    gp::Dataset empty(1, 1);
    gp::KernelParams const kp{{0.5}, 1e-4, 0.0};
    gp::BoundParams const bp{5.0, 0.0, 0.0};
    auto const model = gp::fitAction(empty, 0, kp, gp::TargetMode::Increment, bp);
    NoiseModel const noise{NoiseKind::Gaussian, {0.1}};
    BoundsGrid const grid{{0.1}, {1.0, 2.0}};
    auto truth = [](double x) { return x + 0.05 * std::sin(7 * x); };
    ASSERT_NEAR(model.dims[0].epsilonFromStd(model.dims[0].supStd(partition.cell(0).box), 0.1), 0.05, 1e-12);

    for (auto const& cell : partition.allCells()) {
        auto const sb = sourceBounds(model, cell.box);
        auto const row = bestRow(partition, model, sb, noise, grid);
        ASSERT_TRUE(row.wellFormed(partition.stateCount()));
        for (int k = 0; k < 200; ++k) {
            double const x = cell.box.lower[0] + (k + 0.5) / 200.0 * cell.box.width()[0];
            double const mean = truth(x);
            double inside = 0.0;
            for (auto const& dest : partition.allCells()) {
                double const t = gaussianMass(dest.box.lower[0], dest.box.upper[0], mean, 0.1);
                inside += t;
                auto const e = row.at(static_cast<std::uint32_t>(dest.id));
                ASSERT_GE(t, e.lower - 1e-9) << "cell " << cell.id << " dest " << dest.id << " x " << x;
                ASSERT_LE(t, e.upper + 1e-9) << "cell " << cell.id << " dest " << dest.id << " x " << x;
            }
            auto const out = row.at(static_cast<std::uint32_t>(partition.outsideId()));
            EXPECT_GE(1.0 - inside, out.lower - 1e-9);
            EXPECT_LE(1.0 - inside, out.upper + 1e-9);
        }
    }
}

TEST(BestRow, MaximizesLowerMass) {
    Philox rng(10);
    auto const partition = buildPartition(Box({-1, -1}, {1, 1}), {8, 8}, {});
    auto const model = trainedModel(rng, gp::TargetMode::Full);
    NoiseModel const noise{NoiseKind::Gaussian, {0.05, 0.05}};
    BoundsGrid const grid;
    for (int q : {0, 27, 40}) {
        auto const sb = sourceBounds(model, partition.cell(q).box);
        RowChoice chosen;
        auto const best = bestRow(partition, model, sb, noise, grid, &chosen);
        for (double d : grid.deltas) {
            for (double m : grid.etaMultiples) {
                auto const r = computeRow(partition, model, sb, noise, {d, m});
                EXPECT_LE(r.lowerSum(), best.lowerSum());
            }
        }
        auto const again = computeRow(partition, model, sb, noise, chosen);
        EXPECT_EQ(again.lowerSum(), best.lowerSum());
    }
}

TEST(BuildImdp, RowsAreWellFormed) {
    Philox rng(11);
    auto const partition = buildPartition(Box({-1, -1}, {1, 1}), {6, 6}, {{"G", {Box({0.5, 0.5}, {1, 1})}}});
    gp::ModelSet models{trainedModel(rng, gp::TargetMode::Full), trainedModel(rng, gp::TargetMode::Increment)};
    models[1].action = 1;
    NoiseModel const noise{NoiseKind::Gaussian, {0.1, 0.1}};
    auto const imdp = buildImdp(partition, models, noise, BoundsGrid{});
    EXPECT_NO_THROW(imdp.validate());
    // The face at 0.5 splits one grid column and one grid row: 7 x 7 cells plus Outside.
    EXPECT_EQ(imdp.stateCount(), 50u);
    ASSERT_TRUE(imdp.outsideState());
    EXPECT_EQ(*imdp.outsideState(), 49u);
    for (std::size_t a = 0; a < 2; ++a) {
        auto const e = imdp.row(49, a).at(49);
        EXPECT_EQ(e.lower, 1.0);
        for (std::size_t q = 0; q < 49; ++q) {
            auto const& row = imdp.row(q, a);
            EXPECT_LE(row.lowerSum(), 1.0 + 1e-12);
            EXPECT_GE(row.upperSum(50), 1.0 - 1e-12);
        }
    }
    EXPECT_EQ(imdp.label(static_cast<std::size_t>(partition.locate({0.9, 0.9}))), 1u);
}
