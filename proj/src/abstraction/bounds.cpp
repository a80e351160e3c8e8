#include <cmath>

#include "gpimdp/abstraction.h"
#include "gpimdp/errors.h"

namespace gpimdp::abstraction {

double NoiseModel::centralProbability(std::size_t dim, double eta) const {
    double const s = scale.at(dim);
    if (eta <= 0.0) return s <= 0.0 ? 1.0 : 0.0;
    if (s <= 0.0) return 1.0;
    switch (kind) {
        case NoiseKind::Gaussian:
            return std::erf(eta / (s * std::sqrt(2.0)));
        case NoiseKind::Uniform:
            return std::min(1.0, eta / s);
    }
    return 0.0;
}

double noiseBoxProb(NoiseModel const& noise, Vector const& eta) {
    if (eta.size() != noise.scale.size()) throw ModelError("abstraction", "noise radius dimension mismatch");
    double p = 1.0;
    for (std::size_t i = 0; i < eta.size(); ++i) p *= noise.centralProbability(i, eta[i]);
    return p;
}

Box imageBox(gp::ActionModel const& model, Box const& region) {
    std::size_t const n = region.dimension();
    if (model.dims.size() != n) throw ModelError("abstraction", "model output dimension does not match the region");
    Vector lo(n), hi(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto const [mLo, mHi] = model.dims[i].meanRange(region);
        bool const inc = model.mode == gp::TargetMode::Increment;
        lo[i] = mLo + (inc ? region.lower[i] : 0.0);
        hi[i] = mHi + (inc ? region.upper[i] : 0.0);
    }
    return Box(lo, hi);
}

TransitionInterval transitionBounds(Box const* destination, Box const& domain, Box const& image, Vector const& epsilon, Vector const& eta,
                                    double errProb, double noiseProb) {
    Vector margin(epsilon.size());
    for (std::size_t i = 0; i < margin.size(); ++i) margin[i] = epsilon[i] + eta[i];
    bool reachable = false;
    bool certain = false;
    if (destination) {
        reachable = image.intersects(destination->expanded(margin));
        certain = destination->shrunk(margin).contains(image);
    } else {
        reachable = !domain.shrunk(margin).contains(image);
        certain = !image.intersects(domain.expanded(margin));
    }
    double const good = errProb * noiseProb;
    return {certain ? good : 0.0, reachable ? 1.0 : 1.0 - good};
}

SourceBounds sourceBounds(gp::ActionModel const& model, Box const& source) {
    SourceBounds sb{imageBox(model, source), {}};
    for (auto const& g : model.dims) sb.supStd.push_back(g.supStd(source));
    return sb;
}

Row computeRow(Partition const& partition, gp::ActionModel const& model, SourceBounds const& source, NoiseModel const& noise, RowChoice choice) {
    std::size_t const n = partition.dimension();
    if (model.dims.size() != n || source.supStd.size() != n) throw ModelError("abstraction", "model dimension does not match the partition");
    Vector epsilon(n), eta(n), margin(n);
    for (std::size_t i = 0; i < n; ++i) {
        epsilon[i] = model.dims[i].epsilonFromStd(source.supStd[i], choice.delta);
        eta[i] = choice.etaMultiple * noise.scale.at(i);
        margin[i] = epsilon[i] + eta[i];
    }
    double const errProb = std::pow(1.0 - choice.delta, static_cast<double>(n));
    double const noiseProb = noiseBoxProb(noise, eta);
    Box const& image = source.image;

    Row row;
    row.tailUpper = 1.0 - errProb * noiseProb;
    for (int q : partition.cellsIntersecting(image.expanded(margin))) {
        Box const& cell = partition.cell(q).box;
        auto const b = transitionBounds(&cell, partition.domain(), image, epsilon, eta, errProb, noiseProb);
        row.entries.push_back({static_cast<std::uint32_t>(q), b.lower, b.upper, image.intersects(cell)});
    }
    auto const out = transitionBounds(nullptr, partition.domain(), image, epsilon, eta, errProb, noiseProb);
    if (out.upper == 1.0 || out.lower > 0.0) {
        row.entries.push_back({static_cast<std::uint32_t>(partition.outsideId()), out.lower, out.upper, !partition.domain().contains(image)});
    }
    return row;
}

Row bestRow(Partition const& partition, gp::ActionModel const& model, SourceBounds const& source, NoiseModel const& noise, BoundsGrid const& grid,
            RowChoice* chosen) {
    if (grid.deltas.empty() || grid.etaMultiples.empty()) throw ModelError("abstraction", "empty confidence grid");
    std::size_t const destinations = partition.stateCount();
    Row best;
    RowChoice bestChoice;
    double bestLower = -1.0;
    double bestUpper = 0.0;
    for (double delta : grid.deltas) {
        for (double mult : grid.etaMultiples) {
            RowChoice const c{delta, mult};
            Row r = computeRow(partition, model, source, noise, c);
            double const lo = r.lowerSum();
            double const up = r.upperSum(destinations);
            if (lo > bestLower || (lo == bestLower && up < bestUpper)) {
                best = std::move(r);
                bestChoice = c;
                bestLower = lo;
                bestUpper = up;
            }
        }
    }
    if (chosen) *chosen = bestChoice;
    return best;
}

Imdp buildImdp(Partition const& partition, gp::ModelSet const& models, NoiseModel const& noise, BoundsGrid const& grid) {
    if (models.empty()) throw ModelError("abstraction", "no action models");
    if (noise.scale.size() != partition.dimension()) throw ModelError("abstraction", "noise dimension does not match the partition");
    std::size_t const states = partition.stateCount();
    Imdp imdp(states, models.size(), partition.propositions());
    imdp.boxes.resize(states);
    auto const outside = static_cast<std::size_t>(partition.outsideId());
    imdp.setOutsideState(outside);
    for (std::size_t a = 0; a < models.size(); ++a) {
        Row absorbing;
        absorbing.entries.push_back({static_cast<std::uint32_t>(outside), 1.0, 1.0, true});
        imdp.setRow(outside, a, absorbing);
    }
    for (auto const& cell : partition.allCells()) {
        auto const q = static_cast<std::size_t>(cell.id);
        imdp.boxes[q] = cell.box;
        imdp.setLabel(q, cell.label);
        for (std::size_t a = 0; a < models.size(); ++a) {
            auto const sb = sourceBounds(models[a], cell.box);
            imdp.setRow(q, a, bestRow(partition, models[a], sb, noise, grid));
        }
    }
    return imdp;
}

}  // namespace gpimdp::abstraction
