#include "gpimdp/plant.h"

#include <cmath>
#include <limits>

#include "gpimdp/errors.h"

namespace gpimdp::sim {

Plant::Plant(std::string name, std::size_t stateDim, int actions, Dynamics mean, abstraction::NoiseModel noise)
    : plantName(std::move(name)), dim(stateDim), numActions(actions), meanFn(std::move(mean)), noiseModel(std::move(noise)) {
    if (noiseModel.scale.size() != dim) throw ModelError("sim", "noise dimension does not match the state dimension");
    if (numActions < 1) throw ModelError("sim", "plant needs at least one action");
}

Plant Plant::benchmark() {
    auto mean = [](Vector const& x, int u) -> Vector {
        double const x1 = x[0];
        double const x2 = x[1];
        switch (u) {
            case 0:
                return {x1 + 0.25 + 0.05 * std::sin(x2), x2 + 0.1 * std::cos(x1)};
            case 1:
                return {x1 - 0.25 + 0.05 * std::sin(x2), x2 + 0.1 * std::cos(x1)};
            case 2:
                return {x1 + 0.1 * std::cos(x2), x2 + 0.25 + 0.05 * std::sin(x1)};
            default:
                return {x1 + 0.1 * std::cos(x2), x2 - 0.25 + 0.05 * std::sin(x1)};
        }
    };
    return Plant("benchmark", 2, 4, mean, {abstraction::NoiseKind::Gaussian, {0.1, 0.1}});
}

Plant Plant::tabulated(gp::Dataset table, abstraction::NoiseModel noise) {
    if (table.empty()) throw ModelError("sim", "tabulated plant needs at least one sample");
    std::size_t const n = table.stateDimension();
    int const actions = table.actionCount();
    auto mean = [table = std::move(table)](Vector const& x, int u) -> Vector {
        double best = std::numeric_limits<double>::infinity();
        gp::Sample const* nearest = nullptr;
        for (auto const& s : table.all()) {
            if (s.action != u) continue;
            double d2 = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) d2 += (s.x[i] - x[i]) * (s.x[i] - x[i]);
            if (d2 < best) {
                best = d2;
                nearest = &s;
            }
        }
        if (!nearest) throw ModelError("sim", "no tabulated sample for action " + std::to_string(u));
        Vector y(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + (nearest->next[i] - nearest->x[i]);
        return y;
    };
    return Plant("tabulated", n, actions, mean, std::move(noise));
}

Vector Plant::mean(Vector const& x, int action) const {
    if (action < 0 || action >= numActions) throw ModelError("sim", "unknown action " + std::to_string(action));
    if (x.size() != dim) throw ModelError("sim", "state dimension mismatch");
    return meanFn(x, action);
}

Vector Plant::sampleNoise(Philox& rng) const {
    Vector w(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        double const s = noiseModel.scale[i];
        w[i] = noiseModel.kind == abstraction::NoiseKind::Gaussian ? s * rng.normal() : rng.uniform(-s, s);
    }
    return w;
}

Vector Plant::step(Vector const& x, int action, Philox& rng) const {
    Vector y = mean(x, action);
    Vector const w = sampleNoise(rng);
    for (std::size_t i = 0; i < dim; ++i) y[i] += w[i];
    return y;
}

gp::Dataset sampleDataset(Plant const& plant, std::size_t perAction, Box const& bounds, std::uint64_t seed) {
    if (bounds.dimension() != plant.stateDimension()) throw ModelError("sim", "sampling box dimension mismatch");
    Philox rng(seed, 0);
    gp::Dataset data(plant.stateDimension(), plant.actionCount());
    for (int a = 0; a < plant.actionCount(); ++a) {
        for (std::size_t i = 0; i < perAction; ++i) {
            Vector x(plant.stateDimension());
            for (std::size_t d = 0; d < x.size(); ++d) x[d] = rng.uniform(bounds.lower[d], bounds.upper[d]);
            Vector next = plant.step(x, a, rng);
            data.add({std::move(x), a, std::move(next)});
        }
    }
    return data;
}

}  // namespace gpimdp::sim
