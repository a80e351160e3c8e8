#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gpimdp/abstraction.h"
#include "gpimdp/box.h"
#include "gpimdp/gp.h"
#include "gpimdp/rng.h"

namespace gpimdp::sim {

/// Ground-truth system x+ = mean(x, u) + w with independent noise per dimension.
class Plant {
   public:
    using Dynamics = std::function<Vector(Vector const&, int)>;

    Plant(std::string name, std::size_t dim, int actions, Dynamics mean, abstraction::NoiseModel noise);

    /// The four-action nonlinear benchmark with N(0, 0.01 I) noise:
    ///   u1: x + (0.25 + 0.05 sin x2, 0.1 cos x1)
    ///   u2: x + (-0.25 + 0.05 sin x2, 0.1 cos x1)
    ///   u3: x + (0.1 cos x2, 0.25 + 0.05 sin x1)
    ///   u4: x + (0.1 cos x2, -0.25 + 0.05 sin x1)
    static Plant benchmark();

    /// Piecewise-constant drift looked up from the nearest tabulated (x, u)
    /// sample: mean(x, u) = x + (next_j - x_j) for the closest x_j.
    static Plant tabulated(gp::Dataset table, abstraction::NoiseModel noise);

    std::string const& name() const { return plantName; }
    std::size_t stateDimension() const { return dim; }
    int actionCount() const { return numActions; }
    abstraction::NoiseModel const& noise() const { return noiseModel; }

    /// Noise-free successor; throws ModelError for unknown actions.
    Vector mean(Vector const& x, int action) const;
    Vector sampleNoise(Philox& rng) const;
    /// mean(x, u) + w.
    Vector step(Vector const& x, int action, Philox& rng) const;

   private:
    std::string plantName;
    std::size_t dim;
    int numActions;
    Dynamics meanFn;
    abstraction::NoiseModel noiseModel;
};

/// `perAction` uniform states in `bounds` for every action, each stepped once.
gp::Dataset sampleDataset(Plant const& plant, std::size_t perAction, Box const& bounds, std::uint64_t seed);

}  // namespace gpimdp::sim
