#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gpimdp/box.h"
#include "gpimdp/gp.h"
#include "gpimdp/imdp.h"
#include "gpimdp/ltlf.h"

namespace gpimdp::abstraction {

/// A proposition and the closed boxes where it holds.
struct RegionOfInterest {
    std::string proposition;
    std::vector<Box> boxes;
};

/// One cell of the partition.
struct Region {
    int id = -1;
    Box box;
    ltlf::Symbol label = 0;
};

/// Rectilinear partition of a compact box X. Cell faces include every
/// region-of-interest face, so labels are constant on each cell. State id
/// `cellCount()` stands for everything outside X.
class Partition {
   public:
    Partition() = default;

    std::size_t dimension() const { return bounds.dimension(); }
    Box const& domain() const { return bounds; }
    std::size_t cellCount() const { return cells.size(); }
    /// Cells plus the Outside state.
    std::size_t stateCount() const { return cells.size() + 1; }
    int outsideId() const { return static_cast<int>(cells.size()); }
    Region const& cell(int id) const { return cells.at(static_cast<std::size_t>(id)); }
    std::vector<Region> const& allCells() const { return cells; }
    ltlf::PropositionSet const& propositions() const { return ap; }
    std::vector<RegionOfInterest> const& regionsOfInterest() const { return rois; }
    std::vector<Vector> const& breakpoints() const { return faces; }

    /// Cell containing x, or outsideId(). Points on shared faces go to the
    /// cell with the lexicographically smallest lower corner.
    int locate(Vector const& x) const;
    /// Label of a point from the regions of interest (closed boxes).
    ltlf::Symbol labelOf(Vector const& x) const;
    /// Cells whose grid index is within `radius` (Chebyshev) of `cellId`.
    std::vector<int> neighbourhood(int cellId, int radius) const;
    /// Ids of cells whose box intersects `box`.
    std::vector<int> cellsIntersecting(Box const& box) const;

    friend Partition buildPartition(Box const& bounds, std::vector<int> const& cellsPerDim, std::vector<RegionOfInterest> const& regions,
                                    std::size_t maxCells);

   private:
    std::vector<std::size_t> gridIndex(int cellId) const;
    int cellFromGrid(std::vector<std::size_t> const& idx) const;
    /// Ids of the grid block lo..hi (inclusive), ascending.
    std::vector<int> cellsInBlock(std::vector<std::size_t> const& lo, std::vector<std::size_t> const& hi) const;

    Box bounds;
    std::vector<Vector> faces;
    std::vector<std::size_t> strides;
    std::vector<Region> cells;
    std::vector<RegionOfInterest> rois;
    ltlf::PropositionSet ap;
};

/// Uniform grid over `bounds`, split along every region-of-interest face.
/// Throws ModelError for regions outside bounds and CapacityError above maxCells.
Partition buildPartition(Box const& bounds, std::vector<int> const& cellsPerDim, std::vector<RegionOfInterest> const& regions,
                         std::size_t maxCells = 100000);

enum class NoiseKind { Gaussian, Uniform };

/// Componentwise independent additive noise. For Uniform, `scale` is the
/// half-width of the support.
struct NoiseModel {
    NoiseKind kind = NoiseKind::Gaussian;
    Vector scale;

    double centralProbability(std::size_t dim, double eta) const;
};

/// prod_i P[|w_i| <= eta_i].
double noiseBoxProb(NoiseModel const& noise, Vector const& eta);

/// Over-approximation of the image of `region` under the mean dynamics.
Box imageBox(gp::ActionModel const& model, Box const& region);

struct TransitionInterval {
    double lower = 0.0;
    double upper = 0.0;
};

/// Interval bound for one destination. `destination` is the destination
/// cell, or nullptr for the Outside state (complement of `domain`).
///   upper = (I[image meets dest grown by eps+eta] * noiseProb + (1 - noiseProb)) * errProb + (1 - errProb)
///   lower = I[image inside dest shrunk by eps+eta] * errProb * noiseProb
TransitionInterval transitionBounds(Box const* destination, Box const& domain, Box const& image, Vector const& epsilon,
                                    Vector const& eta, double errProb, double noiseProb);

/// Candidate confidences and noise radii tried per (source, action).
struct BoundsGrid {
    std::vector<double> deltas{0.2, 0.1, 0.05, 0.01};
    /// Multiples of the per-dimension noise scale.
    std::vector<double> etaMultiples{1.0, 2.0, 3.0};
};

/// What the row computation needs to know about the source.
struct SourceBounds {
    Box image;
    /// Per-dimension sup of the posterior std over the source.
    Vector supStd;
};

SourceBounds sourceBounds(gp::ActionModel const& model, Box const& source);

/// Full row for a fixed (delta, eta-multiple) choice.
struct RowChoice {
    double delta = 0.0;
    double etaMultiple = 0.0;
};

Row computeRow(Partition const& partition, gp::ActionModel const& model, SourceBounds const& source, NoiseModel const& noise,
               RowChoice choice);

/// Searches the grid for the row with the largest sum of lower bounds; ties
/// go to the smallest sum of upper bounds, then to the first grid entry.
Row bestRow(Partition const& partition, gp::ActionModel const& model, SourceBounds const& source, NoiseModel const& noise,
            BoundsGrid const& grid, RowChoice* chosen = nullptr);

/// IMDP over the partition cells plus an absorbing Outside state.
Imdp buildImdp(Partition const& partition, gp::ModelSet const& models, NoiseModel const& noise, BoundsGrid const& grid);

}  // namespace gpimdp::abstraction
