#include <algorithm>
#include <cmath>

#include "gpimdp/abstraction.h"
#include "gpimdp/errors.h"

namespace gpimdp::abstraction {

Partition buildPartition(Box const& bounds, std::vector<int> const& cellsPerDim, std::vector<RegionOfInterest> const& regions, std::size_t maxCells) {
    std::size_t const n = bounds.dimension();
    if (n == 0) throw ModelError("abstraction", "state space has dimension 0");
    if (bounds.empty()) throw ModelError("abstraction", "state space box is empty");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(bounds.upper[i] > bounds.lower[i])) throw ModelError("abstraction", "state space box is degenerate in dimension " + std::to_string(i));
    }
    if (cellsPerDim.size() != n) throw ModelError("abstraction", "need one cell count per dimension");

    Partition p;
    p.bounds = bounds;
    p.rois = regions;
    std::vector<std::string> names;
    for (auto const& r : regions) {
        if (std::find(names.begin(), names.end(), r.proposition) == names.end()) names.push_back(r.proposition);
        for (auto const& b : r.boxes) {
            if (b.dimension() != n) throw ModelError("abstraction", "region '" + r.proposition + "' has the wrong dimension");
            if (b.empty() || !bounds.contains(b)) throw ModelError("abstraction", "region '" + r.proposition + "' is empty or leaves the state space");
        }
    }
    p.ap = ltlf::PropositionSet(names);

    std::size_t total = 1;
    p.faces.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (cellsPerDim[i] < 1) throw ModelError("abstraction", "cell counts must be positive");
        double const lo = bounds.lower[i];
        double const hi = bounds.upper[i];
        double const tol = 1e-9 * (hi - lo);
        Vector f;
        for (int k = 0; k <= cellsPerDim[i]; ++k) f.push_back(k == cellsPerDim[i] ? hi : lo + (hi - lo) * k / cellsPerDim[i]);
        for (auto const& r : regions) {
            for (auto const& b : r.boxes) {
                f.push_back(b.lower[i]);
                f.push_back(b.upper[i]);
            }
        }
        std::sort(f.begin(), f.end());
        Vector merged;
        for (double v : f) {
            if (merged.empty() || v - merged.back() > tol) {
                merged.push_back(v);
            } else if (v == hi) {
                merged.back() = hi;
            }
        }
        total *= merged.size() - 1;
        if (total > maxCells) throw CapacityError("abstraction", "partition exceeds the limit of " + std::to_string(maxCells) + " cells");
        p.faces[i] = std::move(merged);
    }

    p.strides.assign(n, 1);
    for (std::size_t i = n - 1; i-- > 0;) p.strides[i] = p.strides[i + 1] * (p.faces[i + 1].size() - 1);

    p.cells.reserve(total);
    for (std::size_t id = 0; id < total; ++id) {
        auto const idx = p.gridIndex(static_cast<int>(id));
        Vector lo(n), hi(n);
        for (std::size_t i = 0; i < n; ++i) {
            lo[i] = p.faces[i][idx[i]];
            hi[i] = p.faces[i][idx[i] + 1];
        }
        Box box(lo, hi);
        ltlf::Symbol const label = p.labelOf(box.center());
        p.cells.push_back({static_cast<int>(id), std::move(box), label});
    }
    return p;
}

std::vector<std::size_t> Partition::gridIndex(int cellId) const {
    std::vector<std::size_t> idx(dimension());
    auto rest = static_cast<std::size_t>(cellId);
    for (std::size_t i = 0; i < dimension(); ++i) {
        idx[i] = rest / strides[i];
        rest %= strides[i];
    }
    return idx;
}

int Partition::cellFromGrid(std::vector<std::size_t> const& idx) const {
    std::size_t id = 0;
    for (std::size_t i = 0; i < dimension(); ++i) id += idx[i] * strides[i];
    return static_cast<int>(id);
}

std::vector<int> Partition::cellsInBlock(std::vector<std::size_t> const& lo, std::vector<std::size_t> const& hi) const {
    std::size_t const n = dimension();
    std::vector<int> out;
    std::vector<std::size_t> idx = lo;
    while (true) {
        out.push_back(cellFromGrid(idx));
        std::size_t d = n;
        while (d-- > 0) {
            if (idx[d] < hi[d]) {
                ++idx[d];
                break;
            }
            idx[d] = lo[d];
        }
        if (d == static_cast<std::size_t>(-1)) break;
    }
    return out;
}

int Partition::locate(Vector const& x) const {
    if (x.size() != dimension()) throw ModelError("abstraction", "point dimension mismatch");
    if (!bounds.contains(x)) return outsideId();
    std::vector<std::size_t> idx(dimension());
    for (std::size_t i = 0; i < dimension(); ++i) {
        auto const& f = faces[i];
        auto const k = std::lower_bound(f.begin(), f.end(), x[i]) - f.begin();
        idx[i] = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(k - 1, 0, static_cast<std::ptrdiff_t>(f.size()) - 2));
    }
    return cellFromGrid(idx);
}

ltlf::Symbol Partition::labelOf(Vector const& x) const {
    ltlf::Symbol label = 0;
    for (auto const& r : rois) {
        int const bit = ap.find(r.proposition);
        for (auto const& b : r.boxes) {
            if (b.contains(x)) label |= 1u << bit;
        }
    }
    return label;
}

std::vector<int> Partition::neighbourhood(int cellId, int radius) const {
    if (cellId < 0 || cellId >= static_cast<int>(cells.size())) return {};
    auto const centre = gridIndex(cellId);
    std::size_t const n = dimension();
    std::vector<std::size_t> lo(n), hi(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto const r = static_cast<std::size_t>(std::max(radius, 0));
        lo[i] = centre[i] >= r ? centre[i] - r : 0;
        hi[i] = std::min(centre[i] + r, faces[i].size() - 2);
    }
    return cellsInBlock(lo, hi);
}

std::vector<int> Partition::cellsIntersecting(Box const& box) const {
    std::size_t const n = dimension();
    if (box.empty() || !box.intersects(bounds)) return {};
    std::vector<std::size_t> lo(n), hi(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto const& f = faces[i];
        // First interval whose upper face reaches box.lower, last whose lower face is below box.upper.
        auto const first = std::lower_bound(f.begin() + 1, f.end(), box.lower[i]) - f.begin() - 1;
        auto const last = std::upper_bound(f.begin(), f.end() - 1, box.upper[i]) - f.begin() - 1;
        lo[i] = static_cast<std::size_t>(std::max<std::ptrdiff_t>(first, 0));
        hi[i] = static_cast<std::size_t>(std::min<std::ptrdiff_t>(last, static_cast<std::ptrdiff_t>(f.size()) - 2));
        if (lo[i] > hi[i]) return {};
    }
    return cellsInBlock(lo, hi);
}

}  // namespace gpimdp::abstraction
