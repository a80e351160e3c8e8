#pragma once

#include <cstddef>
#include <vector>

namespace gpimdp {

using Vector = std::vector<double>;

/// Closed axis-aligned box [lower, upper] in R^n. An empty box has
/// lower[i] > upper[i] in at least one dimension.
struct Box {
    Vector lower;
    Vector upper;

    Box() = default;
    Box(Vector lo, Vector hi);

    static Box point(Vector const& x);

    std::size_t dimension() const { return lower.size(); }
    bool empty() const;
    bool contains(Vector const& x) const;
    bool contains(Box const& other) const;
    bool intersects(Box const& other) const;
    Vector center() const;
    Vector width() const;

    /// Grows (or, for negative entries, shrinks) each face by `amount[i]`.
    Box expanded(Vector const& amount) const;
    Box shrunk(Vector const& amount) const;

    bool operator==(Box const&) const = default;
};

}  // namespace gpimdp
