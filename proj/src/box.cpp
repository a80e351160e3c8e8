#include "gpimdp/box.h"

#include <algorithm>

#include "gpimdp/errors.h"

namespace gpimdp {

Box::Box(Vector lo, Vector hi) : lower(std::move(lo)), upper(std::move(hi)) {
    if (lower.size() != upper.size()) {
        throw ModelError("box", "corner dimensions differ");
    }
}

Box Box::point(Vector const& x) { return Box(x, x); }

bool Box::empty() const {
    for (std::size_t i = 0; i < lower.size(); ++i) {
        if (lower[i] > upper[i]) return true;
    }
    return false;
}

bool Box::contains(Vector const& x) const {
    for (std::size_t i = 0; i < lower.size(); ++i) {
        if (x[i] < lower[i] || x[i] > upper[i]) return false;
    }
    return true;
}

bool Box::contains(Box const& other) const {
    if (other.empty()) return true;
    if (empty()) return false;
    for (std::size_t i = 0; i < lower.size(); ++i) {
        if (other.lower[i] < lower[i] || other.upper[i] > upper[i]) return false;
    }
    return true;
}

bool Box::intersects(Box const& other) const {
    if (empty() || other.empty()) return false;
    for (std::size_t i = 0; i < lower.size(); ++i) {
        if (std::max(lower[i], other.lower[i]) > std::min(upper[i], other.upper[i])) return false;
    }
    return true;
}

Vector Box::center() const {
    Vector c(lower.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = 0.5 * (lower[i] + upper[i]);
    return c;
}

Vector Box::width() const {
    Vector w(lower.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = upper[i] - lower[i];
    return w;
}

Box Box::expanded(Vector const& amount) const {
    Box b = *this;
    for (std::size_t i = 0; i < lower.size(); ++i) {
        b.lower[i] -= amount[i];
        b.upper[i] += amount[i];
    }
    return b;
}

Box Box::shrunk(Vector const& amount) const {
    Vector neg(amount.size());
    std::transform(amount.begin(), amount.end(), neg.begin(), [](double a) { return -a; });
    return expanded(neg);
}

}  // namespace gpimdp
