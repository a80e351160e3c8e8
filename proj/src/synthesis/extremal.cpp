#include <algorithm>
#include <numeric>

#include "gpimdp/errors.h"
#include "gpimdp/synthesis.h"

namespace gpimdp::synthesis {

namespace {

constexpr double feasibilitySlack = 1e-9;

std::vector<std::size_t> order(std::span<double const> values, Extremum mode) {
    std::vector<std::size_t> idx(values.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return mode == Extremum::Minimize ? values[a] < values[b] : values[a] > values[b];
    });
    return idx;
}

}  // namespace

std::vector<double> extremalDistribution(std::span<double const> values, std::span<double const> lower, std::span<double const> upper,
                                         Extremum mode) {
    if (values.size() != lower.size() || values.size() != upper.size()) throw ModelError("synthesis", "row vectors have different lengths");
    double lowSum = 0.0;
    double upSum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (lower[i] > upper[i] + feasibilitySlack) throw ModelError("synthesis", "lower bound above upper bound");
        lowSum += lower[i];
        upSum += upper[i];
    }
    if (lowSum > 1.0 + feasibilitySlack || upSum < 1.0 - feasibilitySlack) throw ModelError("synthesis", "row admits no distribution");
    std::vector<double> p(lower.begin(), lower.end());
    double remaining = 1.0 - lowSum;
    for (std::size_t i : order(values, mode)) {
        if (remaining <= 0.0) break;
        double const add = std::min(std::max(upper[i] - lower[i], 0.0), remaining);
        p[i] += add;
        remaining -= add;
    }
    return p;
}

double extremalExpectation(std::span<double const> values, std::span<double const> lower, std::span<double const> upper, Extremum mode) {
    auto const p = extremalDistribution(values, lower, upper, mode);
    double e = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) e += p[i] * values[i];
    return e;
}

void sortDestinations(std::span<double const> values, std::vector<std::uint32_t>& ascending, std::vector<std::uint32_t>& descending) {
    ascending.resize(values.size());
    std::iota(ascending.begin(), ascending.end(), 0u);
    descending = ascending;
    std::stable_sort(ascending.begin(), ascending.end(), [&](std::uint32_t a, std::uint32_t b) { return values[a] < values[b]; });
    std::stable_sort(descending.begin(), descending.end(), [&](std::uint32_t a, std::uint32_t b) { return values[a] > values[b]; });
}

double extremalExpectation(Row const& row, DestinationValues const& dest, Extremum mode) {
    double expectation = 0.0;
    double remaining = 1.0;
    for (auto const& e : row.entries) {
        expectation += e.lower * dest.values[e.dest];
        remaining -= e.lower;
    }
    if (remaining < -feasibilitySlack) throw ModelError("synthesis", "row admits no distribution");
    auto const ordered = mode == Extremum::Minimize ? dest.ascending : dest.descending;
    for (std::uint32_t d : ordered) {
        if (remaining <= 0.0) break;
        Entry const* e = row.find(d);
        double const slack = e ? std::max(e->upper - e->lower, 0.0) : row.tailUpper;
        double const add = std::min(slack, remaining);
        expectation += add * dest.values[d];
        remaining -= add;
    }
    if (remaining > feasibilitySlack) throw ModelError("synthesis", "row admits no distribution");
    return expectation;
}

}  // namespace gpimdp::synthesis
