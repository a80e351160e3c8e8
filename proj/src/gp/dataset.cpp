#include <algorithm>
#include <cmath>

#include "gpimdp/errors.h"
#include "gpimdp/gp.h"

namespace gpimdp::gp {

void Dataset::add(Sample s) {
    if (s.x.size() != dim || s.next.size() != dim) {
        throw ModelError("gp", "sample dimension " + std::to_string(s.x.size()) + "/" + std::to_string(s.next.size()) + " does not match state dimension " +
                                   std::to_string(dim));
    }
    if (s.action < 0 || s.action >= numActions) {
        throw ModelError("gp", "action id " + std::to_string(s.action) + " outside [0, " + std::to_string(numActions) + ")");
    }
    samples.push_back(std::move(s));
}

std::size_t Dataset::countFor(int action) const {
    return static_cast<std::size_t>(std::count_if(samples.begin(), samples.end(), [&](Sample const& s) { return s.action == action; }));
}

std::vector<std::size_t> Dataset::indicesFor(int action) const {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].action == action) rows.push_back(i);
    }
    return rows;
}

std::vector<std::size_t> nearestSamples(Dataset const& data, Vector const& x, int action, std::size_t count) {
    if (x.size() != data.stateDimension()) throw ModelError("gp", "query point dimension mismatch");
    std::vector<std::pair<double, std::size_t>> cand;
    for (std::size_t i = 0; i < data.size(); ++i) {
        Sample const& s = data[i];
        if (s.action != action) continue;
        double d2 = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) d2 += (s.x[k] - x[k]) * (s.x[k] - x[k]);
        cand.emplace_back(d2, i);
    }
    std::size_t const keep = std::min(count, cand.size());
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(keep), cand.end());
    std::vector<std::size_t> rows(keep);
    for (std::size_t i = 0; i < keep; ++i) rows[i] = cand[i].second;
    std::sort(rows.begin(), rows.end());
    return rows;
}

}  // namespace gpimdp::gp
