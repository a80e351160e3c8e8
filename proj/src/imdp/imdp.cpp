#include "gpimdp/imdp.h"

#include <algorithm>
#include <map>

#include <nlohmann/json.hpp>

#include "gpimdp/errors.h"

namespace gpimdp {

Entry const* Row::find(std::uint32_t dest) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), dest, [](Entry const& e, std::uint32_t d) { return e.dest < d; });
    return it != entries.end() && it->dest == dest ? &*it : nullptr;
}

Entry Row::at(std::uint32_t dest) const {
    if (auto const* e = find(dest)) return *e;
    return {dest, 0.0, tailUpper, false};
}

double Row::lowerSum() const {
    double s = 0.0;
    for (auto const& e : entries) s += e.lower;
    return s;
}

double Row::upperSum(std::size_t destinations) const {
    double s = 0.0;
    for (auto const& e : entries) s += e.upper;
    return s + static_cast<double>(destinations - std::min(destinations, entries.size())) * tailUpper;
}

bool Row::wellFormed(std::size_t destinations, double slack) const {
    if (tailUpper < -slack || tailUpper > 1.0 + slack) return false;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        auto const& e = entries[i];
        if (e.dest >= destinations) return false;
        if (i > 0 && entries[i - 1].dest >= e.dest) return false;
        if (e.lower < -slack || e.upper > 1.0 + slack || e.lower > e.upper + slack) return false;
    }
    return lowerSum() <= 1.0 + slack && upperSum(destinations) >= 1.0 - slack;
}

std::vector<Entry> Row::dense(std::size_t destinations) const {
    std::vector<Entry> out(destinations);
    for (std::uint32_t d = 0; d < destinations; ++d) out[d] = {d, 0.0, tailUpper, false};
    for (auto const& e : entries) out.at(e.dest) = e;
    return out;
}

Row Row::fromDense(std::vector<Entry> const& dense) {
    std::map<double, std::size_t> counts;
    for (auto const& e : dense) {
        if (e.lower == 0.0 && !e.nominal) ++counts[e.upper];
    }
    Row r;
    std::size_t bestCount = 0;
    for (auto const& [u, c] : counts) {
        if (c > bestCount) {
            bestCount = c;
            r.tailUpper = u;
        }
    }
    for (std::uint32_t d = 0; d < dense.size(); ++d) {
        Entry e = dense[d];
        e.dest = d;
        if (e.lower == 0.0 && !e.nominal && e.upper == r.tailUpper && bestCount > 0) continue;
        r.entries.push_back(e);
    }
    return r;
}

Imdp::Imdp(std::size_t states, std::size_t actions, ltlf::PropositionSet propositions)
    : numStates(states), numActions(actions), ap(std::move(propositions)), rows(states * actions), labels(states, 0) {
    if (states == 0 || actions == 0) throw ModelError("imdp", "an IMDP needs at least one state and one action");
}

void Imdp::validate(double slack) const {
    for (std::size_t s = 0; s < numStates; ++s) {
        for (std::size_t a = 0; a < numActions; ++a) {
            Row const& r = row(s, a);
            if (!r.wellFormed(numStates, slack)) {
                throw ModelError("imdp", "row (state " + std::to_string(s) + ", action " + std::to_string(a) + ") is not a valid interval row: lower sum " +
                                             std::to_string(r.lowerSum()) + ", upper sum " + std::to_string(r.upperSum(numStates)));
            }
        }
    }
}

nlohmann::json Imdp::toJson() const {
    nlohmann::json j;
    j["states"] = numStates;
    j["actions"] = numActions;
    j["propositions"] = ap.names();
    j["labels"] = labels;
    if (outside) j["outside"] = *outside;
    auto& trans = j["transitions"] = nlohmann::json::array();
    auto& tails = j["tail_upper"] = nlohmann::json::array();
    for (std::size_t s = 0; s < numStates; ++s) {
        for (std::size_t a = 0; a < numActions; ++a) {
            Row const& r = row(s, a);
            for (auto const& e : r.entries) trans.push_back({s, a, e.dest, e.lower, e.upper, e.nominal});
            if (r.tailUpper > 0.0) tails.push_back({s, a, r.tailUpper});
        }
    }
    if (!boxes.empty()) {
        auto& bs = j["boxes"] = nlohmann::json::array();
        for (auto const& b : boxes) bs.push_back({{"lower", b.lower}, {"upper", b.upper}});
    }
    return j;
}

Imdp Imdp::fromJson(nlohmann::json const& j) {
    try {
        Imdp m(j.at("states").get<std::size_t>(), j.at("actions").get<std::size_t>(), ltlf::PropositionSet(j.at("propositions").get<std::vector<std::string>>()));
        auto const labels = j.at("labels").get<std::vector<ltlf::Symbol>>();
        if (labels.size() != m.numStates) throw ModelError("imdp", "label count does not match state count");
        m.labels = labels;
        if (j.contains("outside")) m.outside = j["outside"].get<std::size_t>();
        auto checkIndex = [&](std::size_t s, std::size_t a) {
            if (s >= m.numStates || a >= m.numActions) throw ModelError("imdp", "transition index out of range");
        };
        for (auto const& t : j.at("transitions")) {
            auto const s = t.at(0).get<std::size_t>();
            auto const a = t.at(1).get<std::size_t>();
            checkIndex(s, a);
            m.rows[s * m.numActions + a].entries.push_back(
                {t.at(2).get<std::uint32_t>(), t.at(3).get<double>(), t.at(4).get<double>(), t.size() > 5 && t.at(5).get<bool>()});
        }
        for (auto const& t : j.at("tail_upper")) {
            auto const s = t.at(0).get<std::size_t>();
            auto const a = t.at(1).get<std::size_t>();
            checkIndex(s, a);
            m.rows[s * m.numActions + a].tailUpper = t.at(2).get<double>();
        }
        for (auto& r : m.rows) std::sort(r.entries.begin(), r.entries.end(), [](Entry const& x, Entry const& y) { return x.dest < y.dest; });
        if (j.contains("boxes")) {
            for (auto const& b : j["boxes"]) m.boxes.emplace_back(b.at("lower").get<Vector>(), b.at("upper").get<Vector>());
        }
        return m;
    } catch (nlohmann::json::exception const& e) {
        throw ModelError("imdp", std::string("malformed IMDP JSON: ") + e.what());
    }
}

}  // namespace gpimdp
