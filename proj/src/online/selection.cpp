#include <algorithm>
#include <cmath>
#include <limits>

#include "gpimdp/errors.h"
#include "gpimdp/online.h"

namespace gpimdp::online {

AugmentedState augment(Vector const& x, std::uint32_t dfaState, gp::ModelSet const& models, abstraction::Partition const& partition, Pimdp const& pimdp,
                       abstraction::NoiseModel const& noise, abstraction::BoundsGrid const& grid) {
    int const cell = partition.locate(x);
    if (cell == partition.outsideId()) throw ModelError("online", "state lies outside the partition domain");
    if (dfaState >= pimdp.dfa().stateCount()) throw ModelError("online", "automaton state out of range");
    AugmentedState a;
    a.x = x;
    a.dfaState = dfaState;
    a.successorDfa = pimdp.successorDfaState(dfaState, partition.cell(cell).label);
    for (auto const& model : models) {
        abstraction::SourceBounds sb{Box::point(model.predictMean(x)), {}};
        for (auto const& g : model.dims) sb.supStd.push_back(g.posterior(x).std);
        abstraction::RowChoice choice;
        a.rows.push_back(abstraction::bestRow(partition, model, sb, noise, grid, &choice));
        a.choices.push_back(choice);
    }
    return a;
}

namespace {

constexpr double infiniteDistance = std::numeric_limits<double>::infinity();

struct Layer {
    std::vector<double> values;
    std::vector<std::uint32_t> asc;
    std::vector<std::uint32_t> desc;

    synthesis::DestinationValues view() const { return {values, asc, desc}; }
};

Layer makeLayer(std::vector<double> values) {
    Layer l{std::move(values), {}, {}};
    synthesis::sortDestinations(l.values, l.asc, l.desc);
    return l;
}

// Worst-case expected distance over the nominal destinations of a row.
double nominalDistance(Row const& row, std::vector<double> const& distance) {
    std::vector<double> values, lower, upper;
    for (auto const& e : row.entries) {
        if (!e.nominal || e.upper <= 0.0) continue;
        if (std::isinf(distance[e.dest])) return infiniteDistance;
        values.push_back(distance[e.dest]);
        lower.push_back(e.lower);
        upper.push_back(e.upper);
    }
    if (values.empty()) return infiniteDistance;
    double lowSum = 0.0;
    double upSum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        lowSum += lower[i];
        upSum += upper[i];
    }
    // The nominal sub-row is renormalised to a distribution when its bounds allow.
    if (lowSum > 1.0 || upSum < 1.0) return *std::max_element(values.begin(), values.end());
    return synthesis::extremalExpectation(values, lower, upper, synthesis::Extremum::Maximize);
}

}  // namespace

std::vector<ActionScore> scoreActions(AugmentedState const& a, Pimdp const& pimdp, synthesis::ValueResult const& values,
                                      std::vector<std::uint32_t> const& distances) {
    std::size_t const cells = pimdp.imdp().stateCount();
    auto const outside = pimdp.imdp().outsideState();
    ltlf::Dfa const& dfa = pimdp.dfa();
    std::uint32_t const z = a.successorDfa;

    std::vector<double> lower(cells, 0.0), upper(cells, 0.0), doomed(cells, 0.0), dist(cells, infiniteDistance);
    for (std::uint32_t q = 0; q < cells; ++q) {
        bool const violating = (outside && q == *outside) || dfa.isSink(z);
        doomed[q] = violating || dfa.isSink(dfa.successor(z, pimdp.imdp().label(q))) ? 1.0 : 0.0;
        auto const t = pimdp.index(q, z);
        if (t == noState) continue;
        lower[q] = values.lower.at(t);
        upper[q] = values.upper.at(t);
        if (distances.at(t) != ltlf::unreachableDistance) dist[q] = distances[t];
    }
    Layer const lowerLayer = makeLayer(std::move(lower));
    Layer const upperLayer = makeLayer(std::move(upper));
    Layer const doomedLayer = makeLayer(std::move(doomed));

    std::vector<ActionScore> scores;
    for (std::size_t u = 0; u < a.rows.size(); ++u) {
        Row const& row = a.rows[u];
        ActionScore s;
        s.action = static_cast<int>(u);
        s.lower = synthesis::extremalExpectation(row, lowerLayer.view(), synthesis::Extremum::Minimize);
        s.upper = synthesis::extremalExpectation(row, upperLayer.view(), synthesis::Extremum::Minimize);
        s.sinkRisk = synthesis::extremalExpectation(row, doomedLayer.view(), synthesis::Extremum::Maximize);
        s.distance = nominalDistance(row, dist);
        scores.push_back(s);
    }
    return scores;
}

int chooseAction(std::vector<ActionScore> const& scores, SelectionOptions const& options) {
    if (scores.empty()) throw ModelError("online", "no actions to choose from");
    std::vector<ActionScore> pool(scores);
    auto keepBest = [&](auto key, bool maximize) {
        double best = maximize ? -infiniteDistance : infiniteDistance;
        for (auto const& s : pool) best = maximize ? std::max(best, key(s)) : std::min(best, key(s));
        std::erase_if(pool, [&](ActionScore const& s) {
            double const v = key(s);
            if (v == best) return false;
            return maximize ? v < best - options.tieTolerance : v > best + options.tieTolerance;
        });
    };
    keepBest([](ActionScore const& s) { return s.lower; }, true);
    keepBest([](ActionScore const& s) { return s.upper; }, true);
    if (options.useSinkMetric) keepBest([](ActionScore const& s) { return s.sinkRisk; }, false);
    if (options.useProgressMetric) keepBest([](ActionScore const& s) { return s.distance; }, false);
    return std::min_element(pool.begin(), pool.end(), [](auto const& x, auto const& y) { return x.action < y.action; })->action;
}

Selection selectAction(AugmentedState const& a, Pimdp const& pimdp, synthesis::ValueResult const& values, std::vector<std::uint32_t> const& distances,
                       SelectionOptions const& options) {
    Selection sel;
    sel.scores = scoreActions(a, pimdp, values, distances);
    sel.action = chooseAction(sel.scores, options);
    return sel;
}

}  // namespace gpimdp::online
