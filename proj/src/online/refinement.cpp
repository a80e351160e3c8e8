#include <algorithm>

#include "gpimdp/errors.h"
#include "gpimdp/online.h"

namespace gpimdp::online {

std::size_t refineTransitions(Imdp& imdp, abstraction::Partition const& partition, gp::ActionModel const& model, std::vector<int> const& neighbourhood,
                              abstraction::NoiseModel const& noise, abstraction::BoundsGrid const& grid, RefinementLog& log, std::size_t step) {
    std::size_t const destinations = imdp.stateCount();
    auto const action = static_cast<std::size_t>(model.action);
    if (action >= imdp.actionCount()) throw ModelError("online", "model action outside the IMDP");
    std::size_t acceptedTotal = 0;
    for (int q : neighbourhood) {
        if (q < 0 || q >= static_cast<int>(partition.cellCount())) continue;
        auto const source = static_cast<std::size_t>(q);
        auto const candidate = abstraction::bestRow(partition, model, abstraction::sourceBounds(model, partition.cell(q).box), noise, grid);
        auto const current = imdp.row(source, action).dense(destinations);
        auto const proposed = candidate.dense(destinations);

        auto merged = current;
        std::vector<RefinementRecord> records;
        std::size_t rejected = 0;
        for (std::size_t d = 0; d < destinations; ++d) {
            Entry const& oldE = current[d];
            Entry const& newE = proposed[d];
            ++log.attempted;
            if (oldE.lower == newE.lower && oldE.upper == newE.upper) continue;
            if (newE.lower >= oldE.lower && newE.upper <= oldE.upper) {
                merged[d] = newE;
                records.push_back({static_cast<std::uint32_t>(q), static_cast<std::uint32_t>(action), static_cast<std::uint32_t>(d),
                                   {oldE.lower, oldE.upper}, {newE.lower, newE.upper}, step});
            } else {
                ++rejected;
            }
        }
        log.rejected += rejected;
        if (records.empty()) continue;
        Row mergedRow = Row::fromDense(merged);
        if (!mergedRow.wellFormed(destinations)) {
            ++log.rejectedRows;
            continue;
        }
        imdp.setRow(source, action, std::move(mergedRow));
        acceptedTotal += records.size();
        log.accepted.insert(log.accepted.end(), records.begin(), records.end());
    }
    return acceptedTotal;
}

namespace {

std::vector<std::size_t> nestingBreaks(synthesis::ValueResult const& fresh, synthesis::ValueResult const& previous, double slack) {
    std::vector<std::size_t> out;
    for (std::size_t s = 0; s < fresh.lower.size(); ++s) {
        if (fresh.lower[s] < previous.lower[s] - slack || fresh.upper[s] > previous.upper[s] + slack) out.push_back(s);
    }
    return out;
}

}  // namespace

synthesis::ValueResult resynthesize(Pimdp const& p, synthesis::ValueResult const& previous, synthesis::SolverOptions const& options, double slack,
                                    std::size_t* reverted) {
    if (previous.strategy.size() != p.stateCount()) throw ModelError("online", "previous strategy does not match the product");
    auto result = synthesis::synthesize(p, options);
    auto const fresh = result.strategy;
    std::size_t count = 0;
    while (true) {
        auto const broken = nestingBreaks(result, previous, slack);
        if (broken.empty()) break;
        auto strategy = result.strategy;
        bool changed = false;
        for (auto s : broken) {
            if (strategy[s] != previous.strategy[s]) {
                strategy[s] = previous.strategy[s];
                ++count;
                changed = true;
            }
        }
        if (!changed) {
            // Reverting individual states was not enough: keep the previous
            // strategy, whose intervals can only tighten on a refined model.
            result = synthesis::satisfactionIntervals(p, previous.strategy, options, &previous.lower);
            count = 0;
            for (std::size_t s = 0; s < p.stateCount(); ++s) count += fresh[s] != previous.strategy[s] ? 1 : 0;
            break;
        }
        result = synthesis::satisfactionIntervals(p, strategy, options);
    }
    if (reverted) *reverted = count;
    return result;
}

}  // namespace gpimdp::online
