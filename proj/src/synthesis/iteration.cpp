#include <algorithm>
#include <cmath>
#include <deque>

#include "gpimdp/errors.h"
#include "gpimdp/synthesis.h"

namespace gpimdp::synthesis {

LayeredValues::LayeredValues(Pimdp const& p, std::vector<double> const& values) : cells(p.imdp().stateCount()) {
    std::size_t const zs = p.dfa().stateCount();
    dense.assign(zs * cells, 0.0);
    for (std::size_t s = 0; s < p.stateCount(); ++s) {
        auto const st = p.state(s);
        dense[st.dfa * cells + st.cell] = values[s];
    }
    asc.resize(zs * cells);
    desc.resize(zs * cells);
    std::vector<std::uint32_t> a, d;
    for (std::size_t z = 0; z < zs; ++z) {
        sortDestinations(std::span<double const>(dense.data() + z * cells, cells), a, d);
        std::copy(a.begin(), a.end(), asc.begin() + static_cast<std::ptrdiff_t>(z * cells));
        std::copy(d.begin(), d.end(), desc.begin() + static_cast<std::ptrdiff_t>(z * cells));
    }
}

DestinationValues LayeredValues::layer(std::uint32_t dfaState) const {
    std::size_t const off = dfaState * cells;
    return {std::span<double const>(dense.data() + off, cells), std::span<std::uint32_t const>(asc.data() + off, cells),
            std::span<std::uint32_t const>(desc.data() + off, cells)};
}

namespace {

bool terminal(Pimdp const& p, std::size_t s) { return p.isAccepting(s) || p.isViolating(s); }

std::vector<double> initialValues(Pimdp const& p) {
    std::vector<double> v(p.stateCount(), 0.0);
    for (std::size_t s = 0; s < p.stateCount(); ++s) v[s] = p.isAccepting(s) ? 1.0 : 0.0;
    return v;
}

Extremum adversary(Mode m) { return m == Mode::Pessimistic ? Extremum::Minimize : Extremum::Maximize; }

// Jacobi sweeps of v <- max(v, B(v)) for a fixed strategy (or the best
// action when strategy is null) until the sup-norm change drops below tol.
struct Sweep {
    std::vector<double> values;
    std::vector<int> argmax;
    std::size_t iterations = 0;
    double residual = 0.0;
    bool converged = false;
};

Sweep iterate(Pimdp const& p, Extremum adv, std::vector<int> const* strategy, std::vector<double> start, bool monotone, SolverOptions const& options) {
    Sweep out;
    out.values = std::move(start);
    out.argmax.assign(p.stateCount(), -1);
    std::vector<double> next(out.values);
    while (out.iterations < options.maxIterations) {
        LayeredValues const layers(p, out.values);
        double residual = 0.0;
        for (std::size_t s = 0; s < p.stateCount(); ++s) {
            if (terminal(p, s)) continue;
            auto const dest = layers.layer(p.successorDfaState(s));
            double best = -1.0;
            int bestAction = -1;
            if (strategy) {
                int const a = (*strategy)[s];
                if (a < 0 || static_cast<std::size_t>(a) >= p.actionCount()) throw ModelError("synthesis", "strategy has no valid action for state " + std::to_string(s));
                best = extremalExpectation(p.row(s, static_cast<std::size_t>(a)), dest, adv);
                bestAction = a;
            } else {
                for (std::size_t a = 0; a < p.actionCount(); ++a) {
                    double const q = extremalExpectation(p.row(s, a), dest, adv);
                    if (q > best) {
                        best = q;
                        bestAction = static_cast<int>(a);
                    }
                }
            }
            if (monotone) best = std::max(best, out.values[s]);
            best = std::clamp(best, 0.0, 1.0);
            residual = std::max(residual, std::abs(best - out.values[s]));
            next[s] = best;
            out.argmax[s] = bestAction;
        }
        out.values.swap(next);
        ++out.iterations;
        out.residual = residual;
        if (residual < options.tolerance) {
            out.converged = true;
            break;
        }
    }
    return out;
}

}  // namespace

double actionValue(Pimdp const& p, std::size_t s, std::size_t action, std::vector<double> const& values, Extremum mode) {
    std::size_t const cells = p.imdp().stateCount();
    std::uint32_t const z = p.successorDfaState(s);
    std::vector<double> layer(cells, 0.0);
    for (std::uint32_t q = 0; q < cells; ++q) {
        auto const t = p.index(q, z);
        if (t != noState) layer[q] = values[t];
    }
    std::vector<std::uint32_t> asc, desc;
    sortDestinations(layer, asc, desc);
    return extremalExpectation(p.row(s, action), {layer, asc, desc}, mode);
}

ReachValues robustReach(Pimdp const& p, Mode mode, SolverOptions const& options) {
    auto sweep = iterate(p, adversary(mode), nullptr, initialValues(p), false, options);
    ReachValues r{std::move(sweep.values), std::move(sweep.argmax), sweep.iterations, sweep.residual, sweep.converged};
    return r;
}

ValueResult satisfactionIntervals(Pimdp const& p, std::vector<int> const& strategy, SolverOptions const& options, std::vector<double> const* initialLower) {
    if (strategy.size() != p.stateCount()) throw ModelError("synthesis", "strategy size does not match the product");
    std::vector<double> start = initialValues(p);
    if (initialLower) {
        if (initialLower->size() != p.stateCount()) throw ModelError("synthesis", "initial values have the wrong size");
        for (std::size_t s = 0; s < start.size(); ++s) {
            if (!terminal(p, s)) start[s] = std::clamp((*initialLower)[s], 0.0, 1.0);
        }
    }
    auto lower = iterate(p, Extremum::Minimize, &strategy, std::move(start), initialLower != nullptr, options);
    auto upper = iterate(p, Extremum::Maximize, &strategy, initialValues(p), false, options);
    ValueResult r;
    r.lower = std::move(lower.values);
    r.upper = std::move(upper.values);
    r.strategy = strategy;
    for (std::size_t s = 0; s < r.strategy.size(); ++s) {
        if (terminal(p, s)) r.strategy[s] = -1;
    }
    r.iterations = std::max(lower.iterations, upper.iterations);
    r.residual = std::max(lower.residual, upper.residual);
    r.converged = lower.converged && upper.converged;
    return r;
}

namespace {

// Smallest probability any admissible distribution of `row` puts on the
// destinations marked in `inSet` (one flag per cell of the successor layer).
double minimumMass(Row const& row, std::vector<char> const& inSet, std::size_t setSize) {
    double lowIn = 0.0;
    double upOut = 0.0;
    std::size_t explicitOut = 0;
    for (auto const& e : row.entries) {
        if (inSet[e.dest]) {
            lowIn += e.lower;
        } else {
            upOut += e.upper;
            ++explicitOut;
        }
    }
    std::size_t const implicitOut = inSet.size() - setSize - explicitOut;
    upOut += static_cast<double>(implicitOut) * row.tailUpper;
    return std::max(lowIn, 1.0 - upOut);
}

}  // namespace

ValueResult synthesize(Pimdp const& p, SolverOptions const& options) {
    auto const pess = robustReach(p, Mode::Pessimistic, options);
    auto const opt = robustReach(p, Mode::Optimistic, options);
    std::size_t const n = p.stateCount();
    std::size_t const cells = p.imdp().stateCount();
    std::size_t const zs = p.dfa().stateCount();
    LayeredValues const pessLayers(p, pess.values);
    LayeredValues const optLayers(p, opt.values);

    // Actions tied for the best pessimistic value, in preference order.
    std::vector<std::vector<int>> candidates(n);
    for (std::size_t s = 0; s < n; ++s) {
        if (terminal(p, s)) continue;
        std::uint32_t const z = p.successorDfaState(s);
        std::vector<std::pair<double, double>> q(p.actionCount());
        double best = -1.0;
        for (std::size_t a = 0; a < p.actionCount(); ++a) {
            q[a] = {extremalExpectation(p.row(s, a), pessLayers.layer(z), Extremum::Minimize),
                    extremalExpectation(p.row(s, a), optLayers.layer(z), Extremum::Maximize)};
            best = std::max(best, q[a].first);
        }
        for (std::size_t a = 0; a < p.actionCount(); ++a) {
            if (q[a].first >= best - options.tieTolerance) candidates[s].push_back(static_cast<int>(a));
        }
        std::stable_sort(candidates[s].begin(), candidates[s].end(), [&](int a, int b) {
            double const oa = q[static_cast<std::size_t>(a)].second;
            double const ob = q[static_cast<std::size_t>(b)].second;
            if (std::abs(oa - ob) > options.tieTolerance) return oa > ob;
            return a < b;
        });
    }

    // Among tied actions, states with positive value must take one that is
    // guaranteed to move mass towards the states already resolved, otherwise
    // ties can close a loop that never reaches the accepting set.
    std::vector<int> strategy(n, -1);
    std::vector<char> resolved(n, 0);
    std::vector<std::vector<char>> layerSet(zs, std::vector<char>(cells, 0));
    std::vector<std::size_t> layerSize(zs, 0);
    auto resolve = [&](std::size_t s) {
        resolved[s] = 1;
        auto const st = p.state(s);
        layerSet[st.dfa][st.cell] = 1;
        ++layerSize[st.dfa];
    };
    for (std::size_t s = 0; s < n; ++s) {
        if (p.isAccepting(s)) resolve(s);
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t s = 0; s < n; ++s) {
            if (resolved[s] || terminal(p, s) || pess.values[s] <= options.tieTolerance) continue;
            std::uint32_t const z = p.successorDfaState(s);
            for (int a : candidates[s]) {
                if (minimumMass(p.row(s, static_cast<std::size_t>(a)), layerSet[z], layerSize[z]) > 0.0) {
                    strategy[s] = a;
                    resolve(s);
                    changed = true;
                    break;
                }
            }
        }
    }
    for (std::size_t s = 0; s < n; ++s) {
        if (!terminal(p, s) && strategy[s] < 0) strategy[s] = candidates[s].empty() ? 0 : candidates[s].front();
    }
    return satisfactionIntervals(p, strategy, options);
}

}  // namespace gpimdp::synthesis
