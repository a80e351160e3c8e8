#include "gpimdp/gp.h"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

#include "gpimdp/errors.h"

namespace gpimdp::gp {

void KernelParams::validate(std::size_t dim) const {
    if (lengthscales.size() != dim) {
        throw ModelError("gp", "expected " + std::to_string(dim) + " lengthscales, got " + std::to_string(lengthscales.size()));
    }
    for (double l : lengthscales) {
        if (!(l > 0.0) || !std::isfinite(l)) throw ModelError("gp", "lengthscales must be positive and finite");
    }
    if (!(signalVariance > 0.0) || !std::isfinite(signalVariance)) throw ModelError("gp", "signal variance must be positive");
    if (!(noiseVariance >= 0.0) || !std::isfinite(noiseVariance)) throw ModelError("gp", "noise variance must be non-negative");
}

namespace {

// Evenly spaced lattice over `region` with `perDim` points per dimension
// (endpoints included); calls f on each point.
template <typename F>
void forLattice(Box const& region, std::size_t perDim, F&& f) {
    std::size_t const n = region.dimension();
    std::vector<std::size_t> idx(n, 0);
    Vector x(n);
    while (true) {
        for (std::size_t i = 0; i < n; ++i) {
            double const t = perDim > 1 ? static_cast<double>(idx[i]) / static_cast<double>(perDim - 1) : 0.5;
            x[i] = region.lower[i] + t * (region.upper[i] - region.lower[i]);
        }
        f(x);
        std::size_t d = 0;
        while (d < n && ++idx[d] == perDim) idx[d++] = 0;
        if (d == n) break;
    }
}

// Radius of the largest ball-free hole of the lattice: every point of the
// region lies within this distance of a lattice point.
double coveringRadius(Box const& region, std::size_t perDim) {
    double r2 = 0.0;
    for (std::size_t i = 0; i < region.dimension(); ++i) {
        double const h = (region.upper[i] - region.lower[i]) / static_cast<double>(perDim - 1);
        r2 += 0.25 * h * h;
    }
    return std::sqrt(r2);
}

double minLengthscale(KernelParams const& p) { return *std::min_element(p.lengthscales.begin(), p.lengthscales.end()); }

}  // namespace

GpModel GpModel::fit(Eigen::MatrixXd inputs, Eigen::VectorXd targets, KernelParams params, BoundParams bound, int action, std::size_t outputDim) {
    if (inputs.rows() != targets.size()) throw ModelError("gp", "input and target counts differ");
    params.validate(static_cast<std::size_t>(inputs.cols()));
    if (!targets.allFinite() || !inputs.allFinite()) throw NumericalError("gp", "training data contains non-finite values");

    GpModel m;
    m.X = std::move(inputs);
    m.Y = std::move(targets);
    m.params = std::move(params);
    m.bound = bound;
    m.act = action;
    m.outDim = outputDim;

    auto const rows = m.X.rows();
    Eigen::MatrixXd K(rows, rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            double r2 = 0.0;
            for (Eigen::Index d = 0; d < m.X.cols(); ++d) {
                double const z = (m.X(i, d) - m.X(j, d)) / m.params.lengthscales[static_cast<std::size_t>(d)];
                r2 += z * z;
            }
            K(i, j) = K(j, i) = m.params.signalVariance * std::exp(-0.5 * r2);
        }
    }
    K.diagonal().array() += m.params.noiseVariance;

    double jitter = 0.0;
    while (true) {
        Eigen::MatrixXd A = K;
        A.diagonal().array() += jitter;
        m.llt.compute(A);
        if (m.llt.info() == Eigen::Success) break;
        jitter = jitter == 0.0 ? 1e-10 : jitter * 10.0;
        if (jitter > 1e-6 * 1.0000001) throw NumericalError("gp", "Cholesky factorization failed even with jitter 1e-6");
    }
    m.appliedJitter = jitter;
    m.alpha = m.llt.solve(m.Y);
    return m;
}

double GpModel::kernel(Vector const& a, Vector const& b) const {
    double r2 = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        double const z = (a[d] - b[d]) / params.lengthscales[d];
        r2 += z * z;
    }
    return params.signalVariance * std::exp(-0.5 * r2);
}

Eigen::VectorXd GpModel::crossKernel(Vector const& x) const {
    if (x.size() != inputDimension()) throw ModelError("gp", "query dimension mismatch");
    Eigen::VectorXd k(X.rows());
    for (Eigen::Index j = 0; j < X.rows(); ++j) {
        double r2 = 0.0;
        for (std::size_t d = 0; d < x.size(); ++d) {
            double const z = (x[d] - X(j, static_cast<Eigen::Index>(d))) / params.lengthscales[d];
            r2 += z * z;
        }
        k[j] = params.signalVariance * std::exp(-0.5 * r2);
    }
    return k;
}

GpModel::Prediction GpModel::posterior(Vector const& x) const {
    Eigen::VectorXd const k = crossKernel(x);
    double const mu = k.dot(alpha);
    Eigen::VectorXd const v = llt.matrixL().solve(k);
    double const var = std::max(params.signalVariance - v.squaredNorm(), varianceFloor);
    return {mu, std::sqrt(var)};
}

double GpModel::mean(Vector const& x) const { return crossKernel(x).dot(alpha); }

double GpModel::supStd(Box const& region) const {
    double best = 0.0;
    forLattice(region, 4, [&](Vector const& x) { best = std::max(best, posterior(x).std); });
    double const sf = std::sqrt(params.signalVariance);
    double const padded = best + sf / minLengthscale(params) * coveringRadius(region, 4);
    return std::min(padded, sf);
}

double GpModel::meanThirdDerivative(Box const& region, double radius) const {
    // Along a unit direction, the third derivative of k(., x_j) is bounded by
    // sf^2 / l_min^3 * sup |(a^3 - 3a)| exp(-|z|^2 / 2), z the scaled offset
    // and a its component along the direction. That sup is 1.38 overall and
    // (s^3 + 3s) exp(-s^2 / 2) once every offset has norm s >= 3^(1/4).
    constexpr double peak = 1.3802;
    double const threshold = std::pow(3.0, 0.25);
    double total = 0.0;
    std::size_t const n = inputDimension();
    for (Eigen::Index j = 0; j < X.rows(); ++j) {
        double near2 = 0.0;
        for (std::size_t d = 0; d < n; ++d) {
            double const xj = X(j, static_cast<Eigen::Index>(d));
            double const lo = region.lower[d] - radius;
            double const hi = region.upper[d] + radius;
            double const gap = xj < lo ? lo - xj : (xj > hi ? xj - hi : 0.0);
            near2 += (gap / params.lengthscales[d]) * (gap / params.lengthscales[d]);
        }
        double const s = std::sqrt(near2);
        double const c = s > threshold ? std::min(peak, (s * s * s + 3.0 * s) * std::exp(-0.5 * s * s)) : peak;
        total += std::abs(alpha[j]) * c;
    }
    double const l = minLengthscale(params);
    return total * params.signalVariance / (l * l * l);
}

std::pair<double, double> GpModel::meanRange(Box const& region) const {
    // Third-order Taylor expansion around each lattice point: every x of the
    // region is within `r` of one, so the mean there lies within
    // mu(p) +- (|grad| r + |curvature| r^2 / 2 + M3 r^3 / 6).
    std::size_t const n = inputDimension();
    double const r = coveringRadius(region, 3);
    double const m3 = r > 0.0 ? meanThirdDerivative(region, r) : 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    forLattice(region, 3, [&](Vector const& x) {
        Eigen::VectorXd grad = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
        Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        double mu = 0.0;
        Eigen::VectorXd z(static_cast<Eigen::Index>(n));
        for (Eigen::Index j = 0; j < X.rows(); ++j) {
            double r2 = 0.0;
            for (std::size_t d = 0; d < n; ++d) {
                auto const di = static_cast<Eigen::Index>(d);
                double const l = params.lengthscales[d];
                z[di] = (x[d] - X(j, di)) / (l * l);
                r2 += (x[d] - X(j, di)) * z[di];
            }
            double const w = alpha[j] * params.signalVariance * std::exp(-0.5 * r2);
            mu += w;
            if (r == 0.0) continue;
            grad -= w * z;
            hess += w * (z * z.transpose());
            for (std::size_t d = 0; d < n; ++d) hess(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)) -= w / (params.lengthscales[d] * params.lengthscales[d]);
        }
        double up = mu;
        double down = mu;
        if (r > 0.0) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hess, Eigen::EigenvaluesOnly);
            double const curvUp = std::max(eig.eigenvalues().maxCoeff(), 0.0);
            double const curvDown = std::max(-eig.eigenvalues().minCoeff(), 0.0);
            double const first = grad.norm() * r;
            double const third = m3 * r * r * r / 6.0;
            up += first + 0.5 * curvUp * r * r + third;
            down -= first + 0.5 * curvDown * r * r + third;
        }
        lo = std::min(lo, down);
        hi = std::max(hi, up);
    });
    return {lo, hi};
}

double GpModel::rkhsBound() const { return bound.rkhsBound.value_or(2.0); }

double GpModel::subGaussianScale() const { return bound.subGaussianScale.value_or(std::sqrt(params.noiseVariance)); }

double GpModel::informationGain() const {
    if (bound.informationGain) return *bound.informationGain;
    double const m = static_cast<double>(trainingSize());
    return m * std::log1p(m);
}

double GpModel::beta(double delta) const {
    if (!(delta > 0.0 && delta < 1.0)) throw ModelError("gp", "confidence delta must lie in (0, 1)");
    return rkhsBound() + subGaussianScale() * std::sqrt(2.0 * (informationGain() + 1.0 + std::log(1.0 / delta)));
}

double GpModel::epsilonFromStd(double supStdValue, double delta) const { return beta(delta) * supStdValue; }

double GpModel::epsilon(Box const& region, double delta) const {
    double const b = beta(delta);
    return b * supStd(region);
}

Eigen::MatrixXd GpModel::choleskyFactor() const { return llt.matrixL(); }

Vector ActionModel::predictMean(Vector const& x) const {
    Vector y(dims.size());
    for (std::size_t i = 0; i < dims.size(); ++i) {
        y[i] = dims[i].mean(x) + (mode == TargetMode::Increment ? x[i] : 0.0);
    }
    return y;
}

GpModel fit(Dataset const& data, std::span<std::size_t const> rows, int action, std::size_t dim, KernelParams const& params, TargetMode mode,
            BoundParams const& bound) {
    std::size_t const n = data.stateDimension();
    if (dim >= n) throw ModelError("gp", "output dimension out of range");
    Eigen::MatrixXd inputs(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n));
    Eigen::VectorXd targets(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        Sample const& s = data[rows[r]];
        if (s.action != action) throw ModelError("gp", "row belongs to a different action");
        for (std::size_t d = 0; d < n; ++d) inputs(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(d)) = s.x[d];
        targets[static_cast<Eigen::Index>(r)] = s.next[dim] - (mode == TargetMode::Increment ? s.x[dim] : 0.0);
    }
    return GpModel::fit(std::move(inputs), std::move(targets), params, bound, action, dim);
}

GpModel fit(Dataset const& data, int action, std::size_t dim, KernelParams const& params, TargetMode mode, BoundParams const& bound) {
    auto const rows = data.indicesFor(action);
    return fit(data, std::span<std::size_t const>(rows), action, dim, params, mode, bound);
}

ActionModel fitAction(Dataset const& data, int action, KernelParams const& params, TargetMode mode, BoundParams const& bound) {
    auto const rows = data.indicesFor(action);
    ActionModel model{action, mode, {}};
    for (std::size_t d = 0; d < data.stateDimension(); ++d) model.dims.push_back(fit(data, rows, action, d, params, mode, bound));
    return model;
}

ModelSet fitAll(Dataset const& data, std::vector<KernelParams> const& params, TargetMode mode, std::vector<BoundParams> const& bounds) {
    if (params.size() != static_cast<std::size_t>(data.actionCount())) throw ModelError("gp", "need one kernel parameter set per action");
    if (!bounds.empty() && bounds.size() != params.size()) throw ModelError("gp", "need one bound parameter set per action");
    ModelSet models;
    for (int a = 0; a < data.actionCount(); ++a) {
        auto const i = static_cast<std::size_t>(a);
        models.push_back(fitAction(data, a, params[i], mode, bounds.empty() ? BoundParams{} : bounds[i]));
    }
    return models;
}

ErrorBound errorEpsilon(ActionModel const& model, Box const& region, double delta, int regionId) {
    ErrorBound eb{regionId, model.action, {}, delta};
    for (auto const& g : model.dims) eb.epsilon.push_back(g.epsilon(region, delta));
    return eb;
}

ActionModel localGp(Dataset const& data, Vector const& x, int action, std::size_t count, KernelParams const& params, TargetMode mode,
                    BoundParams const& bound) {
    auto const rows = nearestSamples(data, x, action, count);
    if (rows.empty()) throw ModelError("gp", "no data for action " + std::to_string(action));
    ActionModel model{action, mode, {}};
    for (std::size_t d = 0; d < data.stateDimension(); ++d) model.dims.push_back(fit(data, rows, action, d, params, mode, bound));
    return model;
}

}  // namespace gpimdp::gp
