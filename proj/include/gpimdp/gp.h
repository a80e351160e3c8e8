#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "gpimdp/box.h"

namespace gpimdp::gp {

/// One observed transition (x, u, x+).
struct Sample {
    Vector x;
    int action = 0;
    Vector next;
};

/// State-action-state measurements over a fixed state dimension.
class Dataset {
   public:
    Dataset() = default;
    Dataset(std::size_t stateDim, int actions) : dim(stateDim), numActions(actions) {}

    std::size_t stateDimension() const { return dim; }
    int actionCount() const { return numActions; }
    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }
    Sample const& operator[](std::size_t i) const { return samples[i]; }
    std::vector<Sample> const& all() const { return samples; }

    /// Throws ModelError on dimension or action-id mismatch.
    void add(Sample s);
    std::size_t countFor(int action) const;
    std::vector<std::size_t> indicesFor(int action) const;

   private:
    std::size_t dim = 0;
    int numActions = 0;
    std::vector<Sample> samples;
};

/// Squared-exponential kernel hyperparameters.
struct KernelParams {
    Vector lengthscales;
    double signalVariance = 1.0;
    double noiseVariance = 0.01;

    void validate(std::size_t dim) const;
};

/// Constants of the high-probability error bound
///   beta(delta) = B + R sqrt(2 (gamma + 1 + ln(1/delta))).
/// Unset fields take the defaults B = 2, R = noise std, gamma = m ln(1 + m).
struct BoundParams {
    std::optional<double> rkhsBound;
    std::optional<double> subGaussianScale;
    std::optional<double> informationGain;
};

/// Whether the GP learns x+ directly or the increment x+ - x.
enum class TargetMode { Full, Increment };

inline constexpr double varianceFloor = 1e-12;

/// Posterior of a zero-mean GP for one output dimension of one action.
class GpModel {
   public:
    struct Prediction {
        double mean;
        double std;
    };

    GpModel() = default;

    /// Fits on inputs (m x n) and targets (m); m = 0 gives the prior. Escalates diagonal jitter from
    /// 1e-10 to 1e-6 if the Cholesky factorization fails; throws
    /// NumericalError if it still fails.
    static GpModel fit(Eigen::MatrixXd inputs, Eigen::VectorXd targets, KernelParams params, BoundParams bound = {}, int action = 0,
                       std::size_t outputDim = 0);

    Prediction posterior(Vector const& x) const;
    double mean(Vector const& x) const;

    /// Upper bound on sup of the posterior std over `region`: max over a
    /// 4-point-per-dimension lattice plus Lipschitz padding, capped at the
    /// prior std.
    double supStd(Box const& region) const;

    /// Bounds of the mean over `region`: third-order Taylor expansions at a
    /// 3-point-per-dimension lattice, with the remainder bounded through the
    /// kernel's third derivative and the weight norm |alpha|_1.
    std::pair<double, double> meanRange(Box const& region) const;

    double beta(double delta) const;
    /// beta(delta) * supStd(region); throws ModelError for delta outside (0,1).
    double epsilon(Box const& region, double delta) const;
    double epsilonFromStd(double supStdValue, double delta) const;

    double kernel(Vector const& a, Vector const& b) const;

    std::size_t trainingSize() const { return static_cast<std::size_t>(X.rows()); }
    std::size_t inputDimension() const { return params.lengthscales.size(); }
    int action() const { return act; }
    std::size_t outputDimension() const { return outDim; }
    KernelParams const& kernelParams() const { return params; }
    double rkhsBound() const;
    double subGaussianScale() const;
    double informationGain() const;
    double jitter() const { return appliedJitter; }

    Eigen::MatrixXd const& inputs() const { return X; }
    Eigen::VectorXd const& targets() const { return Y; }
    Eigen::MatrixXd choleskyFactor() const;
    Eigen::VectorXd const& weights() const { return alpha; }

   private:
    Eigen::VectorXd crossKernel(Vector const& x) const;
    /// Bound on any third directional derivative of the mean over `region` grown by `radius`.
    double meanThirdDerivative(Box const& region, double radius) const;

    Eigen::MatrixXd X;
    Eigen::VectorXd Y;
    KernelParams params;
    BoundParams bound;
    int act = 0;
    std::size_t outDim = 0;
    Eigen::LLT<Eigen::MatrixXd> llt;
    Eigen::VectorXd alpha;
    double appliedJitter = 0.0;
};

/// Per-action, per-dimension high-probability regression error radius.
struct ErrorBound {
    int region = -1;
    int action = 0;
    Vector epsilon;
    double delta = 0.1;
};

/// The n posteriors (one per output dimension) of a single action, plus the
/// target mode needed to turn them into next-state predictions.
struct ActionModel {
    int action = 0;
    TargetMode mode = TargetMode::Full;
    std::vector<GpModel> dims;

    Vector predictMean(Vector const& x) const;
};

/// Models for all actions, indexed by action id.
using ModelSet = std::vector<ActionModel>;

/// Rows of `data` for `action`, with targets for output dimension `dim`.
GpModel fit(Dataset const& data, int action, std::size_t dim, KernelParams const& params, TargetMode mode, BoundParams const& bound = {});
GpModel fit(Dataset const& data, std::span<std::size_t const> rows, int action, std::size_t dim, KernelParams const& params, TargetMode mode,
            BoundParams const& bound = {});

ActionModel fitAction(Dataset const& data, int action, KernelParams const& params, TargetMode mode, BoundParams const& bound = {});
ModelSet fitAll(Dataset const& data, std::vector<KernelParams> const& params, TargetMode mode, std::vector<BoundParams> const& bounds = {});

ErrorBound errorEpsilon(ActionModel const& model, Box const& region, double delta, int regionId = -1);

/// Indices of the min(count, available) samples of `action` nearest to x (Euclidean, ties by index).
std::vector<std::size_t> nearestSamples(Dataset const& data, Vector const& x, int action, std::size_t count);

/// Local GP over the `count` nearest samples of `action`, same hyperparameters.
/// Throws ModelError when `action` has no data.
ActionModel localGp(Dataset const& data, Vector const& x, int action, std::size_t count, KernelParams const& params, TargetMode mode,
                    BoundParams const& bound = {});

}  // namespace gpimdp::gp
