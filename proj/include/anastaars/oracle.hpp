#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "anastaars/rng.hpp"

namespace anastaars {

/// Monte-Carlo estimate of an objective value at a single point.
struct Estimate {
    double mean = 0.0;
    /// Sample standard deviation of the individual shots (B-1 denominator),
    /// zero when only one shot was taken.
    double std_dev = 0.0;
    /// Number of shots the estimate was averaged over.
    int shots = 0;
    /// The per-shot values themselves, kept for reuse at the incumbent.
    std::vector<double> samples;
};

/// A stochastic zeroth-order objective.  Implementations expose both the
/// noisy interface the optimizer consumes and the exact value used for
/// progress tracking in experiments.
class StochasticOracle {
public:
    virtual ~StochasticOracle() = default;

    virtual int dimension() const = 0;

    /// One noisy realization of the objective at x.
    virtual double sample(const Eigen::VectorXd& x, Rng& rng) = 0;

    /// B independent realizations at x.  The default loops over sample();
    /// implementations override it when shared work can be hoisted out of
    /// the per-shot loop.
    virtual void sample_batch(const Eigen::VectorXd& x, int shots, Rng& rng,
                              std::vector<double>& out);

    /// Noise-free objective value, for diagnostics only.
    virtual double true_value(const Eigen::VectorXd& x) const = 0;

    /// Mean and sample standard deviation over a fresh batch of shots.
    Estimate estimate_at(const Eigen::VectorXd& x, int shots, Rng& rng);
};

/// Deterministic function plus additive Gaussian noise of fixed scale.
class GaussianNoiseOracle final : public StochasticOracle {
public:
    GaussianNoiseOracle(std::function<double(const Eigen::VectorXd&)> f,
                        int dimension, double noise_std);

    int dimension() const override { return dim_; }
    double sample(const Eigen::VectorXd& x, Rng& rng) override;
    double true_value(const Eigen::VectorXd& x) const override;

private:
    std::function<double(const Eigen::VectorXd&)> f_;
    int dim_;
    double noise_std_;
};

} // namespace anastaars
