#include "anastaars/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace anastaars {

void StochasticOracle::sample_batch(const Eigen::VectorXd& x, int shots,
                                    Rng& rng, std::vector<double>& out) {
    out.resize(static_cast<std::size_t>(shots));
    for (int b = 0; b < shots; ++b) {
        out[static_cast<std::size_t>(b)] = sample(x, rng);
    }
}

Estimate StochasticOracle::estimate_at(const Eigen::VectorXd& x, int shots,
                                       Rng& rng) {
    if (shots < 1) {
        throw std::invalid_argument("estimate_at: shots must be >= 1");
    }
    if (static_cast<int>(x.size()) != dimension()) {
        throw std::invalid_argument(
            "estimate_at: point dimension does not match the oracle");
    }
    Estimate est;
    est.shots = shots;
    sample_batch(x, shots, rng, est.samples);

    double sum = 0.0;
    for (double v : est.samples) sum += v;
    est.mean = sum / static_cast<double>(shots);

    if (shots > 1) {
        double ss = 0.0;
        for (double v : est.samples) {
            const double d = v - est.mean;
            ss += d * d;
        }
        est.std_dev = std::sqrt(ss / static_cast<double>(shots - 1));
    }
    return est;
}

GaussianNoiseOracle::GaussianNoiseOracle(
    std::function<double(const Eigen::VectorXd&)> f, int dimension,
    double noise_std)
    : f_(std::move(f)), dim_(dimension), noise_std_(noise_std) {
    if (dim_ < 1) {
        throw std::invalid_argument("GaussianNoiseOracle: dimension must be >= 1");
    }
    if (noise_std_ < 0.0) {
        throw std::invalid_argument("GaussianNoiseOracle: noise_std must be >= 0");
    }
}

double GaussianNoiseOracle::sample(const Eigen::VectorXd& x, Rng& rng) {
    double value = f_(x);
    if (noise_std_ > 0.0) {
        std::normal_distribution<double> noise(0.0, noise_std_);
        value += noise(rng);
    }
    return value;
}

double GaussianNoiseOracle::true_value(const Eigen::VectorXd& x) const {
    return f_(x);
}

} // namespace anastaars
