#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "anastaars/models.hpp"
#include "anastaars/oracle.hpp"
#include "anastaars/rng.hpp"
#include "anastaars/subspace.hpp"

namespace anastaars {

struct OptimizerConfig {
    double gamma = 2.0;       // radius expand/shrink factor, > 1
    double eta1 = 0.01;       // acceptance threshold on the ratio test
    double eta2 = 0.9;        // required model-gradient norm per unit radius
    double delta0 = 1.0;      // initial trust-region radius
    double delta_max = 5.0;   // radius cap
    double r = 1.0;           // noise-inflation coefficient in the ratio test
    int q0 = 2;               // subspace dimension after every reset
    int q_max = 2;            // largest subspace dimension before a reset
    ModelKind model_kind = ModelKind::mfn;
    int shots_per_estimate = 100;       // B, shots averaged per estimate
    long long max_evaluations = 100000; // total shot budget
    std::uint64_t seed = 0;             // recorded for provenance; the run
                                        // consumes the Rng it is handed
    double epsilon_f = 0.01;  // accuracy parameter of the abstract analysis;
                              // inert under the fixed-B sampling policy
};

struct IterationRecord {
    int k = 0;
    int q = 0;            // subspace dimension the model was built in
    bool success = false;
    double rho_tilde = 0.0;
    double delta = 0.0;   // radius used by this iteration's subproblem
    double f0_estimate = 0.0;
    double fs_estimate = 0.0;
    double noise_estimate = 0.0;
    long long shots_cumulative = 0;
    double incumbent_true_value = 0.0;  // noise-free value after accept/reject

    // Diagnostics for offline verification of the step computation.
    double model_reduction = 0.0;
    double grad_norm = 0.0;
    double step_norm = 0.0;
    double hess_norm = 0.0;  // operator norm of the model Hessian
};

struct OptimizerState {
    Eigen::VectorXd x;
    double delta = 0.0;
    int q = 0;
    int failure_flag = 0;  // 1 while the last iteration failed
    int k = 0;
    long long shots_used = 0;
    std::optional<SubspaceBasis> basis;
    std::optional<InterpolationSet> set;
    // Estimate at the incumbent x; reused as the interpolation center and as
    // the source of the noise estimate, so no extra shots are spent on it.
    std::optional<Estimate> center;
    std::vector<IterationRecord> history;
};

struct RunResult {
    Eigen::VectorXd x_final;
    double initial_true_value = 0.0;
    std::vector<IterationRecord> records;
};

/// Exact trust-region subproblem minimizer for the low-dimensional model:
/// returns argmin of g.s + s.H.s/2 over ||s|| <= delta via eigendecomposition
/// plus boundary root-finding, with a Cauchy-point safeguard so the decrease
/// m(0) - m(s) >= ||g||/2 * min(delta, ||g|| / max(||H||, 1e-12)) always
/// holds.  A zero gradient yields the zero step.
Eigen::VectorXd solve_tr_subproblem(const QuadraticSubspaceModel& model,
                                    double delta);

/// Noise-aware acceptance ratio (f0 - fs + r * noise) / model_reduction.
/// Degenerate reductions (<= 1e-15) return -infinity so the iteration fails.
double compute_rho_tilde(double f0, double fs, double noise, double r,
                         double model_reduction);

OptimizerState make_initial_state(const OptimizerConfig& config,
                                  const Eigen::VectorXd& x0);

/// One iteration of the adaptive-dimension loop.  Returns false, leaving the
/// state untouched, when the remaining shot budget cannot cover the
/// iteration; the caller then stops.
bool anastaars_step(OptimizerState& state, StochasticOracle& oracle,
                    const OptimizerConfig& config, Rng& rng);

/// One iteration of the fixed-dimension baseline: dimension q0 with a fresh
/// basis and fresh interpolation set every time, same radius and acceptance
/// rules otherwise.
bool stars_step(OptimizerState& state, StochasticOracle& oracle,
                const OptimizerConfig& config, Rng& rng);

RunResult run_anastaars(const OptimizerConfig& config, StochasticOracle& oracle,
                        const Eigen::VectorXd& x0, Rng& rng);

RunResult run_stars(const OptimizerConfig& config, StochasticOracle& oracle,
                    const Eigen::VectorXd& x0, Rng& rng);

} // namespace anastaars
