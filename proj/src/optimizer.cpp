#include "anastaars/optimizer.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace anastaars {

namespace {

constexpr double kConditionLimit = 1e8;

double model_value(const QuadraticSubspaceModel& model,
                   const Eigen::VectorXd& s) {
    // f0 dropped: only differences matter when ranking candidate steps.
    double v = model.g.dot(s);
    if (model.H.size() > 0) {
        v += 0.5 * s.dot(model.H * s);
    }
    return v;
}

Eigen::VectorXd cauchy_point(const QuadraticSubspaceModel& model,
                             double delta, double gnorm) {
    const double t_bound = delta / gnorm;
    double t = t_bound;
    if (model.H.size() > 0) {
        const double ghg = model.g.dot(model.H * model.g);
        if (ghg > 0.0) {
            t = std::min(t_bound, gnorm * gnorm / ghg);
        }
    }
    return -t * model.g;
}

void validate_config(const OptimizerConfig& config, int d) {
    if (!(config.gamma > 1.0)) {
        throw std::invalid_argument("optimizer config: gamma must be > 1");
    }
    if (!(config.eta1 > 0.0 && config.eta1 < 1.0)) {
        throw std::invalid_argument("optimizer config: eta1 must lie in (0,1)");
    }
    if (!(config.eta2 > 0.0)) {
        throw std::invalid_argument("optimizer config: eta2 must be > 0");
    }
    if (!(config.delta0 > 0.0 && config.delta0 < config.delta_max)) {
        throw std::invalid_argument(
            "optimizer config: need 0 < delta0 < delta_max");
    }
    if (!(config.r >= 0.0)) {
        throw std::invalid_argument("optimizer config: r must be >= 0");
    }
    if (config.q0 < 1 || config.q0 > config.q_max || config.q_max > d) {
        throw std::invalid_argument(
            "optimizer config: need 1 <= q0 <= q_max <= dimension");
    }
    if (config.shots_per_estimate < 1) {
        throw std::invalid_argument(
            "optimizer config: shots_per_estimate must be >= 1");
    }
    if (config.max_evaluations < 0) {
        throw std::invalid_argument(
            "optimizer config: max_evaluations must be >= 0");
    }
}

int fresh_set_size(ModelKind kind, int q) {
    return kind == ModelKind::linear ? q + 1 : 2 * q + 1;
}

double operator_norm(const Eigen::MatrixXd& H) {
    if (H.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H,
                                                      Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

enum class DimensionPolicy { adaptive, fixed };

bool optimizer_step(OptimizerState& state, StochasticOracle& oracle,
                    const OptimizerConfig& config, DimensionPolicy policy,
                    Rng& rng) {
    // A long enough failure streak halves the radius below the smallest
    // subnormal and it rounds to zero; no further iteration is possible,
    // so the run ends here just as if the budget were exhausted.
    if (!(state.delta > 0.0)) {
        return false;
    }
    const int B = config.shots_per_estimate;
    const ModelKind kind = config.model_kind;

    bool fresh = policy == DimensionPolicy::fixed || state.failure_flag == 0 ||
                 state.q + 1 > config.q_max || !state.basis || !state.set;

    // Prepare the extension geometry before spending any shots; if it is too
    // ill conditioned, fall back to a fresh set instead.
    InterpolationSet extended;
    double zeta = 0.0;
    if (!fresh) {
        zeta = std::min(state.delta, state.set->radius);
        const std::vector<double> placeholder(
            kind == ModelKind::diagonal ? 2 : 1, 0.0);
        try {
            extended = extend_interpolation_set(*state.set, zeta, placeholder);
            if (!(interpolation_condition(extended) <= kConditionLimit)) {
                fresh = true;
            }
        } catch (const std::exception&) {
            fresh = true;
        }
    }

    const int new_points =
        fresh ? fresh_set_size(kind, config.q0) - (state.center ? 1 : 0)
              : (kind == ModelKind::diagonal ? 2 : 1);
    const long long cost = static_cast<long long>(new_points + 1) * B;
    if (state.shots_used + cost > config.max_evaluations) {
        return false;
    }

    if (fresh) {
        state.q = config.q0;
        state.basis = sample_haar_basis(static_cast<int>(state.x.size()),
                                        state.q, rng);
        InterpolationSet set;
        set.q = state.q;
        set.kind = kind;
        set.radius = state.delta;
        set.points = generate_poised_set(state.q, state.delta, kind);
        set.values.resize(set.points.size());
        for (std::size_t i = 0; i < set.points.size(); ++i) {
            if (i == 0 && state.center) {
                set.values[0] = state.center->mean;
                continue;
            }
            const Eigen::VectorXd xi = state.x + state.basis->embed(set.points[i]);
            const Estimate est = oracle.estimate_at(xi, B, rng);
            set.values[i] = est.mean;
            state.shots_used += B;
            if (i == 0) {
                state.center = est;
            }
        }
        state.set = std::move(set);
    } else {
        state.basis = extend_basis(*state.basis, rng);
        state.q += 1;
        const std::size_t n_new = kind == ModelKind::diagonal ? 2 : 1;
        for (std::size_t j = extended.points.size() - n_new;
             j < extended.points.size(); ++j) {
            const Eigen::VectorXd xj =
                state.x + state.basis->embed(extended.points[j]);
            extended.values[j] = oracle.estimate_at(xj, B, rng).mean;
            state.shots_used += B;
        }
        state.set = std::move(extended);
    }

    const QuadraticSubspaceModel model = build_model(*state.set);
    const Eigen::VectorXd s = solve_tr_subproblem(model, state.delta);
    const double reduction =
        model_value(model, Eigen::VectorXd::Zero(model.q)) -
        model_value(model, s);

    const Eigen::VectorXd x_trial = state.x + state.basis->embed(s);
    const Estimate trial = oracle.estimate_at(x_trial, B, rng);
    state.shots_used += B;

    const double f0 = state.set->values[0];
    const double noise = state.center ? state.center->std_dev : 0.0;
    const double rho =
        compute_rho_tilde(f0, trial.mean, noise, config.r, reduction);
    const double grad_norm = model.g.norm();
    const bool success = rho >= config.eta1 && grad_norm >= config.eta2 * state.delta;

    IterationRecord rec;
    rec.k = state.k;
    rec.q = state.q;
    rec.success = success;
    rec.rho_tilde = rho;
    rec.delta = state.delta;
    rec.f0_estimate = f0;
    rec.fs_estimate = trial.mean;
    rec.noise_estimate = noise;
    rec.model_reduction = reduction;
    rec.grad_norm = grad_norm;
    rec.step_norm = s.norm();
    rec.hess_norm = operator_norm(model.H);

    if (success) {
        state.x = x_trial;
        state.delta = std::min(config.gamma * state.delta, config.delta_max);
        state.failure_flag = 0;
        state.center = trial;
    } else {
        state.delta /= config.gamma;
        state.failure_flag = 1;
    }

    rec.shots_cumulative = state.shots_used;
    rec.incumbent_true_value = oracle.true_value(state.x);
    state.history.push_back(rec);
    state.k += 1;
    return true;
}

RunResult run_loop(const OptimizerConfig& config, StochasticOracle& oracle,
                   const Eigen::VectorXd& x0, DimensionPolicy policy,
                   Rng& rng) {
    validate_config(config, oracle.dimension());
    if (x0.size() != oracle.dimension()) {
        throw std::invalid_argument("run: x0 dimension does not match oracle");
    }
    OptimizerState state = make_initial_state(config, x0);
    while (optimizer_step(state, oracle, config, policy, rng)) {
    }
    RunResult result;
    result.x_final = state.x;
    result.initial_true_value = oracle.true_value(x0);
    result.records = std::move(state.history);
    return result;
}

} // namespace

Eigen::VectorXd solve_tr_subproblem(const QuadraticSubspaceModel& model,
                                    double delta) {
    if (!(delta > 0.0)) {
        throw std::invalid_argument("solve_tr_subproblem: delta must be > 0");
    }
    const int q = model.q;
    if (q < 1 || model.g.size() != q) {
        throw std::invalid_argument("solve_tr_subproblem: malformed model");
    }
    const double gnorm = model.g.norm();
    if (gnorm == 0.0) {
        return Eigen::VectorXd::Zero(q);
    }
    if (model.H.size() == 0 || model.H.isZero(0.0)) {
        return (-delta / gnorm) * model.g;
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(model.H);
    const Eigen::VectorXd lam = es.eigenvalues();  // ascending
    const Eigen::MatrixXd& V = es.eigenvectors();
    const Eigen::VectorXd c = V.transpose() * model.g;
    const double lam_min = lam(0);
    const double lam_scale =
        std::max({std::abs(lam(0)), std::abs(lam(q - 1)), 1.0});

    Eigen::VectorXd best;
    bool solved = false;

    if (lam_min > 0.0) {
        const Eigen::VectorXd y = -(c.array() / lam.array()).matrix();
        if (y.norm() <= delta) {
            best = V * y;
            solved = true;
        }
    }

    if (!solved) {
        // Boundary solution: find nu >= max(0, -lam_min) with ||y(nu)|| =
        // delta for y_i = -c_i / (lam_i + nu).
        const double nu_floor = std::max(0.0, -lam_min);
        const double sing_tol = 1e-12 * lam_scale;

        bool forcing = false;  // nonzero gradient weight on floor eigenspace
        double floor_norm2 = 0.0;
        for (int i = 0; i < q; ++i) {
            const double den = lam(i) + nu_floor;
            if (den <= sing_tol) {
                if (std::abs(c(i)) > 1e-13 * gnorm) {
                    forcing = true;
                }
            } else {
                floor_norm2 += (c(i) / den) * (c(i) / den);
            }
        }

        if (!forcing && std::sqrt(floor_norm2) <= delta) {
            // The secular equation has no root above the floor.  Take the
            // pseudo-solution there; with negative curvature, pad along the
            // bottom eigenvector to reach the boundary (the hard case).
            Eigen::VectorXd y(q);
            for (int i = 0; i < q; ++i) {
                const double den = lam(i) + nu_floor;
                y(i) = den <= sing_tol ? 0.0 : -c(i) / den;
            }
            best = V * y;
            if (lam_min < 0.0) {
                const double tau = std::sqrt(
                    std::max(0.0, delta * delta - best.squaredNorm()));
                best += tau * V.col(0);
            }
        } else {
            const auto norm_terms = [&](double nu, double& n, double& dn) {
                double n2 = 0.0;
                double d3 = 0.0;
                for (int i = 0; i < q; ++i) {
                    const double den = lam(i) + nu;
                    const double t = c(i) / den;
                    n2 += t * t;
                    d3 += t * t / den;
                }
                n = std::sqrt(n2);
                dn = -d3 / n;  // d||y||/dnu
            };

            double lo = nu_floor;
            double hi = nu_floor + gnorm / delta + lam_scale;
            double nu = std::max(lo + 1e-3 * (hi - lo), gnorm / delta);
            nu = std::min(std::max(nu, lo + 1e-16 * lam_scale), hi);
            for (int it = 0; it < 200; ++it) {
                double n = 0.0, dn = 0.0;
                norm_terms(nu, n, dn);
                if (std::abs(n - delta) <= 1e-13 * delta) {
                    break;
                }
                if (n > delta) {
                    lo = nu;
                } else {
                    hi = nu;
                }
                // Newton step on 1/n - 1/delta, which is nearly linear in nu.
                const double phi = 1.0 / n - 1.0 / delta;
                const double dphi = -dn / (n * n);
                double next = nu - phi / dphi;
                if (!(next > lo && next < hi)) {
                    next = 0.5 * (lo + hi);
                }
                if (std::abs(next - nu) <= 1e-16 * std::max(1.0, nu)) {
                    nu = next;
                    break;
                }
                nu = next;
            }
            Eigen::VectorXd y(q);
            for (int i = 0; i < q; ++i) {
                y(i) = -c(i) / (lam(i) + nu);
            }
            best = V * y;
        }
    }

    // Safeguard: never do worse than the Cauchy point, and never leave the
    // region by round-off.
    const Eigen::VectorXd sc = cauchy_point(model, delta, gnorm);
    if (model_value(model, sc) < model_value(model, best)) {
        best = sc;
    }
    const double bn = best.norm();
    if (bn > delta) {
        best *= delta / bn;
    }
    return best;
}

double compute_rho_tilde(double f0, double fs, double noise, double r,
                         double model_reduction) {
    if (!(model_reduction > 1e-15)) {
        return -std::numeric_limits<double>::infinity();
    }
    return (f0 - fs + r * noise) / model_reduction;
}

OptimizerState make_initial_state(const OptimizerConfig& config,
                                  const Eigen::VectorXd& x0) {
    OptimizerState state;
    state.x = x0;
    state.delta = config.delta0;
    state.q = config.q0;
    state.failure_flag = 0;
    state.k = 0;
    state.shots_used = 0;
    return state;
}

bool anastaars_step(OptimizerState& state, StochasticOracle& oracle,
                    const OptimizerConfig& config, Rng& rng) {
    return optimizer_step(state, oracle, config, DimensionPolicy::adaptive,
                          rng);
}

bool stars_step(OptimizerState& state, StochasticOracle& oracle,
                const OptimizerConfig& config, Rng& rng) {
    return optimizer_step(state, oracle, config, DimensionPolicy::fixed, rng);
}

RunResult run_anastaars(const OptimizerConfig& config, StochasticOracle& oracle,
                        const Eigen::VectorXd& x0, Rng& rng) {
    return run_loop(config, oracle, x0, DimensionPolicy::adaptive, rng);
}

RunResult run_stars(const OptimizerConfig& config, StochasticOracle& oracle,
                    const Eigen::VectorXd& x0, Rng& rng) {
    return run_loop(config, oracle, x0, DimensionPolicy::fixed, rng);
}

} // namespace anastaars
