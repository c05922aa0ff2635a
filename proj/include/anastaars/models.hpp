#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>
#include <vector>

namespace anastaars {

enum class ModelKind { linear, mfn, diagonal };

ModelKind model_kind_from_string(const std::string& name);
std::string to_string(ModelKind kind);

/// Thrown when an interpolation geometry is too ill-conditioned to trust;
/// carries the offending condition estimate so callers can log it.
class PoisednessError : public std::runtime_error {
public:
    PoisednessError(const std::string& message, double condition)
        : std::runtime_error(message), condition_(condition) {}
    double condition() const { return condition_; }

private:
    double condition_;
};

/// Interpolation data in subspace coordinates: the origin plus surrounding
/// points, with one objective estimate per point.  `radius` is the magnitude
/// of the layout points; after basis extensions it carries the accumulated
/// q-hat scaling rather than the trust-region radius of the moment.
struct InterpolationSet {
    int q = 0;
    ModelKind kind = ModelKind::linear;
    std::vector<Eigen::VectorXd> points;  // points[0] is always the origin
    std::vector<double> values;
    double radius = 0.0;
};

/// m(s) = f0 + g.s + s.H.s/2 on the q-dimensional subspace.  H is zero for
/// models built from linear data and diagonal for the central-difference kind.
struct QuadraticSubspaceModel {
    int q = 0;
    double f0 = 0.0;
    Eigen::VectorXd g;
    Eigen::MatrixXd H;
};

/// Canonical fresh layouts: linear gives {0, delta e^1, ..., delta e^q};
/// diagonal and mfn give {0, +delta e^i ..., -delta e^i ...}.
std::vector<Eigen::VectorXd> generate_poised_set(int q, double delta,
                                                 ModelKind kind);

/// Condition estimate of the interpolation system the set's kind implies.
/// Depends on the points only; values never enter poisedness.  Points are
/// normalized by the radius first so the estimate is scale free.
double interpolation_condition(const InterpolationSet& set);

QuadraticSubspaceModel build_linear_model(const InterpolationSet& set);
QuadraticSubspaceModel build_mfn_model(const InterpolationSet& set);
QuadraticSubspaceModel build_diagonal_model(const InterpolationSet& set);

/// Dispatches to the builder matching set.kind.
QuadraticSubspaceModel build_model(const InterpolationSet& set);

/// Closed-form update of a linear model when the subspace gains a dimension:
/// the old gradient shrinks by q-hat and the new entry is delta_f / zeta,
/// where zeta is the offset of the single new interpolation point and
/// delta_f the value difference it contributed.  f0 is untouched.
QuadraticSubspaceModel extend_linear_model(const QuadraticSubspaceModel& prev,
                                           double zeta, double delta_f);

/// Carries a set into the extended subspace: every old point s becomes
/// (q-hat * s, 0) and keeps its value, so no old point is re-evaluated.
/// Linear and mfn kinds append the single point zeta * e^{q+1} (one new
/// value, 0 < |zeta| <= prev.radius); the diagonal kind appends the pair
/// +/- (q-hat * prev.radius) e^{q+1} (two new values) so the layout stays a
/// perfect central-difference stencil.
InterpolationSet extend_interpolation_set(const InterpolationSet& prev,
                                          double zeta,
                                          const std::vector<double>& new_values);

double evaluate_model(const QuadraticSubspaceModel& model,
                      const Eigen::VectorXd& s);

} // namespace anastaars
