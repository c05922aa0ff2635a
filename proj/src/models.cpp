#include "anastaars/models.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <cmath>
#include <limits>

#include "anastaars/subspace.hpp"

namespace anastaars {

namespace {

constexpr double kConditionLimit = 1e8;

double condition_of(const Eigen::MatrixXd& M) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    if (smin <= 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return sv(0) / smin;
}

void check_set_shape(const InterpolationSet& set) {
    if (set.q < 1) {
        throw std::invalid_argument("interpolation set: q must be >= 1");
    }
    if (set.points.empty() || set.points.size() != set.values.size()) {
        throw std::invalid_argument(
            "interpolation set: points and values must align and be nonempty");
    }
    for (const auto& p : set.points) {
        if (p.size() != set.q) {
            throw std::invalid_argument(
                "interpolation set: point dimension does not match q");
        }
    }
    if (!set.points[0].isZero(0.0)) {
        throw std::invalid_argument(
            "interpolation set: first point must be the origin");
    }
    if (!(set.radius > 0.0)) {
        throw std::invalid_argument("interpolation set: radius must be > 0");
    }
}

// Rows of the linear natural basis (1, s_1, ..., s_q).
Eigen::MatrixXd linear_basis_rows(const std::vector<Eigen::VectorXd>& points,
                                  int q, double point_scale) {
    const int n = static_cast<int>(points.size());
    Eigen::MatrixXd M(n, q + 1);
    for (int i = 0; i < n; ++i) {
        M(i, 0) = 1.0;
        M.row(i).tail(q) = point_scale * points[static_cast<std::size_t>(i)];
    }
    return M;
}

// Rows of the quadratic natural basis (s_1^2/2, s_1 s_2, ..., s_q^2/2),
// pair (i, j) with i <= j in lexicographic order.
Eigen::MatrixXd quadratic_basis_rows(const std::vector<Eigen::VectorXd>& points,
                                     int q, double point_scale) {
    const int n = static_cast<int>(points.size());
    const int nq = q * (q + 1) / 2;
    Eigen::MatrixXd M(n, nq);
    for (int i = 0; i < n; ++i) {
        const Eigen::VectorXd s =
            point_scale * points[static_cast<std::size_t>(i)];
        int k = 0;
        for (int a = 0; a < q; ++a) {
            for (int b = a; b < q; ++b) {
                M(i, k++) = (a == b) ? 0.5 * s(a) * s(a) : s(a) * s(b);
            }
        }
    }
    return M;
}

Eigen::MatrixXd mfn_kkt_matrix(const std::vector<Eigen::VectorXd>& points,
                               int q, double point_scale) {
    const int n = static_cast<int>(points.size());
    const Eigen::MatrixXd ML = linear_basis_rows(points, q, point_scale);
    const Eigen::MatrixXd MQ = quadratic_basis_rows(points, q, point_scale);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n + q + 1, n + q + 1);
    A.topLeftCorner(n, n) = MQ * MQ.transpose();
    A.topRightCorner(n, q + 1) = ML;
    A.bottomLeftCorner(q + 1, n) = ML.transpose();
    return A;
}

// Identifies the {0, +r e^i, -r e^i} stencil.  Returns the value index of
// the +r and -r point for each coordinate plus the center index and radius.
struct DiagonalLayout {
    int center = -1;
    std::vector<int> plus;
    std::vector<int> minus;
    double radius = 0.0;
};

DiagonalLayout detect_diagonal_layout(const InterpolationSet& set) {
    const int q = set.q;
    const int n = static_cast<int>(set.points.size());
    if (n != 2 * q + 1) {
        throw std::invalid_argument(
            "diagonal interpolation set must hold exactly 2q+1 points");
    }
    DiagonalLayout layout;
    layout.plus.assign(static_cast<std::size_t>(q), -1);
    layout.minus.assign(static_cast<std::size_t>(q), -1);
    for (int i = 0; i < n; ++i) {
        const Eigen::VectorXd& p = set.points[static_cast<std::size_t>(i)];
        int axis = -1;
        bool clean = true;
        for (int c = 0; c < q; ++c) {
            if (p(c) != 0.0) {
                if (axis >= 0) {
                    clean = false;
                    break;
                }
                axis = c;
            }
        }
        if (!clean) {
            throw std::invalid_argument(
                "diagonal interpolation set: point off the coordinate axes");
        }
        if (axis < 0) {
            if (layout.center >= 0) {
                throw std::invalid_argument(
                    "diagonal interpolation set: duplicate center point");
            }
            layout.center = i;
            continue;
        }
        const double mag = std::abs(p(axis));
        if (layout.radius == 0.0) {
            layout.radius = mag;
        } else if (std::abs(mag - layout.radius) > 1e-9 * layout.radius) {
            throw std::invalid_argument(
                "diagonal interpolation set: mixed stencil radii");
        }
        auto& slot = (p(axis) > 0.0) ? layout.plus : layout.minus;
        if (slot[static_cast<std::size_t>(axis)] >= 0) {
            throw std::invalid_argument(
                "diagonal interpolation set: repeated stencil point");
        }
        slot[static_cast<std::size_t>(axis)] = i;
    }
    if (layout.center < 0) {
        throw std::invalid_argument(
            "diagonal interpolation set: missing center point");
    }
    for (int c = 0; c < q; ++c) {
        if (layout.plus[static_cast<std::size_t>(c)] < 0 ||
            layout.minus[static_cast<std::size_t>(c)] < 0) {
            throw std::invalid_argument(
                "diagonal interpolation set: incomplete +/- pair");
        }
    }
    return layout;
}

} // namespace

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "linear") return ModelKind::linear;
    if (name == "mfn") return ModelKind::mfn;
    if (name == "diagonal") return ModelKind::diagonal;
    throw std::invalid_argument("unknown model kind: " + name);
}

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::linear: return "linear";
        case ModelKind::mfn: return "mfn";
        case ModelKind::diagonal: return "diagonal";
    }
    throw std::invalid_argument("unknown model kind");
}

std::vector<Eigen::VectorXd> generate_poised_set(int q, double delta,
                                                 ModelKind kind) {
    if (q < 1) {
        throw std::invalid_argument("generate_poised_set: q must be >= 1");
    }
    if (!(delta > 0.0)) {
        throw std::invalid_argument("generate_poised_set: delta must be > 0");
    }
    std::vector<Eigen::VectorXd> points;
    points.push_back(Eigen::VectorXd::Zero(q));
    for (int i = 0; i < q; ++i) {
        points.push_back(delta * Eigen::VectorXd::Unit(q, i));
    }
    if (kind != ModelKind::linear) {
        for (int i = 0; i < q; ++i) {
            points.push_back(-delta * Eigen::VectorXd::Unit(q, i));
        }
    }
    return points;
}

double interpolation_condition(const InterpolationSet& set) {
    check_set_shape(set);
    const double inv_r = 1.0 / set.radius;
    switch (set.kind) {
        case ModelKind::linear: {
            const int q = set.q;
            if (static_cast<int>(set.points.size()) != q + 1) {
                throw std::invalid_argument(
                    "linear interpolation set must hold exactly q+1 points");
            }
            Eigen::MatrixXd L(q, q);
            for (int i = 0; i < q; ++i) {
                L.row(i) = inv_r * set.points[static_cast<std::size_t>(i + 1)];
            }
            return condition_of(L);
        }
        case ModelKind::diagonal: {
            // Full natural-basis system (1, s, s^2/2 per coordinate).
            const int q = set.q;
            const int n = static_cast<int>(set.points.size());
            Eigen::MatrixXd M(n, 2 * q + 1);
            for (int i = 0; i < n; ++i) {
                const Eigen::VectorXd s =
                    inv_r * set.points[static_cast<std::size_t>(i)];
                M(i, 0) = 1.0;
                M.row(i).segment(1, q) = s;
                for (int c = 0; c < q; ++c) {
                    M(i, 1 + q + c) = 0.5 * s(c) * s(c);
                }
            }
            return condition_of(M);
        }
        case ModelKind::mfn:
            return condition_of(mfn_kkt_matrix(set.points, set.q, inv_r));
    }
    throw std::invalid_argument("interpolation_condition: unknown kind");
}

QuadraticSubspaceModel build_linear_model(const InterpolationSet& set) {
    check_set_shape(set);
    if (set.kind != ModelKind::linear) {
        throw std::invalid_argument("build_linear_model: set.kind must be linear");
    }
    const int q = set.q;
    if (static_cast<int>(set.points.size()) != q + 1) {
        throw std::invalid_argument(
            "build_linear_model: expected exactly q+1 points");
    }
    const double cond = interpolation_condition(set);
    if (!(cond <= kConditionLimit)) {
        throw PoisednessError("linear interpolation system is ill conditioned",
                              cond);
    }

    // Solved in radius units so the factorization sees O(1) entries even
    // when the set has shrunk far below unit scale.
    const double inv_r = 1.0 / set.radius;
    Eigen::MatrixXd L(q, q);
    Eigen::VectorXd rhs(q);
    for (int i = 0; i < q; ++i) {
        L.row(i) = inv_r * set.points[static_cast<std::size_t>(i + 1)];
        rhs(i) = set.values[static_cast<std::size_t>(i + 1)] - set.values[0];
    }

    QuadraticSubspaceModel model;
    model.q = q;
    model.f0 = set.values[0];
    model.g = inv_r * L.fullPivLu().solve(rhs);
    model.H = Eigen::MatrixXd::Zero(q, q);
    return model;
}

QuadraticSubspaceModel build_mfn_model(const InterpolationSet& set) {
    check_set_shape(set);
    if (set.kind != ModelKind::mfn) {
        throw std::invalid_argument("build_mfn_model: set.kind must be mfn");
    }
    const int q = set.q;
    const int n = static_cast<int>(set.points.size());
    const int n_max = (q + 1) * (q + 2) / 2;
    if (n < q + 1 || n > n_max) {
        throw std::invalid_argument(
            "build_mfn_model: point count outside [q+1, (q+1)(q+2)/2]");
    }
    const double cond = interpolation_condition(set);
    if (!(cond <= kConditionLimit)) {
        throw PoisednessError("interpolation saddle system is ill conditioned",
                              cond);
    }

    // Minimize |alpha_Q|^2/2 subject to interpolating every value: the
    // stationarity conditions alpha_Q = MQ^T lambda and ML^T lambda = 0
    // reduce the QP to one saddle solve in (lambda, alpha_L).  The solve
    // runs in radius units so every block of the saddle stays O(1); the
    // quadratic coefficients scale uniformly under that change, so the
    // minimizer is the same and only the back-substitution differs.  At
    // small radii the raw saddle mixes O(radius^4) and O(1) blocks and the
    // rank test starts reporting geometry-independent failures.
    const double inv_r = 1.0 / set.radius;
    const Eigen::MatrixXd ML = linear_basis_rows(set.points, q, inv_r);
    const Eigen::MatrixXd MQ = quadratic_basis_rows(set.points, q, inv_r);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n + q + 1, n + q + 1);
    A.topLeftCorner(n, n) = MQ * MQ.transpose();
    A.topRightCorner(n, q + 1) = ML;
    A.bottomLeftCorner(q + 1, n) = ML.transpose();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + q + 1);
    for (int i = 0; i < n; ++i) {
        rhs(i) = set.values[static_cast<std::size_t>(i)];
    }

    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (!lu.isInvertible()) {
        throw PoisednessError("interpolation saddle system is singular",
                              std::numeric_limits<double>::infinity());
    }
    const Eigen::VectorXd sol = lu.solve(rhs);
    const Eigen::VectorXd lambda = sol.head(n);
    const Eigen::VectorXd alpha_l = sol.tail(q + 1);
    const Eigen::VectorXd alpha_q = MQ.transpose() * lambda;

    QuadraticSubspaceModel model;
    model.q = q;
    model.f0 = alpha_l(0);
    model.g = inv_r * alpha_l.tail(q);
    model.H.setZero(q, q);
    int k = 0;
    for (int a = 0; a < q; ++a) {
        for (int b = a; b < q; ++b) {
            const double h = inv_r * inv_r * alpha_q(k);
            if (a == b) {
                model.H(a, a) = h;
            } else {
                model.H(a, b) = h;
                model.H(b, a) = h;
            }
            ++k;
        }
    }
    return model;
}

QuadraticSubspaceModel build_diagonal_model(const InterpolationSet& set) {
    check_set_shape(set);
    if (set.kind != ModelKind::diagonal) {
        throw std::invalid_argument(
            "build_diagonal_model: set.kind must be diagonal");
    }
    const DiagonalLayout layout = detect_diagonal_layout(set);
    const int q = set.q;
    const double r = layout.radius;
    const double v0 = set.values[static_cast<std::size_t>(layout.center)];

    QuadraticSubspaceModel model;
    model.q = q;
    model.f0 = v0;
    model.g.resize(q);
    model.H = Eigen::MatrixXd::Zero(q, q);
    for (int c = 0; c < q; ++c) {
        const double vp = set.values[static_cast<std::size_t>(
            layout.plus[static_cast<std::size_t>(c)])];
        const double vm = set.values[static_cast<std::size_t>(
            layout.minus[static_cast<std::size_t>(c)])];
        model.g(c) = (vp - vm) / (2.0 * r);
        model.H(c, c) = (vp + vm - 2.0 * v0) / (r * r);
    }
    return model;
}

QuadraticSubspaceModel build_model(const InterpolationSet& set) {
    switch (set.kind) {
        case ModelKind::linear: return build_linear_model(set);
        case ModelKind::mfn: return build_mfn_model(set);
        case ModelKind::diagonal: return build_diagonal_model(set);
    }
    throw std::invalid_argument("build_model: unknown kind");
}

QuadraticSubspaceModel extend_linear_model(const QuadraticSubspaceModel& prev,
                                           double zeta, double delta_f) {
    if (zeta == 0.0) {
        throw std::invalid_argument(
            "extend_linear_model: zeta must be nonzero");
    }
    if (prev.q < 1 || prev.g.size() != prev.q) {
        throw std::invalid_argument("extend_linear_model: malformed model");
    }
    if (prev.H.size() > 0 && !prev.H.isZero(0.0)) {
        throw std::invalid_argument(
            "extend_linear_model: model must have a zero Hessian");
    }
    const double qhat = subspace_growth_factor(prev.q);

    QuadraticSubspaceModel next;
    next.q = prev.q + 1;
    next.f0 = prev.f0;
    next.g.resize(next.q);
    next.g.head(prev.q) = prev.g / qhat;
    next.g(prev.q) = delta_f / zeta;
    next.H = Eigen::MatrixXd::Zero(next.q, next.q);
    return next;
}

InterpolationSet extend_interpolation_set(const InterpolationSet& prev,
                                          double zeta,
                                          const std::vector<double>& new_values) {
    check_set_shape(prev);
    const int q = prev.q;
    const double qhat = subspace_growth_factor(q);

    InterpolationSet next;
    next.q = q + 1;
    next.kind = prev.kind;
    next.radius = qhat * prev.radius;
    next.points.reserve(prev.points.size() + 2);
    next.values = prev.values;
    for (const auto& p : prev.points) {
        Eigen::VectorXd mapped(q + 1);
        mapped.head(q) = qhat * p;
        mapped(q) = 0.0;
        next.points.push_back(std::move(mapped));
    }

    if (prev.kind == ModelKind::diagonal) {
        if (new_values.size() != 2) {
            throw std::invalid_argument(
                "extend_interpolation_set: diagonal kind needs two new values");
        }
        const double r = next.radius;
        next.points.push_back(r * Eigen::VectorXd::Unit(q + 1, q));
        next.points.push_back(-r * Eigen::VectorXd::Unit(q + 1, q));
        next.values.push_back(new_values[0]);
        next.values.push_back(new_values[1]);
    } else {
        if (new_values.size() != 1) {
            throw std::invalid_argument(
                "extend_interpolation_set: expected exactly one new value");
        }
        if (zeta == 0.0 || std::abs(zeta) > prev.radius * (1.0 + 1e-12)) {
            throw std::invalid_argument(
                "extend_interpolation_set: zeta must satisfy 0 < |zeta| <= radius");
        }
        next.points.push_back(zeta * Eigen::VectorXd::Unit(q + 1, q));
        next.values.push_back(new_values[0]);
    }
    return next;
}

double evaluate_model(const QuadraticSubspaceModel& model,
                      const Eigen::VectorXd& s) {
    if (s.size() != model.q) {
        throw std::invalid_argument("evaluate_model: dimension mismatch");
    }
    double value = model.f0 + model.g.dot(s);
    if (model.H.size() > 0) {
        value += 0.5 * s.dot(model.H * s);
    }
    return value;
}

} // namespace anastaars
