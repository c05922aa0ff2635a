#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "anastaars/models.hpp"
#include "anastaars/rng.hpp"
#include "anastaars/subspace.hpp"

using namespace anastaars;

namespace {

InterpolationSet make_set(int q, ModelKind kind, double delta,
                          const std::vector<double>& values) {
    InterpolationSet set;
    set.q = q;
    set.kind = kind;
    set.points = generate_poised_set(q, delta, kind);
    set.values = values;
    set.radius = delta;
    return set;
}

// Natural-basis rows assembled from scratch, kept separate from the library
// so the tests do not inherit its conventions by accident.
Eigen::MatrixXd ref_linear_rows(const std::vector<Eigen::VectorXd>& pts,
                                int q) {
    Eigen::MatrixXd M(static_cast<int>(pts.size()), q + 1);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        M(static_cast<int>(i), 0) = 1.0;
        for (int c = 0; c < q; ++c) M(static_cast<int>(i), 1 + c) = pts[i](c);
    }
    return M;
}

Eigen::MatrixXd ref_quadratic_rows(const std::vector<Eigen::VectorXd>& pts,
                                   int q) {
    const int nq = q * (q + 1) / 2;
    Eigen::MatrixXd M(static_cast<int>(pts.size()), nq);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        int k = 0;
        for (int a = 0; a < q; ++a) {
            for (int b = a; b < q; ++b) {
                M(static_cast<int>(i), k++) =
                    (a == b) ? 0.5 * pts[i](a) * pts[i](a)
                             : pts[i](a) * pts[i](b);
            }
        }
    }
    return M;
}

Eigen::VectorXd quadratic_coeffs_of(const QuadraticSubspaceModel& model) {
    const int q = model.q;
    Eigen::VectorXd alpha(q * (q + 1) / 2);
    int k = 0;
    for (int a = 0; a < q; ++a) {
        for (int b = a; b < q; ++b) {
            alpha(k++) = model.H(a, b);
        }
    }
    return alpha;
}

Eigen::VectorXd random_ball_point(int q, double delta, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Eigen::VectorXd s(q);
    for (int i = 0; i < q; ++i) s(i) = gauss(rng);
    s.normalize();
    return delta * std::pow(unif(rng), 1.0 / q) * s;
}

} // namespace

TEST_CASE("model kind names round-trip") {
    CHECK(model_kind_from_string("linear") == ModelKind::linear);
    CHECK(model_kind_from_string("mfn") == ModelKind::mfn);
    CHECK(model_kind_from_string("diagonal") == ModelKind::diagonal);
    CHECK(to_string(ModelKind::diagonal) == "diagonal");
    CHECK_THROWS_AS(model_kind_from_string("quadratic"), std::invalid_argument);
}

TEST_CASE("fresh layouts") {
    SUBCASE("linear keeps q+1 points") {
        const auto pts = generate_poised_set(1, 0.5, ModelKind::linear);
        REQUIRE(pts.size() == 2);
        CHECK(pts[0](0) == 0.0);
        CHECK(pts[1](0) == 0.5);
    }
    SUBCASE("diagonal stencil ordering: center, all plus, all minus") {
        const auto pts = generate_poised_set(2, 1.0, ModelKind::diagonal);
        REQUIRE(pts.size() == 5);
        Eigen::MatrixXd expect(5, 2);
        expect << 0, 0, 1, 0, 0, 1, -1, 0, 0, -1;
        for (int i = 0; i < 5; ++i) {
            CHECK(pts[static_cast<std::size_t>(i)](0) == expect(i, 0));
            CHECK(pts[static_cast<std::size_t>(i)](1) == expect(i, 1));
        }
    }
    SUBCASE("mfn uses the same 2q+1 stencil") {
        const auto a = generate_poised_set(3, 0.25, ModelKind::mfn);
        const auto b = generate_poised_set(3, 0.25, ModelKind::diagonal);
        REQUIRE(a.size() == 7);
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
    }
    SUBCASE("argument validation") {
        CHECK_THROWS_AS(generate_poised_set(0, 1.0, ModelKind::linear),
                        std::invalid_argument);
        CHECK_THROWS_AS(generate_poised_set(2, 0.0, ModelKind::mfn),
                        std::invalid_argument);
        CHECK_THROWS_AS(generate_poised_set(2, -1.0, ModelKind::diagonal),
                        std::invalid_argument);
    }
}

TEST_CASE("poisedness estimate is scale free and small on fresh layouts") {
    for (ModelKind kind :
         {ModelKind::linear, ModelKind::mfn, ModelKind::diagonal}) {
        const int q = 3;
        const int n = (kind == ModelKind::linear) ? q + 1 : 2 * q + 1;
        const std::vector<double> vals(static_cast<std::size_t>(n), 0.0);
        const InterpolationSet tiny = make_set(q, kind, 1e-3, vals);
        const InterpolationSet big = make_set(q, kind, 10.0, vals);
        const double ct = interpolation_condition(tiny);
        const double cb = interpolation_condition(big);
        CHECK(ct < 100.0);
        CHECK(std::abs(ct - cb) <= 1e-9 * cb);
    }
}

TEST_CASE("linear model from axis data") {
    SUBCASE("one dimension") {
        const InterpolationSet set =
            make_set(1, ModelKind::linear, 1.0, {0.0, 1.0});
        const QuadraticSubspaceModel m = build_linear_model(set);
        CHECK(m.f0 == 0.0);
        CHECK(m.g(0) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(m.H.isZero(0.0));
    }
    SUBCASE("two dimensions") {
        const InterpolationSet set =
            make_set(2, ModelKind::linear, 1.0, {1.0, 3.0, 0.0});
        const QuadraticSubspaceModel m = build_linear_model(set);
        CHECK(m.f0 == 1.0);
        CHECK(m.g(0) == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(m.g(1) == doctest::Approx(-1.0).epsilon(1e-14));
    }
}

TEST_CASE("linear model matches a hand Cramer solve on skew points") {
    InterpolationSet set;
    set.q = 2;
    set.kind = ModelKind::linear;
    set.radius = 0.6;
    set.points.push_back(Eigen::VectorXd::Zero(2));
    Eigen::VectorXd p1(2), p2(2);
    p1 << 0.5, 0.1;
    p2 << 0.2, 0.4;
    set.points.push_back(p1);
    set.points.push_back(p2);
    // values of f(s) = 2 s1 - s2 at the three points
    set.values = {0.0, 0.9, 0.0};

    const QuadraticSubspaceModel m = build_linear_model(set);
    // Cramer: det = 0.5*0.4 - 0.1*0.2 = 0.18
    const double det = 0.18;
    const double g1 = (0.9 * 0.4 - 0.1 * 0.0) / det;
    const double g2 = (0.5 * 0.0 - 0.2 * 0.9) / det;
    CHECK(std::abs(m.g(0) - g1) <= 1e-10);
    CHECK(std::abs(m.g(1) - g2) <= 1e-10);
    CHECK(std::abs(m.g(0) - 2.0) <= 1e-10);
    CHECK(std::abs(m.g(1) + 1.0) <= 1e-10);
}

TEST_CASE("linear model interpolates random data") {
    Rng rng(20u);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int rep = 0; rep < 50; ++rep) {
        const int q = 1 + static_cast<int>(rng() % 6);
        InterpolationSet set;
        set.q = q;
        set.kind = ModelKind::linear;
        set.radius = 1.0;
        set.points.push_back(Eigen::VectorXd::Zero(q));
        set.values.push_back(gauss(rng));
        for (int i = 0; i < q; ++i) {
            Eigen::VectorXd p(q);
            for (int c = 0; c < q; ++c) p(c) = gauss(rng);
            set.points.push_back(0.7 * p.normalized() +
                                 Eigen::VectorXd::Unit(q, i));
            set.values.push_back(gauss(rng));
        }
        const QuadraticSubspaceModel m = build_linear_model(set);
        for (std::size_t i = 0; i < set.points.size(); ++i) {
            const double pred = evaluate_model(m, set.points[i]);
            CHECK(std::abs(pred - set.values[i]) <=
                  1e-10 * std::max(1.0, std::abs(set.values[i])));
        }
    }
}

TEST_CASE("degenerate linear geometry is refused with a condition payload") {
    InterpolationSet set;
    set.q = 2;
    set.kind = ModelKind::linear;
    set.radius = 2.0;
    set.points.push_back(Eigen::VectorXd::Zero(2));
    Eigen::VectorXd p1(2), p2(2);
    p1 << 1.0, 0.0;
    p2 << 2.0, 0.0;  // collinear with p1
    set.points.push_back(p1);
    set.points.push_back(p2);
    set.values = {0.0, 1.0, 2.0};

    bool threw = false;
    try {
        build_linear_model(set);
    } catch (const PoisednessError& err) {
        threw = true;
        CHECK(err.condition() > 1e8);
    }
    CHECK(threw);
}

TEST_CASE("interpolation set shape errors") {
    InterpolationSet set = make_set(2, ModelKind::linear, 1.0, {0.0, 1.0, 2.0});
    SUBCASE("value count mismatch") {
        set.values.pop_back();
        CHECK_THROWS_AS(build_linear_model(set), std::invalid_argument);
    }
    SUBCASE("first point must be the origin") {
        set.points[0] = Eigen::VectorXd::Constant(2, 0.1);
        CHECK_THROWS_AS(build_linear_model(set), std::invalid_argument);
    }
    SUBCASE("radius must be positive") {
        set.radius = 0.0;
        CHECK_THROWS_AS(build_linear_model(set), std::invalid_argument);
    }
    SUBCASE("kind dispatch is strict") {
        CHECK_THROWS_AS(build_mfn_model(set), std::invalid_argument);
        CHECK_THROWS_AS(build_diagonal_model(set), std::invalid_argument);
    }
}

TEST_CASE("closed-form linear extension") {
    SUBCASE("worked one-dimensional case") {
        QuadraticSubspaceModel prev;
        prev.q = 1;
        prev.f0 = 1.5;
        prev.g = Eigen::VectorXd::Constant(1, 2.0);
        prev.H = Eigen::MatrixXd::Zero(1, 1);
        const QuadraticSubspaceModel next =
            extend_linear_model(prev, 0.5, 1.0);
        CHECK(next.q == 2);
        CHECK(next.f0 == 1.5);
        CHECK(next.g(0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
        CHECK(next.g(1) == doctest::Approx(2.0).epsilon(1e-15));
        CHECK(next.H.isZero(0.0));
    }
    SUBCASE("flat value difference gives a flat new direction") {
        QuadraticSubspaceModel prev;
        prev.q = 3;
        prev.f0 = 0.0;
        prev.g = Eigen::VectorXd::Ones(3);
        prev.H = Eigen::MatrixXd::Zero(3, 3);
        const QuadraticSubspaceModel next =
            extend_linear_model(prev, -0.25, 0.0);
        CHECK(next.g(3) == 0.0);
        CHECK(next.g(0) ==
              doctest::Approx(1.0 / subspace_growth_factor(3)).epsilon(1e-15));
    }
    SUBCASE("zeta must be nonzero and the Hessian flat") {
        QuadraticSubspaceModel prev;
        prev.q = 1;
        prev.g = Eigen::VectorXd::Ones(1);
        prev.H = Eigen::MatrixXd::Constant(1, 1, 0.5);
        CHECK_THROWS_AS(extend_linear_model(prev, 0.0, 1.0),
                        std::invalid_argument);
        CHECK_THROWS_AS(extend_linear_model(prev, 0.5, 1.0),
                        std::invalid_argument);
    }
}

TEST_CASE("linear extension agrees with the full block system") {
    Rng rng(77u);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.1, 1.0);
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const int q = 1 + static_cast<int>(rng() % 20);
        Eigen::MatrixXd L(q, q);
        do {
            for (int i = 0; i < q; ++i)
                for (int j = 0; j < q; ++j) L(i, j) = gauss(rng);
        } while (std::abs(L.determinant()) < 1e-6);
        Eigen::VectorXd g(q);
        for (int i = 0; i < q; ++i) g(i) = gauss(rng);
        const double zeta = (rng() % 2 ? 1.0 : -1.0) * unif(rng);
        const double delta_f = gauss(rng);

        QuadraticSubspaceModel prev;
        prev.q = q;
        prev.f0 = gauss(rng);
        prev.g = g;
        prev.H = Eigen::MatrixXd::Zero(q, q);
        const QuadraticSubspaceModel fast =
            extend_linear_model(prev, zeta, delta_f);

        // reference: re-solve the extended interpolation system directly.
        // Old displacement rows scale by q-hat and gain a zero coordinate;
        // the one new row is zeta e^{q+1}.
        const double qhat = subspace_growth_factor(q);
        Eigen::MatrixXd Lp = Eigen::MatrixXd::Zero(q + 1, q + 1);
        Lp.topLeftCorner(q, q) = qhat * L;
        Lp(q, q) = zeta;
        Eigen::VectorXd rhs(q + 1);
        rhs.head(q) = L * g;  // the old value differences
        rhs(q) = delta_f;
        const Eigen::VectorXd gp = Lp.colPivHouseholderQr().solve(rhs);
        worst = std::max(worst, (fast.g - gp).cwiseAbs().maxCoeff());
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("minimum-norm quadratic recovers a diagonal quadratic from its "
          "stencil") {
    const double d = 0.5;
    InterpolationSet set;
    set.q = 2;
    set.kind = ModelKind::mfn;
    set.radius = d;
    set.points = generate_poised_set(2, d, ModelKind::mfn);
    // f(s) = s1^2 + 2 s2^2 -> H = diag(2, 4)
    for (const auto& p : set.points) {
        set.values.push_back(p(0) * p(0) + 2.0 * p(1) * p(1));
    }
    const QuadraticSubspaceModel m = build_mfn_model(set);
    CHECK(std::abs(m.f0) <= 1e-8);
    CHECK(m.g.cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(std::abs(m.H(0, 0) - 2.0) <= 1e-8);
    CHECK(std::abs(m.H(1, 1) - 4.0) <= 1e-8);
    CHECK(std::abs(m.H(0, 1)) <= 1e-8);
}

TEST_CASE("minimum-norm quadratic leaves curvature at zero when the data is "
          "flat or linear") {
    SUBCASE("constant data") {
        const InterpolationSet set = make_set(
            2, ModelKind::mfn, 1.0, {3.0, 3.0, 3.0, 3.0, 3.0});
        const QuadraticSubspaceModel m = build_mfn_model(set);
        CHECK(std::abs(m.f0 - 3.0) <= 1e-10);
        CHECK(m.g.cwiseAbs().maxCoeff() <= 1e-10);
        CHECK(m.H.cwiseAbs().maxCoeff() <= 1e-10);
    }
    SUBCASE("linear data") {
        InterpolationSet set;
        set.q = 2;
        set.kind = ModelKind::mfn;
        set.radius = 1.0;
        set.points = generate_poised_set(2, 1.0, ModelKind::mfn);
        for (const auto& p : set.points) {
            set.values.push_back(3.0 * p(0) - p(1));
        }
        const QuadraticSubspaceModel m = build_mfn_model(set);
        CHECK(std::abs(m.g(0) - 3.0) <= 1e-9);
        CHECK(std::abs(m.g(1) + 1.0) <= 1e-9);
        CHECK(m.H.cwiseAbs().maxCoeff() <= 1e-9);
    }
    SUBCASE("minimal point count reduces to plain linear interpolation") {
        InterpolationSet set;
        set.q = 2;
        set.kind = ModelKind::mfn;
        set.radius = 1.0;
        set.points = generate_poised_set(2, 1.0, ModelKind::linear);
        set.values = {1.0, 3.0, 0.0};
        const QuadraticSubspaceModel m = build_mfn_model(set);
        CHECK(std::abs(m.f0 - 1.0) <= 1e-9);
        CHECK(std::abs(m.g(0) - 2.0) <= 1e-9);
        CHECK(std::abs(m.g(1) + 1.0) <= 1e-9);
        CHECK(m.H.cwiseAbs().maxCoeff() <= 1e-9);
    }
}

TEST_CASE("minimum-norm quadratic satisfies the optimality conditions") {
    Rng rng(303u);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        const int q = 2 + static_cast<int>(rng() % 5);
        InterpolationSet set;
        set.q = q;
        set.kind = ModelKind::mfn;
        set.radius = 0.5;
        set.points = generate_poised_set(q, 0.5, ModelKind::mfn);
        for (std::size_t i = 0; i < set.points.size(); ++i) {
            set.values.push_back(gauss(rng));
        }
        const QuadraticSubspaceModel m = build_mfn_model(set);

        // interpolation
        for (std::size_t i = 0; i < set.points.size(); ++i) {
            CHECK(std::abs(evaluate_model(m, set.points[i]) - set.values[i]) <=
                  1e-8 * std::max(1.0, std::abs(set.values[i])));
        }

        // stationarity: some multiplier lambda must satisfy both
        // MQ^T lambda = alpha_Q and ML^T lambda = 0.  Solve the stacked
        // system in least squares; its residual vanishes only at the true
        // constrained minimizer.
        const Eigen::MatrixXd ML = ref_linear_rows(set.points, q);
        const Eigen::MatrixXd MQ = ref_quadratic_rows(set.points, q);
        const int n = static_cast<int>(set.points.size());
        const int nq = q * (q + 1) / 2;
        Eigen::MatrixXd S(nq + q + 1, n);
        S.topRows(nq) = MQ.transpose();
        S.bottomRows(q + 1) = ML.transpose();
        Eigen::VectorXd target(nq + q + 1);
        target.head(nq) = quadratic_coeffs_of(m);
        target.tail(q + 1).setZero();
        const Eigen::VectorXd lambda = S.colPivHouseholderQr().solve(target);
        const double resid = (S * lambda - target).norm();
        CHECK(resid <= 1e-8 * std::max(1.0, target.norm()));

        // the curvature coefficients are orthogonal to every feasible
        // direction: for kernel vectors z of [ML MQ], alpha_Q . z_Q = 0.
        Eigen::MatrixXd MLQ(n, (q + 1) + nq);
        MLQ.leftCols(q + 1) = ML;
        MLQ.rightCols(nq) = MQ;
        const Eigen::MatrixXd kernel = Eigen::FullPivLU<Eigen::MatrixXd>(MLQ)
                                           .kernel();
        for (int c = 0; c < kernel.cols(); ++c) {
            const Eigen::VectorXd zq = kernel.col(c).tail(nq);
            CHECK(std::abs(target.head(nq).dot(zq)) <=
                  1e-8 * std::max(1.0, zq.norm()) *
                      std::max(1.0, target.norm()));
        }
    }
}

TEST_CASE("duplicate points make the saddle system unsolvable") {
    InterpolationSet set;
    set.q = 2;
    set.kind = ModelKind::mfn;
    set.radius = 1.0;
    set.points = generate_poised_set(2, 1.0, ModelKind::mfn);
    set.points[4] = set.points[1];  // repeat the +e1 point
    set.values = {0.0, 1.0, 2.0, 3.0, 4.0};
    CHECK_THROWS_AS(build_mfn_model(set), PoisednessError);
}

TEST_CASE("mfn point count window") {
    InterpolationSet set;
    set.q = 2;
    set.kind = ModelKind::mfn;
    set.radius = 1.0;
    set.points = {Eigen::VectorXd::Zero(2), Eigen::VectorXd::Unit(2, 0)};
    set.values = {0.0, 1.0};
    CHECK_THROWS_AS(build_mfn_model(set), std::invalid_argument);
}

TEST_CASE("central differences on the stencil") {
    SUBCASE("pure curvature") {
        const InterpolationSet set =
            make_set(1, ModelKind::diagonal, 1.0, {0.0, 1.0, 1.0});
        const QuadraticSubspaceModel m = build_diagonal_model(set);
        CHECK(m.f0 == 0.0);
        CHECK(m.g(0) == 0.0);
        CHECK(m.H(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
    }
    SUBCASE("pure slope") {
        const InterpolationSet set =
            make_set(1, ModelKind::diagonal, 1.0, {0.0, 1.0, -1.0});
        const QuadraticSubspaceModel m = build_diagonal_model(set);
        CHECK(m.g(0) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(m.H(0, 0) == 0.0);
    }
    SUBCASE("mixed two-dimensional case") {
        // f(s) = s1 + s1^2 + 3 s2^2 sampled at radius 0.5
        const InterpolationSet set = make_set(
            2, ModelKind::diagonal, 0.5, {0.0, 0.75, 0.75, -0.25, 0.75});
        const QuadraticSubspaceModel m = build_diagonal_model(set);
        CHECK(std::abs(m.g(0) - 1.0) <= 1e-12);
        CHECK(std::abs(m.g(1)) <= 1e-12);
        CHECK(std::abs(m.H(0, 0) - 2.0) <= 1e-12);
        CHECK(std::abs(m.H(1, 1) - 6.0) <= 1e-12);
        CHECK(m.H(0, 1) == 0.0);
    }
}

TEST_CASE("central differences match a direct natural-basis solve") {
    Rng rng(550u);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> radius_dist(0.05, 2.0);
    double worst = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        const int q = 1 + static_cast<int>(rng() % 8);
        const double delta = radius_dist(rng);
        InterpolationSet set;
        set.q = q;
        set.kind = ModelKind::diagonal;
        set.radius = delta;
        set.points = generate_poised_set(q, delta, ModelKind::diagonal);
        for (std::size_t i = 0; i < set.points.size(); ++i) {
            set.values.push_back(gauss(rng));
        }
        const QuadraticSubspaceModel m = build_diagonal_model(set);

        // reference: square solve of [1, s, s^2/2] h = values
        const int n = 2 * q + 1;
        Eigen::MatrixXd M(n, n);
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) {
            const Eigen::VectorXd& s = set.points[static_cast<std::size_t>(i)];
            M(i, 0) = 1.0;
            for (int c = 0; c < q; ++c) {
                M(i, 1 + c) = s(c);
                M(i, 1 + q + c) = 0.5 * s(c) * s(c);
            }
            v(i) = set.values[static_cast<std::size_t>(i)];
        }
        const Eigen::VectorXd h = M.colPivHouseholderQr().solve(v);
        worst = std::max(worst, std::abs(m.f0 - h(0)));
        for (int c = 0; c < q; ++c) {
            worst = std::max(worst, std::abs(m.g(c) - h(1 + c)));
            worst = std::max(worst, std::abs(m.H(c, c) - h(1 + q + c)));
            for (int c2 = 0; c2 < q; ++c2) {
                if (c2 != c) worst = std::max(worst, std::abs(m.H(c, c2)));
            }
        }
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("central differences reproduce separable quadratics everywhere") {
    Rng rng(808u);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> radius_dist(0.1, 2.0);
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const int q = 1 + static_cast<int>(rng() % 8);
        const double delta = radius_dist(rng);
        const double c0 = gauss(rng);
        Eigen::VectorXd b(q), h(q);
        for (int i = 0; i < q; ++i) {
            b(i) = gauss(rng);
            h(i) = gauss(rng);
        }
        auto f = [&](const Eigen::VectorXd& s) {
            double v = c0 + b.dot(s);
            for (int i = 0; i < q; ++i) v += 0.5 * h(i) * s(i) * s(i);
            return v;
        };
        InterpolationSet set;
        set.q = q;
        set.kind = ModelKind::diagonal;
        set.radius = delta;
        set.points = generate_poised_set(q, delta, ModelKind::diagonal);
        for (const auto& p : set.points) set.values.push_back(f(p));
        const QuadraticSubspaceModel m = build_diagonal_model(set);
        for (int t = 0; t < 50; ++t) {
            const Eigen::VectorXd s = random_ball_point(q, delta, rng);
            worst = std::max(worst, std::abs(evaluate_model(m, s) - f(s)));
        }
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("stencil shape violations are reported") {
    InterpolationSet set =
        make_set(2, ModelKind::diagonal, 1.0, {0.0, 1.0, 2.0, 3.0, 4.0});
    SUBCASE("off-axis point") {
        set.points[2] = Eigen::VectorXd::Constant(2, 1.0);
        CHECK_THROWS_AS(build_diagonal_model(set), std::invalid_argument);
    }
    SUBCASE("missing minus point") {
        set.points[3] = set.points[1];
        CHECK_THROWS_AS(build_diagonal_model(set), std::invalid_argument);
    }
    SUBCASE("mixed radii") {
        set.points[2] = 2.0 * Eigen::VectorXd::Unit(2, 1);
        CHECK_THROWS_AS(build_diagonal_model(set), std::invalid_argument);
    }
    SUBCASE("wrong point count") {
        set.points.pop_back();
        set.values.pop_back();
        CHECK_THROWS_AS(build_diagonal_model(set), std::invalid_argument);
    }
}

TEST_CASE("set extension maps old points and appends the new direction") {
    SUBCASE("linear kind") {
        InterpolationSet prev;
        prev.q = 1;
        prev.kind = ModelKind::linear;
        prev.radius = 0.4;
        prev.points = {Eigen::VectorXd::Zero(1),
                       Eigen::VectorXd::Constant(1, 0.4)};
        prev.values = {1.0, 2.0};
        const InterpolationSet next =
            extend_interpolation_set(prev, 0.3, {5.0});
        REQUIRE(next.points.size() == 3);
        REQUIRE(next.values.size() == 3);
        CHECK(next.q == 2);
        const double qhat = subspace_growth_factor(1);
        CHECK(next.points[1](0) ==
              doctest::Approx(0.4 * qhat).epsilon(1e-15));
        CHECK(next.points[1](1) == 0.0);
        CHECK(next.points[2](0) == 0.0);
        CHECK(next.points[2](1) == 0.3);
        CHECK(next.values[0] == 1.0);
        CHECK(next.values[1] == 2.0);
        CHECK(next.values[2] == 5.0);
        CHECK(next.radius == doctest::Approx(0.4 * qhat).epsilon(1e-15));
    }
    SUBCASE("diagonal kind appends a full +/- pair") {
        InterpolationSet prev =
            make_set(2, ModelKind::diagonal, 1.0, {0.0, 1.0, 2.0, 3.0, 4.0});
        const InterpolationSet next =
            extend_interpolation_set(prev, 0.0, {7.0, 8.0});
        REQUIRE(next.points.size() == 7);
        const double r = std::sqrt(1.5);
        CHECK(next.points[5](2) == doctest::Approx(r).epsilon(1e-15));
        CHECK(next.points[5].head(2).isZero(0.0));
        CHECK(next.points[6](2) == doctest::Approx(-r).epsilon(1e-15));
        CHECK(next.values[5] == 7.0);
        CHECK(next.values[6] == 8.0);
        CHECK(next.radius == doctest::Approx(r).epsilon(1e-15));
        // extended stencil still builds through the closed forms
        const QuadraticSubspaceModel m = build_diagonal_model(next);
        CHECK(m.q == 3);
    }
    SUBCASE("mfn kind takes one value like linear") {
        InterpolationSet prev =
            make_set(2, ModelKind::mfn, 1.0, {0.0, 1.0, 2.0, 3.0, 4.0});
        const InterpolationSet next =
            extend_interpolation_set(prev, -0.5, {9.0});
        CHECK(next.points.size() == 6);
        CHECK(next.points[5](2) == -0.5);
        const QuadraticSubspaceModel m = build_mfn_model(next);
        CHECK(m.q == 3);
        for (std::size_t i = 0; i < next.points.size(); ++i) {
            CHECK(std::abs(evaluate_model(m, next.points[i]) -
                           next.values[i]) <= 1e-8);
        }
    }
    SUBCASE("offset constraints") {
        InterpolationSet prev =
            make_set(2, ModelKind::mfn, 1.0, {0.0, 1.0, 2.0, 3.0, 4.0});
        CHECK_THROWS_AS(extend_interpolation_set(prev, 0.0, {9.0}),
                        std::invalid_argument);
        CHECK_THROWS_AS(extend_interpolation_set(prev, 1.5, {9.0}),
                        std::invalid_argument);
        CHECK_THROWS_AS(extend_interpolation_set(prev, 0.5, {9.0, 9.0}),
                        std::invalid_argument);
        InterpolationSet diag =
            make_set(2, ModelKind::diagonal, 1.0, {0.0, 1.0, 2.0, 3.0, 4.0});
        CHECK_THROWS_AS(extend_interpolation_set(diag, 0.0, {9.0}),
                        std::invalid_argument);
    }
}

TEST_CASE("model evaluation") {
    QuadraticSubspaceModel m;
    m.q = 1;
    m.f0 = 1.0;
    m.g = Eigen::VectorXd::Constant(1, 2.0);
    m.H = Eigen::MatrixXd::Constant(1, 1, 4.0);
    CHECK(evaluate_model(m, Eigen::VectorXd::Zero(1)) == 1.0);
    CHECK(evaluate_model(m, Eigen::VectorXd::Ones(1)) ==
          doctest::Approx(5.0).epsilon(1e-15));
    CHECK_THROWS_AS(evaluate_model(m, Eigen::VectorXd::Zero(2)),
                    std::invalid_argument);
}

TEST_CASE("build_model dispatches on kind") {
    const InterpolationSet lin =
        make_set(1, ModelKind::linear, 1.0, {0.0, 1.0});
    CHECK(build_model(lin).H.isZero(0.0));
    const InterpolationSet diag =
        make_set(1, ModelKind::diagonal, 1.0, {0.0, 1.0, 1.0});
    CHECK(build_model(diag).H(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
}
