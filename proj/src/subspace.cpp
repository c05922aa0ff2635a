#include "anastaars/subspace.hpp"

#include <Eigen/QR>
#include <cmath>
#include <stdexcept>

namespace anastaars {

Eigen::VectorXd SubspaceBasis::embed(const Eigen::VectorXd& s) const {
    if (s.size() != q) {
        throw std::invalid_argument("embed: coordinate size does not match q");
    }
    return scale * (U * s);
}

Eigen::MatrixXd SubspaceBasis::embedding() const { return scale * U; }

SubspaceBasis sample_haar_basis(int d, int q, Rng& rng) {
    if (d < 1 || q < 1 || q > d) {
        throw std::invalid_argument("sample_haar_basis: need 1 <= q <= d");
    }
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd G(d, q);
    for (int j = 0; j < q; ++j) {
        for (int i = 0; i < d; ++i) {
            G(i, j) = gauss(rng);
        }
    }

    Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
    Eigen::MatrixXd U = qr.householderQ() * Eigen::MatrixXd::Identity(d, q);
    const Eigen::MatrixXd& QR = qr.matrixQR();
    for (int j = 0; j < q; ++j) {
        if (QR(j, j) < 0.0) {
            U.col(j) = -U.col(j);
        }
    }

    SubspaceBasis basis;
    basis.d = d;
    basis.q = q;
    basis.U = std::move(U);
    basis.scale = std::sqrt(static_cast<double>(d) / static_cast<double>(q));
    return basis;
}

SubspaceBasis extend_basis(const SubspaceBasis& basis, Rng& rng) {
    const int d = basis.d;
    const int q = basis.q;
    if (q >= d) {
        throw std::invalid_argument("extend_basis: subspace already spans R^d");
    }

    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd mu;
    for (;;) {
        Eigen::VectorXd g(d);
        for (int i = 0; i < d; ++i) {
            g(i) = gauss(rng);
        }
        // Project out the existing span; a nearly vanishing residual means g
        // landed (numerically) inside it, so redraw rather than normalize
        // noise.
        Eigen::VectorXd w = g - basis.U * (basis.U.transpose() * g);
        const double wn = w.norm();
        if (wn >= 1e-8 * g.norm()) {
            mu = w / wn;
            break;
        }
    }

    SubspaceBasis out;
    out.d = d;
    out.q = q + 1;
    out.U.resize(d, q + 1);
    out.U.leftCols(q) = basis.U;
    out.U.col(q) = mu;
    out.scale = std::sqrt(static_cast<double>(d) / static_cast<double>(q + 1));
    return out;
}

double alignment_ratio(const SubspaceBasis& basis, const Eigen::VectorXd& v) {
    if (v.size() != basis.d) {
        throw std::invalid_argument("alignment_ratio: vector size does not match d");
    }
    const double vn = v.norm();
    if (vn == 0.0) {
        throw std::invalid_argument("alignment_ratio: zero vector");
    }
    return basis.scale * (basis.U.transpose() * v).norm() / vn;
}

} // namespace anastaars
