#pragma once

#include <Eigen/Core>
#include <cmath>

#include "anastaars/rng.hpp"

namespace anastaars {

/// Orthonormal basis U of a q-dimensional subspace of R^d together with the
/// sqrt(d/q) factor that makes the embedding Q = scale * U an isometry in
/// expectation: E ||Q^T v||^2 = ||v||^2 for any fixed v.
struct SubspaceBasis {
    int d = 0;
    int q = 0;
    Eigen::MatrixXd U;   // d x q, U^T U = I_q
    double scale = 0.0;  // sqrt(d / q)

    /// Full-space direction corresponding to subspace coordinates s.
    Eigen::VectorXd embed(const Eigen::VectorXd& s) const;

    /// The d x q embedding matrix Q = scale * U.
    Eigen::MatrixXd embedding() const;
};

/// Draws U uniformly from the Stiefel manifold of d x q orthonormal frames:
/// a Gaussian matrix is QR-factored and each column of the thin Q is flipped
/// to make the matching diagonal entry of R positive.  Without that sign fix
/// the Householder convention would bias the distribution.
SubspaceBasis sample_haar_basis(int d, int q, Rng& rng);

/// Appends one uniformly random direction from the orthogonal complement of
/// span(U), leaving the first q columns untouched and refreshing the scale
/// for the enlarged dimension.
SubspaceBasis extend_basis(const SubspaceBasis& basis, Rng& rng);

/// ||Q^T v|| / ||v|| for the embedding Q; its square averages to one over
/// Haar draws of the basis.
double alignment_ratio(const SubspaceBasis& basis, const Eigen::VectorXd& v);

/// q-hat = sqrt(1 + 1/q), the factor by which subspace coordinates shrink
/// when the basis gains a column: x + Q s equals x + Q' (q-hat * s, 0).
inline double subspace_growth_factor(int q) {
    return std::sqrt(1.0 + 1.0 / static_cast<double>(q));
}

} // namespace anastaars
