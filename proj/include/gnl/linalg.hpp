#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>

namespace gnl {

/// Largest singular value of x. Exactly diagonal and exactly symmetric
/// inputs take eigenvalue fast paths; everything else goes through a full
/// singular value decomposition. Deterministic for fixed input.
double spectral_norm(const Eigen::MatrixXd& x);

/// rows x cols matrix of independent standard normals drawn from the
/// counter stream under `key` (row-major fill order).
Eigen::MatrixXd gaussian_matrix(int rows, int cols, std::uint64_t key);

/// Symmetric matrix (g + g^T) / 2 with g Gaussian under `key`.
Eigen::MatrixXd random_symmetric(int d, std::uint64_t key);

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// R diagonal forced positive.
Eigen::MatrixXd random_orthogonal(int d, std::uint64_t key);

/// Orthonormalizes the columns of g (thin QR, positive R diagonal).
/// Throws std::invalid_argument when g is numerically rank deficient.
Eigen::MatrixXd orthonormal_columns(const Eigen::MatrixXd& g);

/// Eigendecomposition of a symmetric positive semidefinite matrix with the
/// tolerance policy shared by every consumer: eigenvalues in
/// [-1e-10 * ||b||, 0) clip to zero, anything lower throws
/// std::invalid_argument. Returns (eigenvectors, clipped eigenvalues).
std::pair<Eigen::MatrixXd, Eigen::VectorXd> psd_eigs(const Eigen::MatrixXd& b);

/// Symmetric square root via psd_eigs.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& b);

}  // namespace gnl
