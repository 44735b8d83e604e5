#include "gnl/linalg.hpp"

#include <cmath>
#include <stdexcept>

#include "gnl/rng.hpp"

namespace gnl {

namespace {

bool exactly_diagonal(const Eigen::MatrixXd& x) {
  if (x.rows() != x.cols()) return false;
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      if (i != j && x(i, j) != 0.0) return false;
  return true;
}

bool exactly_symmetric(const Eigen::MatrixXd& x) {
  if (x.rows() != x.cols()) return false;
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    for (Eigen::Index i = j + 1; i < x.rows(); ++i)
      if (x(i, j) != x(j, i)) return false;
  return true;
}

}  // namespace

double spectral_norm(const Eigen::MatrixXd& x) {
  if (x.size() == 0) throw std::invalid_argument("spectral_norm: empty matrix");
  if (exactly_diagonal(x)) return x.diagonal().cwiseAbs().maxCoeff();
  if (exactly_symmetric(x)) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x,
                                                      Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(x);
  return svd.singularValues()(0);
}

Eigen::MatrixXd gaussian_matrix(int rows, int cols, std::uint64_t key) {
  if (rows <= 0 || cols <= 0)
    throw std::invalid_argument("gaussian_matrix: nonpositive shape");
  Eigen::MatrixXd g(rows, cols);
  rng::NormalStream stream(key);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) g(i, j) = stream.next();
  return g;
}

Eigen::MatrixXd random_symmetric(int d, std::uint64_t key) {
  Eigen::MatrixXd g = gaussian_matrix(d, d, key);
  return 0.5 * (g + g.transpose()).eval();
}

Eigen::MatrixXd orthonormal_columns(const Eigen::MatrixXd& g) {
  if (g.rows() < g.cols())
    throw std::invalid_argument("orthonormal_columns: more columns than rows");
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() *
                      Eigen::MatrixXd::Identity(g.rows(), g.cols());
  const Eigen::MatrixXd& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    const double piv = r(j, j);
    if (std::abs(piv) < 1e-12 * std::sqrt(static_cast<double>(g.rows())))
      throw std::invalid_argument("orthonormal_columns: rank deficient input");
    if (piv < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

Eigen::MatrixXd random_orthogonal(int d, std::uint64_t key) {
  return orthonormal_columns(gaussian_matrix(d, d, key));
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> psd_eigs(const Eigen::MatrixXd& b) {
  if (b.rows() != b.cols())
    throw std::invalid_argument("psd_eigs: matrix not square");
  if (!b.isApprox(b.transpose(), 1e-10))
    throw std::invalid_argument("psd_eigs: matrix not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      0.5 * (b + b.transpose()).eval());
  Eigen::VectorXd lam = es.eigenvalues();
  const double norm = lam.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam(i) < -1e-10 * norm)
      throw std::invalid_argument("psd_eigs: matrix has a negative eigenvalue");
    if (lam(i) < 0.0) lam(i) = 0.0;
  }
  return {es.eigenvectors(), lam};
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& b) {
  auto [v, lam] = psd_eigs(b);
  return v * lam.cwiseSqrt().asDiagonal() * v.transpose();
}

}  // namespace gnl
