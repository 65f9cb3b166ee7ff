#include "fdia/numeric.hpp"

#include <Eigen/SVD>
#include <algorithm>

namespace fdia {

double spectral_norm(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Matrix>(M).singularValues()(0);
}

Matrix kernel_basis(const Matrix& M, double rank_tol) {
  const auto n = M.cols();
  if (M.size() == 0 || M.rows() == 0) return Matrix::Identity(n, n);

  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullV);
  const Vector& sigma = svd.singularValues();
  const double cutoff =
      static_cast<double>(std::max(M.rows(), M.cols())) * sigma(0) * rank_tol;

  Eigen::Index rank = 0;
  while (rank < sigma.size() && sigma(rank) > cutoff) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

Matrix pinv(const Matrix& M, double rank_tol) {
  if (M.size() == 0) return Matrix::Zero(M.cols(), M.rows());

  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sigma = svd.singularValues();
  const double cutoff = sigma.size() > 0 ? sigma(0) * rank_tol : 0.0;

  Vector inv_sigma = Vector::Zero(sigma.size());
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > cutoff) inv_sigma(i) = 1.0 / sigma(i);
  }
  return svd.matrixV() * inv_sigma.asDiagonal() * svd.matrixU().transpose();
}

}  // namespace fdia
