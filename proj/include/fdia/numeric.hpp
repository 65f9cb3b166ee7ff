#pragma once

#include <Eigen/Dense>

namespace fdia {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Default relative tolerance for rank decisions (singular values below
/// tol * largest are treated as zero).
inline constexpr double kDefaultRankTol = 1e-10;

/// Default relative tolerance for positive-semidefiniteness and kernel
/// inclusion checks in the backward recursion.
inline constexpr double kDefaultPsdTol = 1e-8;

/// (M + Mᵀ)/2, suppressing roundoff asymmetry before eigensolves.
inline Matrix symmetrize(const Matrix& M) { return 0.5 * (M + M.transpose()); }

/// Largest singular value; 0 for empty matrices.
double spectral_norm(const Matrix& M);

/// Orthonormal basis of the numerical kernel of M: right singular vectors
/// whose singular value is <= max(rows, cols) * sigma_max * rank_tol.
/// Returns an n x d matrix (d = kernel dimension, possibly 0 columns).
Matrix kernel_basis(const Matrix& M, double rank_tol = kDefaultRankTol);

/// Moore-Penrose pseudoinverse via SVD. Singular values below
/// rank_tol * sigma_max are treated as zero.
Matrix pinv(const Matrix& M, double rank_tol = kDefaultRankTol);

/// Kahan compensated accumulator for long sums of squares.
class CompensatedSum {
 public:
  void add(double value) {
    const double y = value - compensation_;
    const double t = total_ + y;
    compensation_ = (t - total_) - y;
    total_ = t;
  }
  double value() const { return total_; }

 private:
  double total_ = 0.0;
  double compensation_ = 0.0;
};

}  // namespace fdia
