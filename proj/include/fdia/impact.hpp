#pragma once

#include <optional>
#include <stdexcept>

#include "fdia/toeplitz.hpp"

namespace fdia {

/// Raised when the worst-case impact has no finite value (the detector
/// response map has a kernel direction the performance map can see).
struct UnboundedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when the detector response map vanishes entirely while the
/// performance map does not; no stealth constraint exists to normalize by.
struct DegenerateResidualError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BoundednessCheck {
  bool bounded = false;
  double kernel_margin = 0.0;  // ||T_p N|| over the kernel basis N of T_r
  int rank_Tr = 0;
};

struct ImpactReport {
  double gamma_star = 0.0;  // +inf when unbounded
  bool bounded = false;
  double kernel_margin = 0.0;
  int rank_Tr = 0;
  // min eigenvalue of gamma_star T_rT_r - T_pT_p; absent when unbounded
  std::optional<double> certificate_min_eig;
};

/// Finite worst-case impact exists iff every attack invisible to the
/// detector is also invisible to the performance output:
/// ker(T_r) ⊆ ker(T_p).
BoundednessCheck check_bounded(const ToeplitzOperator& Tp,
                               const ToeplitzOperator& Tr,
                               double rank_tol = kDefaultRankTol);

/// Largest generalized eigenvalue of the Gram pencil (T_pᵀT_p, T_rᵀT_r)
/// restricted to the range of T_rᵀT_r, clamped below at zero. This is the
/// exact solution of the one-parameter matrix-inequality program
///   min gamma  s.t.  T_pᵀT_p − gamma T_rᵀT_r ⪯ 0.
/// Throws UnboundedError when check_bounded fails.
ImpactReport compute_gamma_star(const ToeplitzOperator& Tp,
                                const ToeplitzOperator& Tr,
                                double rank_tol = kDefaultRankTol);

struct PencilExtremum {
  double value = 0.0;   // largest restricted eigenvalue
  Vector vector;        // a corresponding eigenvector (unnormalized)
  Eigen::Index range_dim = 0;
};

/// Shared reduction behind the impact value and the parameter-direction
/// pick. The operator form whitens through the SVD of T_r itself, so its
/// accuracy degrades with cond(T_r) rather than cond(T_r)^2; preferred
/// whenever the operators are available.
PencilExtremum max_restricted_eigenpair(const ToeplitzOperator& Tp,
                                        const ToeplitzOperator& Tr,
                                        double rank_tol = kDefaultRankTol);

/// Gram-matrix form of the same reduction: eigendecompose G_r, keep
/// eigenpairs above rank_tol * lambda_max, whiten, take the top eigenpair
/// of the whitened G_p.
PencilExtremum max_restricted_eigenpair(const Matrix& Gp, const Matrix& Gr,
                                        double rank_tol = kDefaultRankTol);

}  // namespace fdia
