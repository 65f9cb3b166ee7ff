#include "fdia/impact.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace fdia {

BoundednessCheck check_bounded(const ToeplitzOperator& Tp,
                               const ToeplitzOperator& Tr,
                               double rank_tol) {
  if (Tp.M.cols() != Tr.M.cols()) {
    throw std::invalid_argument("operators act on different input spaces");
  }

  BoundednessCheck out;
  const Matrix N = kernel_basis(Tr.M, rank_tol);
  out.rank_Tr = static_cast<int>(Tr.M.cols() - N.cols());

  if (N.cols() == 0) {
    out.bounded = true;
    out.kernel_margin = 0.0;
    return out;
  }

  const double sigma_max = spectral_norm(Tr.M);
  const double tau = static_cast<double>(std::max(Tr.M.rows(), Tr.M.cols())) *
                     sigma_max * rank_tol;
  out.kernel_margin = spectral_norm(Tp.M * N);
  out.bounded =
      out.kernel_margin <= std::max(tau, rank_tol) * std::max(1.0, spectral_norm(Tp.M));
  return out;
}

PencilExtremum max_restricted_eigenpair(const ToeplitzOperator& Tp,
                                        const ToeplitzOperator& Tr,
                                        double rank_tol) {
  Eigen::JacobiSVD<Matrix> svd(
      Tr.M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sigma = svd.singularValues();
  const double sigma_max = sigma.size() > 0 ? sigma(0) : 0.0;
  const double cutoff =
      static_cast<double>(std::max(Tr.M.rows(), Tr.M.cols())) * sigma_max *
      rank_tol;

  Eigen::Index rank = 0;
  while (rank < sigma.size() && sigma(rank) > cutoff) ++rank;

  PencilExtremum out;
  out.range_dim = rank;
  if (rank == 0) {
    out.vector = Vector::Zero(Tr.M.cols());
    return out;
  }

  // Whitened coordinates: a = W w gives a' T_r'T_r a = |w|^2, so the
  // restricted pencil extremum is the top singular value of T_p W.
  Matrix W(Tr.M.cols(), rank);
  for (Eigen::Index i = 0; i < rank; ++i) {
    W.col(i) = svd.matrixV().col(i) / sigma(i);
  }
  Eigen::JacobiSVD<Matrix> top(Tp.M * W, Eigen::ComputeThinV);
  out.value = top.singularValues().size() > 0
                  ? top.singularValues()(0) * top.singularValues()(0)
                  : 0.0;
  out.vector = top.singularValues().size() > 0
                   ? Vector(W * top.matrixV().col(0))
                   : Vector(W.col(0));
  return out;
}

PencilExtremum max_restricted_eigenpair(const Matrix& Gp, const Matrix& Gr,
                                        double rank_tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig_r(Gr);
  const Vector& lambda = eig_r.eigenvalues();
  const double lambda_max = lambda.size() > 0 ? lambda.maxCoeff() : 0.0;
  const double cutoff = rank_tol * std::max(lambda_max, 0.0);

  Eigen::Index kept = 0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) > cutoff) ++kept;
  }

  PencilExtremum out;
  out.range_dim = kept;
  if (kept == 0) {
    out.vector = Vector::Zero(Gr.rows());
    return out;
  }

  // Eigenvalues come out ascending, so the kept block is the trailing one.
  Matrix W(Gr.rows(), kept);
  for (Eigen::Index i = 0; i < kept; ++i) {
    const Eigen::Index src = lambda.size() - kept + i;
    W.col(i) = eig_r.eigenvectors().col(src) / std::sqrt(lambda(src));
  }

  const Matrix reduced = symmetrize(W.transpose() * Gp * W);
  Eigen::SelfAdjointEigenSolver<Matrix> eig_p(reduced);
  const Vector& mu = eig_p.eigenvalues();

  // Smallest index attaining the maximum, for a deterministic pick when
  // the top eigenvalue repeats.
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < mu.size(); ++i) {
    if (mu(i) > mu(best)) best = i;
  }

  out.value = mu(best);
  out.vector = W * eig_p.eigenvectors().col(best);
  return out;
}

ImpactReport compute_gamma_star(const ToeplitzOperator& Tp,
                                const ToeplitzOperator& Tr,
                                double rank_tol) {
  const BoundednessCheck bound = check_bounded(Tp, Tr, rank_tol);
  if (bound.rank_Tr == 0 && spectral_norm(Tp.M) > rank_tol) {
    throw DegenerateResidualError(
        "detector response map is numerically zero while the performance "
        "map is not; the stealth constraint cannot be normalized");
  }
  if (!bound.bounded) {
    throw UnboundedError(
        "worst-case impact is unbounded: the detector response map has a "
        "kernel direction visible in the performance output (kernel margin " +
        std::to_string(bound.kernel_margin) + ")");
  }

  ImpactReport report;
  report.bounded = true;
  report.kernel_margin = bound.kernel_margin;
  report.rank_Tr = bound.rank_Tr;

  if (bound.rank_Tr == 0) {
    report.gamma_star = 0.0;
    report.certificate_min_eig = 0.0;
    return report;
  }

  const PencilExtremum top = max_restricted_eigenpair(Tp, Tr, rank_tol);
  report.gamma_star = std::max(top.value, 0.0);

  const Matrix slack = symmetrize(report.gamma_star * Tr.gram() - Tp.gram());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(slack);
  report.certificate_min_eig = eig.eigenvalues().minCoeff();
  return report;
}

}  // namespace fdia
