#include "fdia/riccati.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace fdia {

LagrangianWeights LagrangianWeights::from(const ClosedLoopSystem& sys,
                                          double gamma) {
  LagrangianWeights w;
  w.gamma = gamma;
  w.Q = symmetrize(gamma * sys.C_r.transpose() * sys.C_r -
                   sys.C_p.transpose() * sys.C_p);
  w.S = gamma * sys.C_r.transpose() * sys.D_r -
        sys.C_p.transpose() * sys.D_p;
  w.R = symmetrize(gamma * sys.D_r.transpose() * sys.D_r -
                   sys.D_p.transpose() * sys.D_p);
  return w;
}

GreSolution solve_gre(const ClosedLoopSystem& sys, const LagrangianWeights& w,
                      double psd_tol) {
  const Eigen::Index n = sys.n();
  const Eigen::Index na = sys.n_a();
  const int N_h = sys.horizon;

  GreSolution sol;
  sol.gamma = w.gamma;
  sol.X.assign(static_cast<std::size_t>(N_h) + 2, Matrix::Zero(n, n));
  sol.K.assign(static_cast<std::size_t>(N_h) + 1, Matrix::Zero(na, n));
  sol.G.assign(static_cast<std::size_t>(N_h) + 1, Matrix::Zero(na, na));

  const double norm_A = spectral_norm(sys.A_cl);
  const double norm_B = spectral_norm(sys.B_cl);
  const double norm_R = spectral_norm(w.R);
  const double norm_S = spectral_norm(w.S);

  for (int k = N_h; k >= 0; --k) {
    const Matrix& X_next = sol.X[static_cast<std::size_t>(k) + 1];
    const Matrix Rk = symmetrize(w.R + sys.B_cl.transpose() * X_next * sys.B_cl);
    const Matrix Sk = w.S + sys.A_cl.transpose() * X_next * sys.B_cl;

    // Cancellation in forming R_k and S_k is proportional to the magnitude
    // of what was summed, not to the (possibly tiny) result, so the zero
    // threshold is scaled by the formation magnitudes.
    const double norm_X = spectral_norm(X_next);
    const double scale = std::max(
        {1.0, norm_R + norm_B * norm_B * norm_X,
         norm_S + norm_A * norm_X * norm_B});
    const double tol = psd_tol * scale;

    Eigen::SelfAdjointEigenSolver<Matrix> eig(Rk);
    const Vector& lambda = eig.eigenvalues();
    const Matrix& U = eig.eigenvectors();
    const double lambda_min = na > 0 ? lambda.minCoeff() : 0.0;

    GreStepDiagnostics diag;
    diag.k = k;
    diag.lambda_min_R = lambda_min;
    diag.tolerance = tol;

    if (lambda_min < -tol) {
      diag.pass = false;
      sol.diagnostics.push_back(diag);
      sol.exists = false;
      sol.failure_step = k;
      sol.failure_reason = GreFailure::Condition10Violated;
      return sol;
    }

    // Numerical kernel of R_k and the pseudoinverse share one eigensolve,
    // so the projector G_k is exactly I - R_k^+ R_k.
    Matrix pinv_Rk = Matrix::Zero(na, na);
    Matrix projector = Matrix::Zero(na, na);
    Eigen::Index kernel_dim = 0;
    Matrix kernel(na, na);
    for (Eigen::Index i = 0; i < na; ++i) {
      const Vector u = U.col(i);
      if (std::abs(lambda(i)) <= tol) {
        projector += u * u.transpose();
        kernel.col(kernel_dim++) = u;
      } else {
        pinv_Rk += (1.0 / lambda(i)) * u * u.transpose();
      }
    }
    const double kernel_residual =
        kernel_dim > 0 ? spectral_norm(Sk * kernel.leftCols(kernel_dim)) : 0.0;

    diag.kernel_residual = kernel_residual;
    // The kernel-inclusion condition pairs kernel inputs with the state
    // through the cross weight; at the first step the state is pinned to
    // zero, so the condition only gates steps k >= 1. The recursion is
    // expected to be marginal (singular R_0 with nonzero cross term) at
    // the first step whenever the multiplier sits exactly on the
    // worst-case boundary.
    if (k >= 1 && kernel_residual > tol) {
      diag.pass = false;
      sol.diagnostics.push_back(diag);
      sol.exists = false;
      sol.failure_step = k;
      sol.failure_reason = GreFailure::Condition11Violated;
      return sol;
    }

    diag.pass = true;
    sol.diagnostics.push_back(diag);

    sol.K[static_cast<std::size_t>(k)] = pinv_Rk * Sk.transpose();
    sol.G[static_cast<std::size_t>(k)] = projector;
    sol.X[static_cast<std::size_t>(k)] =
        symmetrize(w.Q + sys.A_cl.transpose() * X_next * sys.A_cl -
                   Sk * pinv_Rk * Sk.transpose());
  }

  sol.exists = true;
  return sol;
}

std::optional<Vector> check_feedthrough_unbounded(const ClosedLoopSystem& sys,
                                                  double /*gamma*/,
                                                  double rank_tol) {
  const Matrix N = kernel_basis(sys.D_r, rank_tol);
  if (N.cols() == 0) return std::nullopt;

  const Matrix image = sys.D_p * N;
  const double sigma_max_Dp = spectral_norm(sys.D_p);
  const double cutoff =
      static_cast<double>(std::max(sys.D_p.rows(), sys.D_p.cols())) *
      sigma_max_Dp * rank_tol;
  if (spectral_norm(image) <= std::max(cutoff, rank_tol)) return std::nullopt;

  Eigen::Index best = 0;
  image.colwise().norm().maxCoeff(&best);
  return Vector(N.col(best));
}

}  // namespace fdia
