#include "fdia/attack.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace fdia {

Vector select_v(const ToeplitzOperator& Tpv, const ToeplitzOperator& Trv,
                double gamma_star, VStrategy strategy,
                const std::optional<Vector>& user_v, double rank_tol) {
  (void)gamma_star;  // the eigenvalue is recomputed from the pencil itself
  const Matrix Grv = Trv.gram();

  Vector v;
  if (strategy == VStrategy::UserSupplied) {
    if (!user_v.has_value()) {
      throw std::invalid_argument("user-supplied strategy needs a vector");
    }
    if (user_v->size() != Grv.rows()) {
      throw std::invalid_argument(
          "supplied parameter vector has length " +
          std::to_string(user_v->size()) + ", expected " +
          std::to_string(Grv.rows()));
    }
    v = *user_v;
  } else {
    const PencilExtremum top = max_restricted_eigenpair(Tpv, Trv, rank_tol);
    v = top.vector;
    // Sign convention: largest-magnitude entry positive.
    Eigen::Index imax = 0;
    if (v.size() > 0) v.cwiseAbs().maxCoeff(&imax);
    if (v.size() > 0 && v(imax) < 0.0) v = -v;
  }

  const double det_energy = v.dot(Grv * v);
  if (det_energy <= rank_tol * std::max(1.0, spectral_norm(Grv))) {
    throw ZeroResidualDirectionError(
        "parameter direction yields detection energy " +
        std::to_string(det_energy) + "; cannot scale onto the stealth "
        "boundary");
  }
  return v / std::sqrt(det_energy);
}

AttackPlan synthesize_attack(const ClosedLoopSystem& sys,
                             const GreSolution& gains,
                             const Vector& v_stacked) {
  const Eigen::Index na = sys.n_a();
  const Eigen::Index blocks = static_cast<Eigen::Index>(sys.horizon) + 1;
  if (gains.K.size() != static_cast<std::size_t>(blocks) ||
      gains.G.size() != static_cast<std::size_t>(blocks)) {
    throw std::invalid_argument(
        "gain sequence covers " + std::to_string(gains.K.size()) +
        " steps but the horizon needs " + std::to_string(blocks));
  }
  if (v_stacked.size() != na * blocks) {
    throw std::invalid_argument(
        "parameter vector has length " + std::to_string(v_stacked.size()) +
        ", expected " + std::to_string(na * blocks));
  }

  AttackPlan plan;
  plan.v = v_stacked;
  plan.a = Vector::Zero(na * blocks);

  CompensatedSum perf_energy;
  CompensatedSum det_energy;
  Vector x = Vector::Zero(sys.n());
  for (Eigen::Index k = 0; k < blocks; ++k) {
    const Vector v_k = v_stacked.segment(k * na, na);
    const Vector a_k = -gains.K[static_cast<std::size_t>(k)] * x +
                       gains.G[static_cast<std::size_t>(k)] * v_k;
    plan.a.segment(k * na, na) = a_k;

    perf_energy.add((sys.C_p * x + sys.D_p * a_k).squaredNorm());
    det_energy.add((sys.C_r * x + sys.D_r * a_k).squaredNorm());
    x = sys.A_cl * x + sys.B_cl * a_k;
  }
  plan.predicted_perf_energy = perf_energy.value();
  plan.predicted_det_energy = det_energy.value();

  plan.kkt = kkt_verify(build_open_loop(sys, OutputKind::Performance),
                        build_open_loop(sys, OutputKind::Residual),
                        gains.gamma, plan.a);
  return plan;
}

KktCertificate kkt_verify(const ToeplitzOperator& Tp,
                          const ToeplitzOperator& Tr, double gamma_star,
                          const Vector& a_stacked) {
  const Matrix slack = symmetrize(gamma_star * Tr.gram() - Tp.gram());
  const double residual_energy = (Tr.M * a_stacked).squaredNorm();

  KktCertificate cert;
  cert.primal_feasibility = residual_energy - 1.0;
  cert.dual_feasibility = gamma_star;
  cert.complementary_slackness = gamma_star * (residual_energy - 1.0);
  cert.stationarity = (slack * a_stacked).norm();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(slack);
  cert.psd_condition =
      slack.rows() > 0 ? eig.eigenvalues().minCoeff() : 0.0;

  const double scale = std::max(1.0, gamma_star);
  cert.primal_feasibility_ok = cert.primal_feasibility <= 1e-8;
  cert.dual_feasibility_ok = cert.dual_feasibility >= 0.0;
  cert.complementary_slackness_ok =
      std::abs(cert.complementary_slackness) <= 1e-6 * scale;
  cert.stationarity_ok =
      cert.stationarity <= 1e-6 * scale * std::max(1.0, a_stacked.norm());
  cert.psd_condition_ok = cert.psd_condition >= -1e-6 * scale;
  cert.pass = cert.primal_feasibility_ok && cert.dual_feasibility_ok &&
              cert.complementary_slackness_ok && cert.stationarity_ok &&
              cert.psd_condition_ok;
  return cert;
}

}  // namespace fdia
