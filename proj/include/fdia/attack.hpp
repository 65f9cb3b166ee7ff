#pragma once

#include <optional>
#include <stdexcept>

#include "fdia/impact.hpp"
#include "fdia/riccati.hpp"
#include "fdia/toeplitz.hpp"

namespace fdia {

/// Raised when a candidate parameter direction produces (numerically) zero
/// detection energy and therefore cannot be scaled onto the stealth boundary.
struct ZeroResidualDirectionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// First-order optimality certificate for the stacked attack vector against
/// the single-constraint quadratic program. All five residuals are always
/// evaluated; thresholds scale with gamma_star so the verdict stays
/// meaningful on badly scaled systems.
struct KktCertificate {
  double primal_feasibility = 0.0;  // residual energy - 1, needs <= 1e-8
  double dual_feasibility = 0.0;    // gamma_star, needs >= 0
  double complementary_slackness = 0.0;  // gamma_star * (residual energy - 1)
  double stationarity = 0.0;  // ||(gamma_star T_rT_r - T_pT_p) a||
  double psd_condition = 0.0;  // lambda_min(gamma_star T_rT_r - T_pT_p)
  bool primal_feasibility_ok = false;
  bool dual_feasibility_ok = false;
  bool complementary_slackness_ok = false;
  bool stationarity_ok = false;
  bool psd_condition_ok = false;
  bool pass = false;
};

struct AttackPlan {
  Vector v;  // stacked parameter sequence, width n_a per step
  Vector a;  // stacked realized attack
  double predicted_perf_energy = 0.0;
  double predicted_det_energy = 0.0;  // 1 by construction of the scaling
  KktCertificate kkt;
};

enum class VStrategy { PencilEigenvector, UserSupplied };

/// Picks the free parameter sequence. The default strategy takes the
/// eigenvector at the largest restricted eigenvalue of the parameterized
/// Gram pencil (ties broken at the smallest index, sign fixed so the
/// largest-magnitude entry is positive); a user-supplied vector is used
/// as-is. Either way the result is scaled so vᵀ T_rvᵀT_rv v = 1.
Vector select_v(const ToeplitzOperator& Tpv, const ToeplitzOperator& Trv,
                double gamma_star,
                VStrategy strategy = VStrategy::PencilEigenvector,
                const std::optional<Vector>& user_v = std::nullopt,
                double rank_tol = kDefaultRankTol);

/// Rolls the closed loop forward from x[0] = 0 under
/// a[k] = -K_k x[k] + G_k v[k], computes the realized output energies, and
/// certifies the stacked attack against the open-loop operators.
AttackPlan synthesize_attack(const ClosedLoopSystem& sys,
                             const GreSolution& gains, const Vector& v_stacked);

/// Evaluates the five optimality conditions for a stacked attack; never
/// short-circuits, so every residual is reported even after a failure.
KktCertificate kkt_verify(const ToeplitzOperator& Tp,
                          const ToeplitzOperator& Tr, double gamma_star,
                          const Vector& a_stacked);

}  // namespace fdia
