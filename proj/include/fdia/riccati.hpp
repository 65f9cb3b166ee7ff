#pragma once

#include <optional>
#include <vector>

#include "fdia/state_space.hpp"

namespace fdia {

/// Stage-cost weights of the soft-constrained attack-design problem,
///   Q = gamma C_rᵀC_r − C_pᵀC_p,
///   S = gamma C_rᵀD_r − C_pᵀD_p,
///   R = gamma D_rᵀD_r − D_pᵀD_p.
/// The combined weight [[Q, S], [Sᵀ, R]] is indefinite in general; nothing
/// downstream assumes definiteness.
struct LagrangianWeights {
  Matrix Q;  // n x n, symmetric
  Matrix S;  // n x n_a
  Matrix R;  // n_a x n_a, symmetric
  double gamma = 0.0;

  static LagrangianWeights from(const ClosedLoopSystem& sys, double gamma);
};

enum class GreFailure { Condition10Violated, Condition11Violated };

struct GreStepDiagnostics {
  int k = 0;
  double lambda_min_R = 0.0;     // smallest eigenvalue of R + B_clᵀ X_{k+1} B_cl
  double kernel_residual = 0.0;  // ||(S + A_clᵀ X_{k+1} B_cl) N|| over the kernel basis N
  double tolerance = 0.0;        // threshold both values were checked against
  bool pass = false;
};

/// Backward solution of the generalized Riccati recursion with
/// pseudoinverse gains. Failure is an analysis outcome, not an error:
/// a recursion that stops certifies that no finite worst-case impact
/// exists for this multiplier. exists = true guarantees R_k ⪰ -tol at
/// every step and the kernel inclusion at every step k >= 1.
struct GreSolution {
  std::vector<Matrix> X;  // k = 0..N_h+1, X[N_h+1] = 0, each symmetric
  std::vector<Matrix> K;  // feedback gains, k = 0..N_h
  std::vector<Matrix> G;  // kernel projectors I - R_k^+ R_k, k = 0..N_h
  double gamma = 0.0;     // multiplier the weights were built with
  bool exists = false;
  std::optional<int> failure_step;
  std::optional<GreFailure> failure_reason;
  std::vector<GreStepDiagnostics> diagnostics;  // ordered k = N_h..failure/0
};

/// Backward recursion from X_{N_h+1} = 0:
///   R_k = R + B_clᵀ X_{k+1} B_cl,  S_k = S + A_clᵀ X_{k+1} B_cl,
///   X_k = Q + A_clᵀ X_{k+1} A_cl − S_k R_k⁺ S_kᵀ,
///   K_k = R_k⁺ S_kᵀ,  G_k = I − R_k⁺ R_k.
/// Each step checks R_k ⪰ 0, and for k >= 1 also ker(R_k) ⊆ ker(S_k), at a
/// tolerance of psd_tol scaled by the magnitudes the step was formed from;
/// the first violated step stops the recursion with exists = false. The
/// kernel-inclusion check is vacuous at k = 0 because the cross term pairs
/// kernel inputs with x[0] = 0; at a multiplier exactly on the worst-case
/// boundary the first step is expected to be marginal (singular R_0), and
/// its kernel is what parameterizes the boundary-attaining attacks.
GreSolution solve_gre(const ClosedLoopSystem& sys, const LagrangianWeights& w,
                      double psd_tol = kDefaultPsdTol);

/// Looks for a direction s with D_r s = 0 but D_p s != 0. Such a direction
/// defeats any finite multiplier: the last-step weight restricted to
/// ker(D_r) is −D_pᵀD_p, so the recursion necessarily fails at its first
/// backward step and the worst-case impact is unbounded.
std::optional<Vector> check_feedthrough_unbounded(
    const ClosedLoopSystem& sys, double gamma,
    double rank_tol = kDefaultRankTol);

}  // namespace fdia
