#pragma once

#include "fdia/riccati.hpp"
#include "fdia/state_space.hpp"

namespace fdia {

enum class OutputKind { Performance, Residual };
enum class OperatorKind { OpenLoop, FeedbackParameterized };

/// Stacked input-to-output map of the closed loop over the horizon: a
/// block lower-triangular matrix sending the stacked input sequence to
/// the stacked output sequence. Open-loop operators are block Toeplitz;
/// feedback-parameterized ones have time-varying blocks and only the
/// triangular structure.
struct ToeplitzOperator {
  Matrix M;            // (block_rows * (horizon+1)) x (block_cols * (horizon+1))
  Eigen::Index block_rows = 0;
  Eigen::Index block_cols = 0;
  int horizon = 0;
  OperatorKind kind = OperatorKind::OpenLoop;

  Vector apply(const Vector& stacked_input) const { return M * stacked_input; }

  /// Symmetrized Gram matrix MᵀM (the energy form of the operator).
  Matrix gram() const { return symmetrize(M.transpose() * M); }
};

/// Response map from the raw attack sequence, zero initial state baked in:
/// block (i,j) is D on the diagonal and C A^{i-j-1} B below it.
ToeplitzOperator build_open_loop(const ClosedLoopSystem& sys, OutputKind which);

/// Response map from the free parameter sequence v when the attack is
/// generated by a[k] = -K_k x[k] + G_k v[k]: block (i,i) = D G_i and
/// block (i,j) = (C - D K_i) (A-B K_{i-1}) ... (A-B K_{j+1}) B G_j for i > j.
ToeplitzOperator build_feedback_parameterized(const ClosedLoopSystem& sys,
                                              const GreSolution& gains,
                                              OutputKind which);

/// Concatenates samples into one column vector.
Vector stack(const Signal& signal);

/// Splits a stacked vector back into samples of the given width. Throws if
/// the length is not a multiple of the width.
Signal unstack(const Vector& stacked, Eigen::Index width);

}  // namespace fdia
