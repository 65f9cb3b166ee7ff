#include "fdia/toeplitz.hpp"

#include <stdexcept>
#include <string>

namespace fdia {

namespace {

// Desk-scale guard: dense storage of the stacked operator.
constexpr long kMaxStackedDim = 20000;

void check_size_guard(const ClosedLoopSystem& sys) {
  const long width = static_cast<long>(
      std::max({sys.n_a(), sys.n_p(), sys.n_r()}));
  const long stacked = static_cast<long>(sys.horizon) * width;
  if (stacked > kMaxStackedDim) {
    throw std::invalid_argument(
        "stacked operator dimension " + std::to_string(stacked) +
        " exceeds the dense-storage limit " + std::to_string(kMaxStackedDim) +
        "; reduce the horizon");
  }
}

std::pair<const Matrix*, const Matrix*> output_pair(
    const ClosedLoopSystem& sys, OutputKind which) {
  if (which == OutputKind::Performance) return {&sys.C_p, &sys.D_p};
  return {&sys.C_r, &sys.D_r};
}

}  // namespace

ToeplitzOperator build_open_loop(const ClosedLoopSystem& sys,
                                 OutputKind which) {
  check_size_guard(sys);
  const auto [C, D] = output_pair(sys, which);
  const Eigen::Index p = C->rows();
  const Eigen::Index m = sys.n_a();
  const Eigen::Index blocks = static_cast<Eigen::Index>(sys.horizon) + 1;

  // First block column: D, C B, C A B, C A^2 B, ... built by running
  // left-multiplication instead of recomputing matrix powers.
  std::vector<Matrix> column(static_cast<std::size_t>(blocks));
  column[0] = *D;
  Matrix CA = *C;  // C A^{i-1} as i advances
  for (Eigen::Index i = 1; i < blocks; ++i) {
    column[static_cast<std::size_t>(i)] = CA * sys.B_cl;
    CA = CA * sys.A_cl;
  }

  ToeplitzOperator op;
  op.block_rows = p;
  op.block_cols = m;
  op.horizon = sys.horizon;
  op.kind = OperatorKind::OpenLoop;
  op.M = Matrix::Zero(p * blocks, m * blocks);
  for (Eigen::Index i = 0; i < blocks; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      op.M.block(i * p, j * m, p, m) = column[static_cast<std::size_t>(i - j)];
    }
  }
  return op;
}

ToeplitzOperator build_feedback_parameterized(const ClosedLoopSystem& sys,
                                              const GreSolution& gains,
                                              OutputKind which) {
  check_size_guard(sys);
  const Eigen::Index blocks = static_cast<Eigen::Index>(sys.horizon) + 1;
  if (gains.K.size() != static_cast<std::size_t>(blocks) ||
      gains.G.size() != static_cast<std::size_t>(blocks)) {
    throw std::invalid_argument(
        "gain sequence covers " + std::to_string(gains.K.size()) +
        " steps but the horizon needs " + std::to_string(blocks));
  }

  const auto [C, D] = output_pair(sys, which);
  const Eigen::Index p = C->rows();
  const Eigen::Index m = sys.n_a();

  // Output rows see (C - D K_i); states propagate through A - B K_k.
  std::vector<Matrix> row_map(static_cast<std::size_t>(blocks));
  for (Eigen::Index i = 0; i < blocks; ++i) {
    row_map[static_cast<std::size_t>(i)] =
        *C - *D * gains.K[static_cast<std::size_t>(i)];
  }

  ToeplitzOperator op;
  op.block_rows = p;
  op.block_cols = m;
  op.horizon = sys.horizon;
  op.kind = OperatorKind::FeedbackParameterized;
  op.M = Matrix::Zero(p * blocks, m * blocks);

  for (Eigen::Index j = 0; j < blocks; ++j) {
    const Matrix& G_j = gains.G[static_cast<std::size_t>(j)];
    op.M.block(j * p, j * m, p, m) = *D * G_j;

    // w accumulates (A - B K_{i-1}) ... (A - B K_{j+1}) B G_j column by column.
    Matrix w = sys.B_cl * G_j;
    for (Eigen::Index i = j + 1; i < blocks; ++i) {
      op.M.block(i * p, j * m, p, m) = row_map[static_cast<std::size_t>(i)] * w;
      w = (sys.A_cl - sys.B_cl * gains.K[static_cast<std::size_t>(i)]) * w;
    }
  }
  return op;
}

Vector stack(const Signal& signal) {
  if (signal.empty()) return Vector::Zero(0);
  const Eigen::Index width = signal.front().size();
  Vector out(width * static_cast<Eigen::Index>(signal.size()));
  Eigen::Index offset = 0;
  for (const Vector& sample : signal) {
    if (sample.size() != width) {
      throw std::invalid_argument("signal samples have inconsistent widths");
    }
    out.segment(offset, width) = sample;
    offset += width;
  }
  return out;
}

Signal unstack(const Vector& stacked, Eigen::Index width) {
  if (width <= 0) {
    throw std::invalid_argument("block width must be positive");
  }
  if (stacked.size() % width != 0) {
    throw std::invalid_argument(
        "stacked length " + std::to_string(stacked.size()) +
        " is not a multiple of the block width " + std::to_string(width));
  }
  Signal out;
  out.reserve(static_cast<std::size_t>(stacked.size() / width));
  for (Eigen::Index offset = 0; offset < stacked.size(); offset += width) {
    out.push_back(stacked.segment(offset, width));
  }
  return out;
}

}  // namespace fdia
