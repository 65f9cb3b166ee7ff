#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "fdia/impact.hpp"
#include "fdia/toeplitz.hpp"
#include "test_helpers.hpp"

using namespace fdia;

TEST_CASE("horizon zero collapses the operator to the feedthrough block") {
  std::mt19937 rng(31);
  auto sys = testing::random_system(rng, 3, 2, 2, 1, 0);
  const auto T = build_open_loop(sys, OutputKind::Performance);
  CHECK(T.M.rows() == 2);
  CHECK(T.M.cols() == 2);
  CHECK((T.M - sys.D_p).norm() == 0.0);
}

TEST_CASE("nilpotent dynamics leave two nonzero block diagonals") {
  std::mt19937 rng(32);
  auto sys = testing::random_system(rng, 2, 1, 1, 1, 4);
  sys.A_cl.setZero();
  const auto T = build_open_loop(sys, OutputKind::Residual);
  for (int i = 0; i <= 4; ++i) {
    for (int j = 0; j <= 4; ++j) {
      const double block = std::abs(T.M(i, j));
      if (i == j) {
        CHECK(block == std::abs(sys.D_r(0, 0)));
      } else if (i == j + 1) {
        CHECK(block == doctest::Approx((sys.C_r * sys.B_cl).cwiseAbs()(0, 0)));
      } else {
        CHECK(block == 0.0);
      }
    }
  }
}

TEST_CASE("open-loop operator reproduces the simulation") {
  std::mt19937 rng(33);
  for (int trial = 0; trial < 6; ++trial) {
    const auto sys = testing::random_system(rng, 2, 2, 2, 2, 4);
    const auto Tp = build_open_loop(sys, OutputKind::Performance);
    const auto Tr = build_open_loop(sys, OutputKind::Residual);

    const Signal a = testing::random_signal(rng, 5, 2);
    const auto traj = simulate_closed_loop(sys, a, Vector::Zero(2));
    const Vector yp = Tp.apply(stack(a));
    const Vector yr = Tr.apply(stack(a));
    CHECK((yp - stack(traj.y_p)).norm() <=
          1e-12 * std::max(1.0, stack(traj.y_p).norm()));
    CHECK((yr - stack(traj.y_r)).norm() <=
          1e-12 * std::max(1.0, stack(traj.y_r).norm()));
  }
}

TEST_CASE("zero gains and identity projectors reduce to the open loop") {
  std::mt19937 rng(34);
  const auto sys = testing::random_system(rng, 3, 2, 1, 2, 6);
  GreSolution gains;
  gains.K.assign(7, Matrix::Zero(2, 3));
  gains.G.assign(7, Matrix::Identity(2, 2));
  gains.exists = true;

  for (auto which : {OutputKind::Performance, OutputKind::Residual}) {
    const auto fb = build_feedback_parameterized(sys, gains, which);
    const auto ol = build_open_loop(sys, which);
    CHECK((fb.M - ol.M).norm() <= 1e-13 * std::max(1.0, ol.M.norm()));
    CHECK(fb.kind == OperatorKind::FeedbackParameterized);
  }
}

TEST_CASE("one-step horizon instantiates the subdiagonal formula directly") {
  std::mt19937 rng(35);
  const auto sys = testing::random_system(rng, 3, 1, 1, 1, 1);
  GreSolution gains;
  gains.K.assign(2, Matrix::Zero(1, 3));
  gains.G.assign(2, Matrix::Identity(1, 1));
  gains.K[1] = testing::random_matrix(rng, 1, 3);
  gains.G[0] = testing::random_matrix(rng, 1, 1);

  const auto T = build_feedback_parameterized(sys, gains, OutputKind::Residual);
  const Matrix expected = (sys.C_r - sys.D_r * gains.K[1]) * sys.B_cl * gains.G[0];
  CHECK(T.M(1, 0) == doctest::Approx(expected(0, 0)).epsilon(1e-13));
  CHECK((T.M(0, 0) - (sys.D_r * gains.G[0])(0, 0)) == doctest::Approx(0.0));
  CHECK(T.M(0, 1) == 0.0);
}

TEST_CASE("feedback-parameterized operator reproduces the gain-driven rollout") {
  std::mt19937 rng(36);
  const auto sys = testing::random_bounded_system(rng, 3, 2, 2, 2, 5);

  // arbitrary (not solution-derived) bounded gains exercise the formula
  GreSolution gains;
  for (int k = 0; k <= 5; ++k) {
    gains.K.push_back(testing::random_matrix(rng, 2, 3, 0.4));
    gains.G.push_back(testing::random_matrix(rng, 2, 2));
  }

  const auto Tpv = build_feedback_parameterized(sys, gains, OutputKind::Performance);
  const auto Trv = build_feedback_parameterized(sys, gains, OutputKind::Residual);

  for (int trial = 0; trial < 10; ++trial) {
    const Signal v = testing::random_signal(rng, 6, 2);
    Vector x = Vector::Zero(3);
    Signal yp, yr;
    for (std::size_t k = 0; k < v.size(); ++k) {
      const Vector a_k = -gains.K[k] * x + gains.G[k] * v[k];
      yp.push_back(sys.C_p * x + sys.D_p * a_k);
      yr.push_back(sys.C_r * x + sys.D_r * a_k);
      x = sys.A_cl * x + sys.B_cl * a_k;
    }
    CHECK((Tpv.apply(stack(v)) - stack(yp)).norm() <=
          1e-10 * std::max(1.0, stack(yp).norm()));
    CHECK((Trv.apply(stack(v)) - stack(yr)).norm() <=
          1e-10 * std::max(1.0, stack(yr).norm()));
  }
}

TEST_CASE("gain sequence length must cover the horizon") {
  std::mt19937 rng(37);
  const auto sys = testing::random_system(rng, 2, 1, 1, 1, 4);
  GreSolution gains;
  gains.K.assign(3, Matrix::Zero(1, 2));
  gains.G.assign(3, Matrix::Identity(1, 1));
  CHECK_THROWS_AS(build_feedback_parameterized(sys, gains, OutputKind::Residual),
                  std::invalid_argument);
}

TEST_CASE("stack and unstack are inverse reshapings") {
  std::mt19937 rng(38);
  const Signal s = testing::random_signal(rng, 7, 3);
  const Vector stacked = stack(s);
  CHECK(stacked.size() == 21);

  const Signal round = unstack(stacked, 3);
  REQUIRE(round.size() == s.size());
  for (std::size_t k = 0; k < s.size(); ++k) CHECK((round[k] - s[k]).norm() == 0.0);

  // energy identity
  double direct = 0.0;
  for (const auto& sample : s) direct += sample.squaredNorm();
  CHECK(stacked.squaredNorm() == doctest::Approx(direct).epsilon(1e-14));

  CHECK(stack(Signal(4, Vector::Zero(2))).norm() == 0.0);
  CHECK_THROWS_AS(unstack(Vector::Zero(7), 2), std::invalid_argument);
}

TEST_CASE("gram matrices are symmetric positive semidefinite") {
  std::mt19937 rng(39);
  for (int trial = 0; trial < 5; ++trial) {
    const auto sys = testing::random_system(rng, 4, 2, 2, 2, 10);
    for (auto which : {OutputKind::Performance, OutputKind::Residual}) {
      const Matrix G = build_open_loop(sys, which).gram();
      CHECK((G - G.transpose()).norm() == 0.0);
      Eigen::SelfAdjointEigenSolver<Matrix> eig(G);
      CHECK(eig.eigenvalues().minCoeff() >=
            -1e-10 * std::max(1.0, spectral_norm(G)));
    }
  }
}

TEST_CASE("dense-storage guard rejects oversized horizons") {
  std::mt19937 rng(40);
  auto sys = testing::random_system(rng, 2, 2, 2, 2, 10001);
  CHECK_THROWS_WITH_AS(build_open_loop(sys, OutputKind::Residual),
                       doctest::Contains("dense-storage limit"),
                       std::invalid_argument);
}
