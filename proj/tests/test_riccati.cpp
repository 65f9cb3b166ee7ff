#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "fdia/demo.hpp"
#include "fdia/impact.hpp"
#include "fdia/riccati.hpp"
#include "fdia/system_io.hpp"
#include "test_helpers.hpp"

using namespace fdia;

TEST_CASE("semidefinite stage cost always admits the recursion") {
  std::mt19937 rng(51);
  for (int trial = 0; trial < 5; ++trial) {
    auto sys = testing::random_system(rng, 3, 2, 2, 2, 10);
    sys.C_p.setZero();
    sys.D_p.setZero();  // no performance channel: the weight is PSD
    const auto gre = solve_gre(sys, LagrangianWeights::from(sys, 1.0));
    REQUIRE(gre.exists);
    for (const Matrix& X : gre.X) {
      Eigen::SelfAdjointEigenSolver<Matrix> eig(X);
      CHECK(eig.eigenvalues().minCoeff() >=
            -1e-10 * std::max(1.0, spectral_norm(X)));
    }
  }
}

TEST_CASE("horizon zero reduces to a single backward step") {
  std::mt19937 rng(52);
  const auto sys = testing::random_bounded_system(rng, 3, 2, 2, 2, 0);
  const auto w = LagrangianWeights::from(sys, 4.0);
  const auto gre = solve_gre(sys, w);
  REQUIRE(gre.exists);
  CHECK(gre.X.size() == 2);
  CHECK(gre.X[1].norm() == 0.0);
  const Matrix expected = symmetrize(w.Q - w.S * pinv(w.R) * w.S.transpose());
  CHECK((gre.X[0] - expected).norm() <= 1e-12 * std::max(1.0, expected.norm()));
  CHECK((gre.K[0] - pinv(w.R) * w.S.transpose()).norm() <= 1e-12);
}

TEST_CASE("weights are symmetrized on construction") {
  std::mt19937 rng(53);
  const auto sys = testing::random_system(rng, 3, 2, 2, 2, 5);
  const auto w = LagrangianWeights::from(sys, 2.5);
  CHECK((w.Q - w.Q.transpose()).norm() == 0.0);
  CHECK((w.R - w.R.transpose()).norm() == 0.0);
  CHECK(w.gamma == 2.5);
}

TEST_CASE("terminal condition and symmetry hold on the demo recursion") {
  const auto sys = build_closed_loop(
      demo_power_system(DetectorInterpretation::ResidualStyle));
  const auto Tp = build_open_loop(sys, OutputKind::Performance);
  const auto Tr = build_open_loop(sys, OutputKind::Residual);
  const double gamma = compute_gamma_star(Tp, Tr).gamma_star;
  const auto gre = solve_gre(sys, LagrangianWeights::from(sys, gamma));

  REQUIRE(gre.exists);
  CHECK(gre.X.back().norm() == 0.0);
  CHECK(gre.X.size() == 52);
  CHECK(gre.K.size() == 51);
  for (const Matrix& X : gre.X) {
    CHECK((X - X.transpose()).norm() <= 1e-12 * std::max(1.0, X.norm()));
  }
  // value of the soft-constrained problem from equilibrium is zero
  const Vector x0 = Vector::Zero(sys.n());
  CHECK(std::abs(-x0.dot(gre.X[0] * x0)) == 0.0);
  // diagnostics cover every step with the thresholds they were checked at
  CHECK(gre.diagnostics.size() == 51);
  for (const auto& d : gre.diagnostics) {
    CHECK(d.pass);
    CHECK(d.tolerance > 0.0);
  }
}

TEST_CASE("feedthrough witness exists exactly when the kernel sees the target") {
  std::mt19937 rng(54);

  SUBCASE("zero detector feedthrough with nonzero performance feedthrough") {
    auto sys = testing::random_system(rng, 3, 2, 2, 2, 5);
    sys.D_r.setZero();
    REQUIRE(spectral_norm(sys.D_p) > 0.1);
    const auto witness = check_feedthrough_unbounded(sys, 1.0);
    REQUIRE(witness.has_value());
    CHECK((sys.D_r * *witness).norm() <= 1e-12);
    CHECK((sys.D_p * *witness).norm() > 1e-6);
  }

  SUBCASE("full-column-rank detector feedthrough") {
    const auto sys = testing::random_bounded_system(rng, 3, 2, 2, 2, 5);
    CHECK_FALSE(check_feedthrough_unbounded(sys, 1.0).has_value());
  }

  SUBCASE("demo fixture has zero feedthrough on both outputs") {
    const auto sys = build_closed_loop(
        demo_power_system(DetectorInterpretation::ResidualStyle));
    CHECK(spectral_norm(sys.D_p) == 0.0);
    CHECK(spectral_norm(sys.D_r) == 0.0);
    CHECK_FALSE(check_feedthrough_unbounded(sys, 1.0).has_value());
  }
}

TEST_CASE("feedthrough witness forces first-step failure of the recursion") {
  std::mt19937 rng(55);
  for (int trial = 0; trial < 5; ++trial) {
    auto sys = testing::random_system(rng, 3, 2, 2, 2, 6);
    sys.D_r.setZero();
    if (!check_feedthrough_unbounded(sys, 1.0).has_value()) continue;

    for (double gamma : {0.5, 10.0, 1e4}) {
      const auto gre = solve_gre(sys, LagrangianWeights::from(sys, gamma));
      CHECK_FALSE(gre.exists);
      REQUIRE(gre.failure_step.has_value());
      CHECK(*gre.failure_step == 6);
      CHECK(*gre.failure_reason == GreFailure::Condition10Violated);
    }
  }
}

TEST_CASE("recursion cost certifies the parameterized attacks as minimizers") {
  std::mt19937 rng(56);
  for (int trial = 0; trial < 8; ++trial) {
    const auto sys = testing::random_bounded_system(rng, 3, 1, 2, 1, 3);
    const auto Tp = build_open_loop(sys, OutputKind::Performance);
    const auto Tr = build_open_loop(sys, OutputKind::Residual);
    const auto report = compute_gamma_star(Tp, Tr);
    const auto w = LagrangianWeights::from(sys, report.gamma_star);
    const auto gre = solve_gre(sys, w);
    REQUIRE(gre.exists);

    // with x[0] = 0 and v = 0 the parameterized attack is identically zero
    // and its cost is the optimal value 0; no random attack beats it
    const double scale =
        std::max(1.0, report.gamma_star) * std::max(1.0, spectral_norm(Tr.gram()));
    for (int sample = 0; sample < 10000; ++sample) {
      const Signal a = testing::random_signal(rng, 4, 1, 2.0);
      CHECK(testing::rollout_cost(sys, w, a) >= -1e-8 * scale);
    }
  }
}

TEST_CASE("parameterized rollout cost vanishes for every parameter sequence") {
  std::mt19937 rng(57);
  for (int trial = 0; trial < 5; ++trial) {
    const auto sys = testing::random_bounded_system(rng, 4, 2, 2, 2, 10);
    const auto Tp = build_open_loop(sys, OutputKind::Performance);
    const auto Tr = build_open_loop(sys, OutputKind::Residual);
    const double gamma = compute_gamma_star(Tp, Tr).gamma_star;
    const auto w = LagrangianWeights::from(sys, gamma);
    const auto gre = solve_gre(sys, w);
    REQUIRE(gre.exists);

    for (int sample = 0; sample < 5; ++sample) {
      const Signal v = testing::random_signal(rng, 11, 2, 3.0);
      Signal a;
      Vector x = Vector::Zero(4);
      for (std::size_t k = 0; k < v.size(); ++k) {
        a.push_back(-gre.K[k] * x + gre.G[k] * v[k]);
        x = sys.A_cl * x + sys.B_cl * a.back();
      }
      const double vnorm2 = stack(v).squaredNorm();
      CHECK(std::abs(testing::rollout_cost(sys, w, a)) <=
            1e-8 * (1.0 + vnorm2) * std::max(1.0, gamma));
    }
  }
}
