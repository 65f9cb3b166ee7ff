#include "fdia/state_space.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <sstream>
#include <stdexcept>

namespace fdia {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

std::string dim_string(const Matrix& M) {
  std::ostringstream os;
  os << M.rows() << "x" << M.cols();
  return os.str();
}

}  // namespace

StateSpaceSystem::StateSpaceSystem(Matrix A_in, Matrix B_in, Matrix C_in,
                                   Matrix D_in)
    : A(std::move(A_in)),
      B(std::move(B_in)),
      C(std::move(C_in)),
      D(std::move(D_in)) {
  require(A.rows() == A.cols(), "state matrix A must be square, got " + dim_string(A));
  require(B.rows() == A.rows(), "input matrix B has " + dim_string(B) +
                                    " rows but A is " + dim_string(A));
  require(C.cols() == A.rows(), "output matrix C has " + dim_string(C) +
                                    " cols but A is " + dim_string(A));
  require(D.rows() == C.rows() && D.cols() == B.cols(),
          "feedthrough D is " + dim_string(D) + ", expected " +
              std::to_string(C.rows()) + "x" + std::to_string(B.cols()));
}

StateSpaceSystem StateSpaceSystem::static_gain(const Matrix& D) {
  return StateSpaceSystem(Matrix::Zero(0, 0), Matrix::Zero(0, D.cols()),
                          Matrix::Zero(D.rows(), 0), D);
}

Plant::Plant(Matrix A_in, Matrix B_in, Matrix C_in, Matrix C_J_in,
             Matrix D_J_in)
    : A(std::move(A_in)),
      B(std::move(B_in)),
      C(std::move(C_in)),
      C_J(std::move(C_J_in)),
      D_J(std::move(D_J_in)) {
  require(A.rows() == A.cols(), "plant A must be square, got " + dim_string(A));
  require(B.rows() == A.rows(), "plant B has " + dim_string(B) +
                                    " rows but A is " + dim_string(A));
  require(C.cols() == A.rows(), "plant C has " + dim_string(C) +
                                    " cols but A is " + dim_string(A));
  require(C_J.cols() == A.rows(), "performance output C_J has " +
                                      dim_string(C_J) + " cols but A is " +
                                      dim_string(A));
  require(D_J.rows() == C_J.rows() && D_J.cols() == B.cols(),
          "performance feedthrough D_J is " + dim_string(D_J) + ", expected " +
              std::to_string(C_J.rows()) + "x" + std::to_string(B.cols()));
}

Detector::Detector(Matrix A_e_in, Matrix B_e_in, Matrix K_e_in, Matrix C_e_in,
                   Matrix D_e_in, Matrix E_e_in)
    : A_e(std::move(A_e_in)),
      B_e(std::move(B_e_in)),
      K_e(std::move(K_e_in)),
      C_e(std::move(C_e_in)),
      D_e(std::move(D_e_in)),
      E_e(std::move(E_e_in)) {
  require(A_e.rows() == A_e.cols(),
          "detector A_e must be square, got " + dim_string(A_e));
  require(B_e.rows() == A_e.rows(), "detector B_e has " + dim_string(B_e) +
                                        " rows but A_e is " + dim_string(A_e));
  require(K_e.rows() == A_e.rows(), "detector K_e has " + dim_string(K_e) +
                                        " rows but A_e is " + dim_string(A_e));
  require(C_e.cols() == A_e.rows(), "detector C_e has " + dim_string(C_e) +
                                        " cols but A_e is " + dim_string(A_e));
  require(D_e.rows() == C_e.rows() && D_e.cols() == B_e.cols(),
          "detector D_e is " + dim_string(D_e) + ", expected " +
              std::to_string(C_e.rows()) + "x" + std::to_string(B_e.cols()));
  require(E_e.rows() == C_e.rows() && E_e.cols() == K_e.cols(),
          "detector E_e is " + dim_string(E_e) + ", expected " +
              std::to_string(C_e.rows()) + "x" + std::to_string(K_e.cols()));
}

namespace {

bool is_binary_diagonal(const Matrix& M) {
  if (M.rows() != M.cols()) return false;
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      const double v = M(i, j);
      if (i != j && v != 0.0) return false;
      if (i == j && v != 0.0 && v != 1.0) return false;
    }
  }
  return true;
}

}  // namespace

AttackChannel::AttackChannel(const Matrix& gamma_u, const Matrix& gamma_y)
    : gamma_u_(gamma_u), gamma_y_(gamma_y) {
  require(is_binary_diagonal(gamma_u_),
          "gamma_u must be a square diagonal 0/1 selection matrix");
  require(is_binary_diagonal(gamma_y_),
          "gamma_y must be a square diagonal 0/1 selection matrix");
  const bool has_u = gamma_u_.diagonal().sum() > 0.0;
  const bool has_y = gamma_y_.diagonal().sum() > 0.0;
  require(has_u != has_y,
          "exactly one of gamma_u, gamma_y must select channels "
          "(actuator or sensor injection, not both)");
  mode_ = has_u ? AttackMode::ActuatorOnly : AttackMode::SensorOnly;

  const Eigen::Index nu = gamma_u_.rows();
  const Eigen::Index nm = gamma_y_.rows();
  // Stacked injection matrix before pruning: blkdiag(gamma_u, gamma_y).
  for (Eigen::Index j = 0; j < nu; ++j) {
    if (gamma_u_(j, j) != 0.0) channel_map_.push_back(j);
  }
  for (Eigen::Index j = 0; j < nm; ++j) {
    if (gamma_y_(j, j) != 0.0) channel_map_.push_back(nu + j);
  }

  const Eigen::Index na = static_cast<Eigen::Index>(channel_map_.size());
  Ba_ = Matrix::Zero(nu, na);
  Da_ = Matrix::Zero(nm, na);
  for (Eigen::Index col = 0; col < na; ++col) {
    const Eigen::Index src = channel_map_[static_cast<std::size_t>(col)];
    if (src < nu) {
      Ba_(src, col) = 1.0;
    } else {
      Da_(src - nu, col) = 1.0;
    }
  }
}

AttackChannel AttackChannel::full_actuator(Eigen::Index n_u, Eigen::Index n_m) {
  return AttackChannel(Matrix::Identity(n_u, n_u), Matrix::Zero(n_m, n_m));
}

AttackChannel AttackChannel::full_sensor(Eigen::Index n_u, Eigen::Index n_m) {
  return AttackChannel(Matrix::Zero(n_u, n_u), Matrix::Identity(n_m, n_m));
}

ClosedLoopSystem assemble_closed_loop(const Plant& plant,
                                      const StateSpaceSystem& controller,
                                      const Detector& detector,
                                      const AttackChannel& channel,
                                      int horizon, double eps_r) {
  require(horizon >= 0, "horizon must be nonnegative");
  require(eps_r > 0.0, "detection threshold eps_r must be positive");
  require(controller.m() == plant.n_m(),
          "controller input (B_c cols = " + std::to_string(controller.m()) +
              ") does not match plant measurement output (C rows = " +
              std::to_string(plant.n_m()) + ")");
  require(controller.p() == plant.n_u(),
          "controller output (C_c rows = " + std::to_string(controller.p()) +
              ") does not match plant input (B cols = " +
              std::to_string(plant.n_u()) + ")");
  require(detector.B_e.cols() == plant.n_u(),
          "detector control input (B_e cols = " +
              std::to_string(detector.B_e.cols()) +
              ") does not match plant input (B cols = " +
              std::to_string(plant.n_u()) + ")");
  require(detector.K_e.cols() == plant.n_m(),
          "detector measurement input (K_e cols = " +
              std::to_string(detector.K_e.cols()) +
              ") does not match plant measurement output (C rows = " +
              std::to_string(plant.n_m()) + ")");
  require(channel.n_u() == plant.n_u(),
          "attack channel gamma_u is " + std::to_string(channel.n_u()) +
              "-dim but plant has " + std::to_string(plant.n_u()) +
              " actuator channels");
  require(channel.n_m() == plant.n_m(),
          "attack channel gamma_y is " + std::to_string(channel.n_m()) +
              "-dim but plant has " + std::to_string(plant.n_m()) +
              " sensor channels");

  const Matrix& A = plant.A;
  const Matrix& B = plant.B;
  const Matrix& C = plant.C;
  const Matrix& C_J = plant.C_J;
  const Matrix& D_J = plant.D_J;
  const Matrix& A_c = controller.A;
  const Matrix& B_c = controller.B;
  const Matrix& C_c = controller.C;
  const Matrix& D_c = controller.D;
  const Matrix& Ba = channel.Ba();
  const Matrix& Da = channel.Da();

  const Eigen::Index nx = plant.n_x();
  const Eigen::Index nz = controller.n();
  const Eigen::Index ns = detector.n_s();
  const Eigen::Index n = nx + nz + ns;
  const Eigen::Index na = channel.n_a();
  const Eigen::Index np = plant.n_p();
  const Eigen::Index nr = detector.n_r();

  const Matrix BeDc_Ke = detector.B_e * D_c + detector.K_e;  // n_s x n_m
  const Matrix DeDc_Ee = detector.D_e * D_c + detector.E_e;  // n_r x n_m

  // State order: [plant; controller; detector].
  //          [A + B D_c C     B C_c    0  ]          [B Ba + B D_c Da   ]
  //   A_cl = [B_c C           A_c      0  ],  B_cl = [B_c Da            ]
  //          [(B_e D_c+K_e)C  B_e C_c  A_e]          [(B_e D_c + K_e) Da]
  ClosedLoopSystem sys;
  sys.A_cl = Matrix::Zero(n, n);
  sys.A_cl.block(0, 0, nx, nx) = A + B * D_c * C;
  sys.A_cl.block(0, nx, nx, nz) = B * C_c;
  sys.A_cl.block(nx, 0, nz, nx) = B_c * C;
  sys.A_cl.block(nx, nx, nz, nz) = A_c;
  sys.A_cl.block(nx + nz, 0, ns, nx) = BeDc_Ke * C;
  sys.A_cl.block(nx + nz, nx, ns, nz) = detector.B_e * C_c;
  sys.A_cl.block(nx + nz, nx + nz, ns, ns) = detector.A_e;

  sys.B_cl = Matrix::Zero(n, na);
  sys.B_cl.block(0, 0, nx, na) = B * Ba + B * D_c * Da;
  sys.B_cl.block(nx, 0, nz, na) = B_c * Da;
  sys.B_cl.block(nx + nz, 0, ns, na) = BeDc_Ke * Da;

  sys.C_p = Matrix::Zero(np, n);
  sys.C_p.block(0, 0, np, nx) = C_J + D_J * D_c * C;
  sys.C_p.block(0, nx, np, nz) = D_J * C_c;
  sys.D_p = D_J * (D_c * Da + Ba);

  sys.C_r = Matrix::Zero(nr, n);
  sys.C_r.block(0, 0, nr, nx) = DeDc_Ee * C;
  sys.C_r.block(0, nx, nr, nz) = detector.D_e * C_c;
  sys.C_r.block(0, nx + nz, nr, ns) = detector.C_e;
  sys.D_r = DeDc_Ee * Da;

  sys.horizon = horizon;
  sys.eps_r = eps_r;
  return sys;
}

std::pair<Matrix, Matrix> zoh_discretize(const Matrix& A_c, const Matrix& B_c,
                                         double sampling_time) {
  require(A_c.rows() == A_c.cols(),
          "continuous A must be square, got " + dim_string(A_c));
  require(B_c.rows() == A_c.rows(), "continuous B has " + dim_string(B_c) +
                                        " rows but A is " + dim_string(A_c));
  require(sampling_time > 0.0, "sampling time must be positive");

  const Eigen::Index n = A_c.rows();
  const Eigen::Index m = B_c.cols();

  // exp([[A, B], [0, 0]] T_s) = [[A_d, B_d], [0, I]]
  Matrix aug = Matrix::Zero(n + m, n + m);
  aug.block(0, 0, n, n) = A_c * sampling_time;
  aug.block(0, n, n, m) = B_c * sampling_time;
  const Matrix phi = aug.exp();

  return {phi.block(0, 0, n, n), phi.block(0, n, n, m)};
}

Trajectories simulate_closed_loop(const ClosedLoopSystem& sys, const Signal& a,
                                  const Vector& x0) {
  const std::size_t samples = static_cast<std::size_t>(sys.horizon) + 1;
  require(a.size() == samples, "attack sequence has " +
                                   std::to_string(a.size()) +
                                   " samples, expected " +
                                   std::to_string(samples));
  require(x0.size() == sys.n(), "initial state has dimension " +
                                    std::to_string(x0.size()) + ", expected " +
                                    std::to_string(sys.n()));

  Trajectories out;
  out.x.reserve(samples);
  out.y_p.reserve(samples);
  out.y_r.reserve(samples);

  Vector x = x0;
  for (std::size_t k = 0; k < samples; ++k) {
    require(a[k].size() == sys.n_a(),
            "attack sample " + std::to_string(k) + " has width " +
                std::to_string(a[k].size()) + ", expected " +
                std::to_string(sys.n_a()));
    out.x.push_back(x);
    out.y_p.push_back(sys.C_p * x + sys.D_p * a[k]);
    out.y_r.push_back(sys.C_r * x + sys.D_r * a[k]);
    x = sys.A_cl * x + sys.B_cl * a[k];
  }
  return out;
}

}  // namespace fdia
