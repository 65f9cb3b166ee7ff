#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fdia/numeric.hpp"

namespace fdia {

/// Time-indexed signal, one sample per step k = 0..N_h.
using Signal = std::vector<Vector>;

/// Discrete-time state-space quadruple
///   x[k+1] = A x[k] + B u[k]
///   y[k]   = C x[k] + D u[k]
/// Any of the dimensions may be zero; products with empty matrices are
/// zero matrices of conforming size, so static (state-free) systems work
/// through the same code paths.
struct StateSpaceSystem {
  Matrix A, B, C, D;

  StateSpaceSystem() = default;
  StateSpaceSystem(Matrix A_in, Matrix B_in, Matrix C_in, Matrix D_in);

  /// A static gain y = D u (no state).
  static StateSpaceSystem static_gain(const Matrix& D);

  Eigen::Index n() const { return A.rows(); }  // states
  Eigen::Index m() const { return B.cols(); }  // inputs
  Eigen::Index p() const { return C.rows(); }  // outputs
};

/// Process model with measurement output y = C x and virtual performance
/// output y_p = C_J x + D_J u.
struct Plant {
  Matrix A, B, C, C_J, D_J;

  Plant() = default;
  Plant(Matrix A_in, Matrix B_in, Matrix C_in, Matrix C_J_in, Matrix D_J_in);

  Eigen::Index n_x() const { return A.rows(); }
  Eigen::Index n_u() const { return B.cols(); }
  Eigen::Index n_m() const { return C.rows(); }
  Eigen::Index n_p() const { return C_J.rows(); }
};

/// Anomaly detector driven by the control signal u and the (possibly
/// corrupted) measurement:
///   s[k+1] = A_e s[k] + B_e u[k] + K_e y~[k]
///   y_r[k] = C_e s[k] + D_e u[k] + E_e y~[k]
struct Detector {
  Matrix A_e, B_e, K_e, C_e, D_e, E_e;

  Detector() = default;
  Detector(Matrix A_e_in, Matrix B_e_in, Matrix K_e_in, Matrix C_e_in,
           Matrix D_e_in, Matrix E_e_in);

  Eigen::Index n_s() const { return A_e.rows(); }
  Eigen::Index n_r() const { return C_e.rows(); }
};

enum class AttackMode { ActuatorOnly, SensorOnly };

/// Injection channel: the adversary corrupts either the actuator or the
/// sensor signals (not both) through diagonal 0/1 selection matrices.
/// The stacked injection matrix
///   [B_a]   [Gamma_u     0   ]
///   [D_a] = [   0     Gamma_y]
/// has its all-zero columns pruned; channel_map() records which of the
/// original n_u + n_m columns survive.
class AttackChannel {
 public:
  AttackChannel(const Matrix& gamma_u, const Matrix& gamma_y);

  /// Actuator channel attacking every input (gamma_u = I).
  static AttackChannel full_actuator(Eigen::Index n_u, Eigen::Index n_m);
  /// Sensor channel attacking every measurement (gamma_y = I).
  static AttackChannel full_sensor(Eigen::Index n_u, Eigen::Index n_m);

  const Matrix& Ba() const { return Ba_; }  // n_u x n_a
  const Matrix& Da() const { return Da_; }  // n_m x n_a
  const Matrix& gamma_u() const { return gamma_u_; }
  const Matrix& gamma_y() const { return gamma_y_; }
  AttackMode mode() const { return mode_; }
  const std::vector<Eigen::Index>& channel_map() const { return channel_map_; }

  Eigen::Index n_u() const { return gamma_u_.rows(); }
  Eigen::Index n_m() const { return gamma_y_.rows(); }
  Eigen::Index n_a() const { return Ba_.cols(); }

 private:
  Matrix gamma_u_, gamma_y_;
  Matrix Ba_, Da_;
  AttackMode mode_;
  std::vector<Eigen::Index> channel_map_;
};

/// Attacked closed loop with the attack as the only input:
///   x[k+1] = A_cl x[k] + B_cl a[k]
///   y_p[k] = C_p x[k] + D_p a[k]
///   y_r[k] = C_r x[k] + D_r a[k]
/// where x stacks the plant, controller and detector states. Signals are
/// indexed k = 0..horizon inclusive (horizon + 1 samples).
struct ClosedLoopSystem {
  Matrix A_cl, B_cl, C_p, D_p, C_r, D_r;
  int horizon = 0;
  double eps_r = 1.0;  // detection-energy alarm threshold

  Eigen::Index n() const { return A_cl.rows(); }
  Eigen::Index n_a() const { return B_cl.cols(); }
  Eigen::Index n_p() const { return C_p.rows(); }
  Eigen::Index n_r() const { return C_r.rows(); }
};

/// Interconnects plant, output-feedback controller and detector under the
/// given injection channel into the attacked closed loop. Throws
/// std::invalid_argument naming the offending interconnection edge when
/// dimensions do not line up.
ClosedLoopSystem assemble_closed_loop(const Plant& plant,
                                      const StateSpaceSystem& controller,
                                      const Detector& detector,
                                      const AttackChannel& channel,
                                      int horizon, double eps_r = 1.0);

/// Zero-order-hold discretization: A_d = exp(A T_s), B_d = ∫ exp(A t) dt B,
/// both read off the exponential of the augmented matrix [[A, B], [0, 0]] T_s.
std::pair<Matrix, Matrix> zoh_discretize(const Matrix& A_c, const Matrix& B_c,
                                         double sampling_time);

struct Trajectories {
  Signal x;    // states x[0..N_h]
  Signal y_p;  // performance output
  Signal y_r;  // detection output
};

/// Exact forward recursion of the closed loop for k = 0..horizon.
/// `a` must hold horizon + 1 samples of width n_a.
Trajectories simulate_closed_loop(const ClosedLoopSystem& sys, const Signal& a,
                                  const Vector& x0);

}  // namespace fdia
