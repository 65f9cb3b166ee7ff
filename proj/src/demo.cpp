#include "fdia/demo.hpp"

namespace fdia {

SystemConfig demo_power_system(DetectorInterpretation interpretation,
                               int horizon) {
  // Load/machine, hydro turbine and governor time constants, speed
  // regulation, and load/machine steady-state gain.
  const double T_lm = 6.0;
  const double T_h = 4.0;
  const double T_g = 0.2;
  const double R = 0.05;
  const double K_lm = 1.0;
  const double T_s = 0.1;

  Matrix A_c(3, 3);
  A_c << -1.0 / T_lm, K_lm / T_lm, -2.0 * K_lm / T_lm,
      0.0, -2.0 / T_h, 6.0 / T_h,
      -1.0 / (T_g * R), 0.0, -1.0 / T_g;
  Matrix B_c(3, 1);
  B_c << 0.0, 0.0, 1.0 / T_g;

  Matrix C(1, 3);
  C << 1.0, 0.0, 0.0;  // frequency deviation is the measured output
  Matrix C_J(2, 3);
  C_J << 1.0, 0.0, 0.0,
      0.0, 1.0, 0.0;
  const Matrix D_J = Matrix::Zero(2, 1);

  SystemConfig config;
  config.plant = Plant(A_c, B_c, C, C_J, D_J);
  config.sampling_time = T_s;
  config.horizon = horizon;

  // Static output feedback u = 19 y~.
  Matrix D_ctrl(1, 1);
  D_ctrl << 19.0;
  config.controller = StateSpaceSystem::static_gain(D_ctrl);

  // Luenberger detector built on the discretized plant.
  const auto [A_d, B_d] = zoh_discretize(A_c, B_c, T_s);
  Matrix K_e(3, 1);
  K_e << 0.17, -2.83, -7.43;
  const Matrix A_e = A_d - K_e * C;

  Matrix C_e = C;
  Matrix E_e = Matrix::Zero(1, 1);
  if (interpretation == DetectorInterpretation::ResidualStyle) {
    C_e = -C;
    E_e = Matrix::Identity(1, 1);
  }
  config.detector =
      Detector(A_e, B_d, K_e, C_e, Matrix::Zero(1, 1), E_e);

  // Adversary on the single actuator channel.
  config.gamma_u = Matrix::Identity(1, 1);
  config.gamma_y = Matrix::Zero(1, 1);
  return config;
}

}  // namespace fdia
