#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "fdia/state_space.hpp"

namespace fdia {

/// Raised on malformed or dimensionally inconsistent system descriptions.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parsed system description before interconnection. `sampling_time`
/// present means the plant matrices are continuous-time and get
/// zero-order-hold discretized during assembly (plant only; controller and
/// detector are taken as given).
struct SystemConfig {
  Plant plant;
  StateSpaceSystem controller;
  Detector detector;
  Matrix gamma_u;  // diagonal 0/1, n_u x n_u
  Matrix gamma_y;  // diagonal 0/1, n_m x n_m
  int horizon = 1;
  std::optional<double> sampling_time;
  double eps_r = 1.0;
};

/// Reads the JSON system description:
///   top level: "plant" {A,B,C,C_J,D_J}, "controller" {A_c,B_c,C_c,D_c},
///   "detector" {A_e,B_e,K_e,C_e,D_e,E_e}, "attack" {gamma_u,gamma_y},
///   "horizon", optional "sampling_time", optional "eps_r".
/// Matrices are row-major nested arrays; gamma_u/gamma_y may also be flat
/// arrays of diagonal entries. Missing controller/detector matrices
/// default to zero with dimensions inferred from what is present.
SystemConfig load_system_config(std::istream& in);
SystemConfig load_system_config_file(const std::string& path);

/// Discretizes the plant when a sampling time is present, then assembles
/// the attacked closed loop.
ClosedLoopSystem build_closed_loop(const SystemConfig& config,
                                   std::optional<int> horizon_override = {});

}  // namespace fdia
