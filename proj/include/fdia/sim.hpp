#pragma once

#include <iosfwd>

#include "fdia/state_space.hpp"

namespace fdia {

/// Replay of an attack against the closed loop: state and output
/// trajectories plus running output energies and the stealth verdict.
struct SimulationTrace {
  Signal x;
  Signal a;
  std::vector<double> E_p;  // cumulative performance energy, k = 0..N_h
  std::vector<double> E_r;  // cumulative detection energy
  double eps_r = 1.0;
  bool stealthy = false;    // E_r at the end of the horizon within eps_r
};

/// Exact rollout from x[0] = 0 with compensated energy accumulation.
SimulationTrace evaluate(const ClosedLoopSystem& sys, const Signal& a);

/// Columns: k, a_1..a_na, E_p, E_r. Header row, ',' separator, '.' decimal.
void write_trace_csv(std::ostream& os, const SimulationTrace& trace);

}  // namespace fdia
