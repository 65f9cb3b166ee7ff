#include "fdia/sim.hpp"

#include <iomanip>
#include <ostream>

namespace fdia {

SimulationTrace evaluate(const ClosedLoopSystem& sys, const Signal& a) {
  const Trajectories traj =
      simulate_closed_loop(sys, a, Vector::Zero(sys.n()));

  SimulationTrace trace;
  trace.x = traj.x;
  trace.a = a;
  trace.eps_r = sys.eps_r;
  trace.E_p.reserve(a.size());
  trace.E_r.reserve(a.size());

  CompensatedSum perf;
  CompensatedSum det;
  for (std::size_t k = 0; k < a.size(); ++k) {
    perf.add(traj.y_p[k].squaredNorm());
    det.add(traj.y_r[k].squaredNorm());
    trace.E_p.push_back(perf.value());
    trace.E_r.push_back(det.value());
  }
  trace.stealthy = trace.E_r.back() <= sys.eps_r + 1e-8;
  return trace;
}

void write_trace_csv(std::ostream& os, const SimulationTrace& trace) {
  const Eigen::Index na = trace.a.empty() ? 0 : trace.a.front().size();
  os << "k";
  for (Eigen::Index i = 1; i <= na; ++i) os << ",a_" << i;
  os << ",E_p,E_r\n";

  os << std::setprecision(17);
  for (std::size_t k = 0; k < trace.a.size(); ++k) {
    os << k;
    for (Eigen::Index i = 0; i < na; ++i) os << "," << trace.a[k](i);
    os << "," << trace.E_p[k] << "," << trace.E_r[k] << "\n";
  }
}

}  // namespace fdia
