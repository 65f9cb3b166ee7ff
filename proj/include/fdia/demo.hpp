#pragma once

#include "fdia/system_io.hpp"

namespace fdia {

/// Residual definitions supported by the built-in power-system fixture.
/// PaperLiteral emits the observer's predicted output (y_r = C s);
/// ResidualStyle emits the classical innovation (y_r = y~ - C s).
enum class DetectorInterpretation { PaperLiteral, ResidualStyle };

/// Built-in demo: a three-state power generating system (load/machine,
/// hydro turbine, governor) under static output feedback, observed by a
/// Luenberger detector, with the adversary on the single actuator channel.
/// The plant is continuous-time with sampling_time set, so assembly
/// discretizes it by zero-order hold.
SystemConfig demo_power_system(
    DetectorInterpretation interpretation = DetectorInterpretation::PaperLiteral,
    int horizon = 50);

}  // namespace fdia
