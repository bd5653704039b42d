// Physical constants (SI, exact 2019 definitions) and unit conversions.

#pragma once

#include <numbers>

namespace nanocap::units {

inline constexpr double kElementaryCharge = 1.602176634e-19;  // C
inline constexpr double kPlanck = 6.62607015e-34;             // J s
inline constexpr double kHbar = kPlanck / (2.0 * std::numbers::pi);

inline constexpr double kAttofarad = 1e-18;  // F
/// 1 aF/um expressed in F/m.
inline constexpr double kAttofaradPerMicron = 1e-12;

/// Capacitance in aF for a value in units of e^2/t, with t given in eV.
/// e^2 / (t_ev eV) = e / t_ev farad.
inline constexpr double natural_to_attofarad(double c_natural, double t_ev) {
  return c_natural * kElementaryCharge / t_ev / kAttofarad;
}

}  // namespace nanocap::units
