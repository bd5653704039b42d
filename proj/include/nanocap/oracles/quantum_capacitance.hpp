// Quantum capacitance of a single-wall tube from the level-spacing argument:
// a tube in a box of length L_y has wavenumber spacing 2 pi / L_y; with
// the spin and valley degeneracies lifted slightly the average addition
// energy is dE = hbar v_F (2 pi / L_y) / 4. Setting dE = e^2 / (2 C_Q L_y)
// gives C_Q = 2 e^2 / (h v_F) per unit length.

#pragma once

#include <numbers>
#include <stdexcept>

#include "nanocap/units.hpp"

namespace nanocap::oracles {

struct QuantumCapEstimate {
  double v_f = 0.0;             // m/s
  double box_length = 0.0;      // m
  double level_spacing = 0.0;   // J
  double c_q_per_length = 0.0;  // aF/um
};

inline QuantumCapEstimate estimate_quantum_capacitance(double v_f, double box_length = 1e-6) {
  if (!(v_f > 0.0)) throw std::invalid_argument("Fermi velocity must be positive");
  if (!(box_length > 0.0)) throw std::invalid_argument("box length must be positive");
  using namespace units;
  QuantumCapEstimate q;
  q.v_f = v_f;
  q.box_length = box_length;
  const double dk = 2.0 * std::numbers::pi / box_length;
  q.level_spacing = kHbar * v_f * dk * 0.5 * 0.5;
  const double c_total = kElementaryCharge * kElementaryCharge / (2.0 * q.level_spacing);  // F
  q.c_q_per_length = c_total / box_length / kAttofaradPerMicron;
  return q;
}

/// 2 e^2 / (h v_F) in aF/um.
inline double quantum_capacitance(double v_f) {
  if (!(v_f > 0.0)) throw std::invalid_argument("Fermi velocity must be positive");
  using namespace units;
  return 2.0 * kElementaryCharge * kElementaryCharge / (kPlanck * v_f) / kAttofaradPerMicron;
}

/// Measured tube capacitance per length used for comparison, aF/um.
inline constexpr double kMeasuredTubeCapacitance = 190.0;

}  // namespace nanocap::oracles
