// Ground-state scan along V at fixed U, locating the switch from the
// spin-ordered to the charge-ordered winner.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nanocap/lattice.hpp"
#include "nanocap/model.hpp"
#include "nanocap/scf.hpp"

namespace nanocap::driver {

struct ScanPoint {
  double v = 0.0;
  std::string phase;
  SeedKind seed_won = SeedKind::PARA;
  double energy = 0.0;
  double staggered_m = 0.0;
  double dipole = 0.0;  // e*Angstrom
  double max_charge_dev = 0.0;
  bool converged = false;
};

struct PhaseTransition {
  std::vector<ScanPoint> points;
  bool found = false;
  double v_star = 0.0;        // first V with a charge-ordered winner after a spin-ordered one
  std::size_t index = 0;      // position of v_star in points
  double dipole_jump = 0.0;   // | |P(v_star)| - |P(previous)| |
  double within_drift = 0.0;  // largest adjacent |P| change away from the transition
  double m_below = 0.0;
  double m_above = 0.0;
  bool first_order = false;   // dipole_jump > kFirstOrderJump

  [[nodiscard]] std::string summary() const {
    if (!found) return "not found in range";
    return "V* = " + std::to_string(v_star) + " t, |dP| = " + std::to_string(dipole_jump) + " e*A" +
           (first_order ? " (first order)" : "");
  }
};

inline constexpr double kFirstOrderJump = 0.01;

inline PhaseTransition phase_scan(const RibbonLattice& lattice, double u, const std::vector<double>& v_range,
                                  const ScfControls& controls = {}) {
  if (v_range.empty()) throw std::invalid_argument("phase scan needs at least one V value");
  if (!std::is_sorted(v_range.begin(), v_range.end())) throw std::invalid_argument("V range must be ascending");

  PhaseTransition out;
  const auto zero = zero_field(lattice);
  std::optional<ScfSolution> previous;
  for (double v : v_range) {
    ModelParams params;
    params.U = u;
    params.V = v;
    params.validate();
    ScanPoint p;
    p.v = v;
    try {
      auto sol = ground_state(lattice, params, zero, controls, previous ? &*previous : nullptr);
      p.phase = std::string(phase_label(sol));
      p.seed_won = sol.seed_kind;
      p.energy = sol.total_energy;
      p.staggered_m = sol.staggered_m;
      p.dipole = sol.dipole;
      p.max_charge_dev = max_charge_deviation(sol.state);
      p.converged = sol.converged;
      previous = std::move(sol);
    } catch (const ScfError&) {
      p.phase = "FAILED";
      p.energy = p.staggered_m = p.dipole = p.max_charge_dev = std::nan("");
      previous.reset();
    }
    out.points.push_back(std::move(p));
  }

  const auto& pts = out.points;
  for (std::size_t k = 1; k < pts.size(); ++k) {
    if (pts[k - 1].phase == "SP" && pts[k].phase == "CP") {
      out.found = true;
      out.index = k;
      out.v_star = pts[k].v;
      out.dipole_jump = std::abs(std::abs(pts[k].dipole) - std::abs(pts[k - 1].dipole));
      out.m_below = pts[k - 1].staggered_m;
      out.m_above = pts[k].staggered_m;
      out.first_order = out.dipole_jump > kFirstOrderJump;
      break;
    }
  }
  if (out.found) {
    for (std::size_t k = 1; k < pts.size(); ++k) {
      if (k == out.index || pts[k].phase != pts[k - 1].phase) continue;
      const double d = std::abs(std::abs(pts[k].dipole) - std::abs(pts[k - 1].dipole));
      if (std::isfinite(d)) out.within_drift = std::max(out.within_drift, d);
    }
  }
  return out;
}

inline std::vector<double> linspace_inclusive(double lo, double hi, double step) {
  if (!(step > 0.0) || hi < lo) throw std::invalid_argument("bad range");
  std::vector<double> v;
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long k = 0; k <= n; ++k) v.push_back(lo + static_cast<double>(k) * step);
  return v;
}

}  // namespace nanocap::driver
