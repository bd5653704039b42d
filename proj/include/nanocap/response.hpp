// Electrode charges and the finite-difference capacitance of a ribbon.
//
// Sign convention: the charge of an electrode is its electron deficit,
// Q = sum_{i in electrode} (1 - n_i), in units of e. Under a positive
// voltage the bottom edge (x = 0) sits at the higher potential energy and
// loses electrons, so Q_bottom grows.

#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nanocap/lattice.hpp"
#include "nanocap/model.hpp"
#include "nanocap/scf.hpp"
#include "nanocap/units.hpp"

namespace nanocap {

inline double electrode_charge(const MeanFieldState& state, std::span<const std::size_t> electrode) {
  double q = 0.0;
  for (auto i : electrode) q += 1.0 - state.charge(i);
  return q;
}

inline double electrode_charge(const ScfSolution& solution, std::span<const std::size_t> electrode) {
  return electrode_charge(solution.state, electrode);
}

struct CapacitanceControls {
  double delta_v = 0.01;  // t/e
  FieldProfile profile = FieldProfile::Ramp;
  ScfControls scf;
  // Also restart PARA/SP/CP from scratch under the field. Every converged
  // zero-field seed branch is continued into the field either way.
  bool fresh_seeds_with_field = false;
};

/// Linear-response regime is assumed above this relative deviation.
inline constexpr double kLinearityWarnThreshold = 0.05;

/// Zero-field states whose energies agree this closely are treated as the
/// same (symmetry-related) branch when re-deriving the reference.
inline constexpr double kBranchEnergyTolerance = 1e-8;

struct FieldRun {
  ScfSolution solution;
  double q_bottom = 0.0;
  double q_top = 0.0;
};

struct CapacitanceRecord {
  double delta_v = 0.0;
  double q_bottom_0 = 0.0;
  double q_top_0 = 0.0;
  double q_bottom_v = 0.0;
  double q_top_v = 0.0;
  double c_natural = 0.0;         // e^2/t
  double c_si = 0.0;              // aF
  double c_polarizability = 0.0;  // (dP/dE)/W^2 in e^2/t
  double c_half = 0.0;            // C at delta_v/2
  double linearity_dev = 0.0;     // |C(dV) - C(dV/2)| / C(dV/2); non-finite if C(dV/2) = 0
  bool linearity_warning = false;
  double width_angstrom = 0.0;
  std::string phase;
  bool phase_switched = false;    // field selected a branch not connected to the zero-field state
  ScfSolution reference;          // zero-field state the differences are taken from
  ScfSolution field_on;
};

inline FieldRun make_run(const RibbonLattice& lattice, ScfSolution solution) {
  FieldRun run;
  run.q_bottom = electrode_charge(solution, lattice.electrode_bottom());
  run.q_top = electrode_charge(solution, lattice.electrode_top());
  run.solution = std::move(solution);
  return run;
}

/// Continues `start` to the field for voltage `delta_v` (either sign).
inline FieldRun field_response(const RibbonLattice& lattice, const ModelParams& params, const ScfSolution& start,
                               double delta_v, const CapacitanceControls& controls) {
  const auto field = make_field(lattice, delta_v, controls.profile);
  auto sol = solve_scf_from(lattice, params, field, start.state, start.seed_kind, controls.scf);
  sol.from_continuation = true;
  return make_run(lattice, std::move(sol));
}

namespace detail {

inline bool same_branch(const ScfSolution& a, const ScfSolution& b, double tol) {
  if (std::abs(a.total_energy - b.total_energy) > kEnergyTieTolerance) return false;
  for (std::size_t i = 0; i < a.state.size(); ++i)
    if (std::abs(a.state.up[i] - b.state.up[i]) > tol || std::abs(a.state.down[i] - b.state.down[i]) > tol)
      return false;
  return true;
}

}  // namespace detail

/// C = |Q_bottom(dV) - Q_bottom(0)| / dV with the zero-field and field-on
/// states on the same branch. Repeats at dV/2 for the linearity check.
///
/// The PARA, SP and CP seeds are solved at zero field and each distinct
/// converged branch is continued into the field; the lowest field-on energy
/// wins, with the zero-field ground state first on ties. If the winner's
/// zero-field branch is degenerate with the ground state (e.g. the mirror
/// image of a polarized state) it becomes the reference; otherwise the
/// field has reordered the branches and the record is flagged.
inline CapacitanceRecord capacitance_fd(const RibbonLattice& lattice, const ModelParams& params,
                                        const CapacitanceControls& controls = {}) {
  if (!(controls.delta_v > 0.0)) throw std::invalid_argument("capacitance needs a positive voltage step");
  params.validate();
  const auto& bottom = lattice.electrode_bottom();
  const auto& top = lattice.electrode_top();
  const auto zero = zero_field(lattice);

  CapacitanceRecord rec;
  rec.delta_v = controls.delta_v;
  rec.width_angstrom = ribbon_width(lattice);

  auto outcomes = solve_all_seeds(lattice, params, zero, controls.scf);
  const auto ground = lowest_energy(outcomes);
  if (ground == outcomes.size()) throw *outcomes.back().error;
  const int failed = count_failed(outcomes);

  // Distinct zero-field branches, ground state first.
  std::vector<ScfSolution> branches;
  branches.push_back(*outcomes[ground].solution);
  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    if (k == ground || !outcomes[k].solution) continue;
    bool seen = false;
    for (const auto& b : branches) seen = seen || detail::same_branch(b, *outcomes[k].solution, 1e-6);
    if (!seen) branches.push_back(*outcomes[k].solution);
  }

  std::vector<std::optional<FieldRun>> runs(branches.size());
  std::optional<ScfError> last_error;
  std::size_t winner = branches.size();
  for (std::size_t b = 0; b < branches.size(); ++b) {
    try {
      runs[b] = field_response(lattice, params, branches[b], controls.delta_v, controls);
      if (winner == branches.size() ||
          runs[b]->solution.total_energy < runs[winner]->solution.total_energy - kEnergyTieTolerance)
        winner = b;
    } catch (const ScfError& e) {
      last_error = e;
    }
  }
  if (winner == branches.size()) throw *last_error;

  // Among the field-on states degenerate with the winner, take one whose
  // zero-field branch is degenerate with the ground state.
  std::optional<std::size_t> ref;
  for (std::size_t b = 0; b < branches.size() && !ref; ++b) {
    if (!runs[b]) continue;
    const bool ties_winner =
        std::abs(runs[b]->solution.total_energy - runs[winner]->solution.total_energy) <= kBranchEnergyTolerance;
    const bool ground_branch =
        std::abs(branches[b].total_energy - branches[0].total_energy) <= kBranchEnergyTolerance;
    if (ties_winner && ground_branch) ref = b;
  }
  if (!ref) {
    rec.phase_switched = true;
    ref = 0;
  }
  std::optional<FieldRun> full = std::move(runs[rec.phase_switched ? winner : *ref]);
  ScfSolution reference = branches[*ref];
  reference.seeds_failed = failed;

  if (controls.fresh_seeds_with_field) {
    // A fresh start that beats every continued branch is related back to
    // zero field by relaxing it there.
    const auto field = make_field(lattice, controls.delta_v, controls.profile);
    auto fresh = solve_all_seeds(lattice, params, field, controls.scf);
    const auto k = lowest_energy(fresh);
    if (k != fresh.size() &&
        fresh[k].solution->total_energy < full->solution.total_energy - kEnergyTieTolerance) {
      try {
        auto back = solve_scf_from(lattice, params, zero, fresh[k].solution->state, fresh[k].kind, controls.scf);
        if (std::abs(back.total_energy - branches[0].total_energy) <= kBranchEnergyTolerance) {
          back.seeds_failed = failed;
          reference = std::move(back);
          rec.phase_switched = false;
        } else {
          rec.phase_switched = true;
        }
      } catch (const ScfError&) {
        rec.phase_switched = true;
      }
      full = make_run(lattice, std::move(*fresh[k].solution));
    }
  }

  FieldRun half = field_response(lattice, params, reference, 0.5 * controls.delta_v, controls);

  rec.q_bottom_0 = electrode_charge(reference, bottom);
  rec.q_top_0 = electrode_charge(reference, top);
  rec.q_bottom_v = full->q_bottom;
  rec.q_top_v = full->q_top;
  rec.c_natural = std::abs(rec.q_bottom_v - rec.q_bottom_0) / controls.delta_v;
  rec.c_half = std::abs(half.q_bottom - rec.q_bottom_0) / (0.5 * controls.delta_v);
  rec.c_si = units::natural_to_attofarad(rec.c_natural, params.t_ev);
  rec.c_polarizability =
      std::abs(full->solution.dipole - reference.dipole) / (controls.delta_v * rec.width_angstrom);
  rec.linearity_dev = rec.c_half > 0.0 ? std::abs(rec.c_natural - rec.c_half) / rec.c_half
                                       : std::numeric_limits<double>::infinity();
  rec.linearity_warning = !(rec.linearity_dev <= kLinearityWarnThreshold);
  rec.phase = std::string(phase_label(reference));
  rec.reference = std::move(reference);
  rec.field_on = std::move(full->solution);
  return rec;
}

/// Relative deviation |C(dV) - C(dV/2)| / C(dV/2); infinite when C(dV/2) = 0.
inline double check_linearity(const RibbonLattice& lattice, const ModelParams& params, double delta_v,
                              CapacitanceControls controls = {}) {
  controls.delta_v = delta_v;
  return capacitance_fd(lattice, params, controls).linearity_dev;
}

}  // namespace nanocap
