// Self-consistent Hartree iteration, seeds, and ground-state selection.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "nanocap/eigensolver.hpp"
#include "nanocap/lattice.hpp"
#include "nanocap/model.hpp"

namespace nanocap {

enum class SeedKind { PARA, SP, CP };

inline std::string_view to_string(SeedKind k) {
  switch (k) {
    case SeedKind::PARA: return "PARA";
    case SeedKind::SP: return "SP";
    case SeedKind::CP: return "CP";
  }
  return "?";
}

struct ScfControls {
  double tol = 1e-8;          // on max |n_computed - n_in|
  int max_iter = 5000;
  double mixing = 0.3;        // linear mixing weight of the new density
  double degeneracy_tol = 1e-9;
  double seed_amplitude = 0.1;
  // Give up early when the residual has not halved within this many
  // iterations (sharp occupations can lock into a limit cycle). 0 disables.
  int stall_window = 200;

  void validate() const {
    if (!(tol > 0.0)) throw std::invalid_argument("SCF tolerance must be positive");
    if (max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");
    if (!(mixing > 0.0 && mixing <= 1.0)) throw std::invalid_argument("mixing must lie in (0, 1]");
    if (stall_window < 0) throw std::invalid_argument("stall_window must be non-negative");
  }
};

/// Initial densities for the three phases. `amplitude` must be in (0, 0.25].
inline MeanFieldState initial_seed(SeedKind kind, const RibbonLattice& lattice, double amplitude = 0.1) {
  if (!(amplitude > 0.0 && amplitude <= 0.25))
    throw std::invalid_argument("seed amplitude must lie in (0, 0.25]");
  MeanFieldState s(lattice.size(), 0.5);
  switch (kind) {
    case SeedKind::PARA: break;
    case SeedKind::SP:
      for (std::size_t i = 0; i < lattice.size(); ++i) {
        const double eta = lattice.sublattice_sign(i);
        s.up[i] = 0.5 + amplitude * eta;
        s.down[i] = 0.5 - amplitude * eta;
      }
      break;
    case SeedKind::CP: {
      for (auto i : lattice.electrode_bottom()) s.up[i] = 0.5 + 0.5 * amplitude;
      for (auto i : lattice.electrode_top()) s.up[i] = 0.5 - 0.5 * amplitude;
      // Equal-size edge sets already balance; this only matters for unequal electrode sets.
      double excess = -0.5 * static_cast<double>(lattice.size());
      for (double v : s.up) excess += v;
      const double shift = excess / static_cast<double>(lattice.size());
      for (double& v : s.up) v -= shift;
      s.down = s.up;
      break;
    }
  }
  return s;
}

/// Solution of the one-body problem for one spin.
struct SpinLevels {
  Eigen::VectorXd energies;          // ascending
  std::vector<double> occupations;   // same order, in [0,1]
  std::vector<double> density;       // per site
  double band_energy = 0.0;          // sum_k f_k e_k
  bool fractional = false;           // Fermi level sits in a degenerate group
};

/// Zero-temperature occupations for `n_electrons` electrons. Levels within
/// `tol` of each other (chained) that straddle the Fermi level share the
/// remaining electrons equally.
inline std::vector<double> fermi_occupations(const Eigen::VectorXd& energies, std::size_t n_electrons,
                                             double tol, bool* fractional = nullptr) {
  const auto n = static_cast<std::size_t>(energies.size());
  if (n_electrons > n) throw std::invalid_argument("more electrons than levels");
  std::vector<double> f(n, 0.0);
  if (fractional) *fractional = false;
  if (n_electrons == 0) return f;
  std::size_t lo = n_electrons - 1;
  std::size_t hi = n_electrons - 1;
  while (lo > 0 && energies[lo] - energies[lo - 1] <= tol) --lo;
  while (hi + 1 < n && energies[hi + 1] - energies[hi] <= tol) ++hi;
  for (std::size_t k = 0; k < lo; ++k) f[k] = 1.0;
  if (hi + 1 == n_electrons) {
    for (std::size_t k = lo; k <= hi; ++k) f[k] = 1.0;
    return f;
  }
  const double share = static_cast<double>(n_electrons - lo) / static_cast<double>(hi - lo + 1);
  for (std::size_t k = lo; k <= hi; ++k) f[k] = share;
  if (fractional) *fractional = true;
  return f;
}

/// Diagonalizes `h` and fills the lowest `n_electrons` levels.
inline SpinLevels fill_levels(const Eigen::MatrixXd& h, std::size_t n_electrons, double degeneracy_tol) {
  auto eig = eigh(h);
  SpinLevels out;
  out.occupations = fermi_occupations(eig.values, n_electrons, degeneracy_tol, &out.fractional);
  std::size_t n_occ = 0;
  while (n_occ < out.occupations.size() && out.occupations[n_occ] > 0.0) ++n_occ;

  const auto cols = static_cast<Eigen::Index>(n_occ);
  Eigen::Map<const Eigen::VectorXd> f(out.occupations.data(), cols);
  const Eigen::VectorXd rho = eig.vectors.leftCols(cols).array().square().matrix() * f;
  out.density.resize(static_cast<std::size_t>(rho.size()));
  for (Eigen::Index i = 0; i < rho.size(); ++i) out.density[static_cast<std::size_t>(i)] = std::clamp(rho[i], 0.0, 1.0);
  out.band_energy = f.dot(eig.values.head(cols));
  out.energies = std::move(eig.values);
  return out;
}

struct ScfStep {
  MeanFieldState next;      // mixed densities
  MeanFieldState computed;  // densities from the occupied orbitals
  double residual = 0.0;    // max |computed - input|
  SpinLevels up;
  SpinLevels down;
};

class ScfError : public std::runtime_error {
 public:
  ScfError(const std::string& what, int iteration, double residual)
      : std::runtime_error(what), iteration_(iteration), residual_(residual) {}
  int iteration() const { return iteration_; }
  double residual() const { return residual_; }

 private:
  int iteration_;
  double residual_;
};

/// One Hartree update: solve both spins at the input densities, occupy the
/// lower half of each spectrum, mix.
inline ScfStep scf_step(const MeanFieldState& state, const RibbonLattice& lattice, const ModelParams& params,
                        const AppliedField& field, double mixing = 0.3, double degeneracy_tol = 1e-9,
                        int iteration = 0) {
  const std::size_t per_spin = lattice.size() / 2;
  ScfStep step;
  try {
    step.up = fill_levels(build_mf_hamiltonian(lattice, params, state, field, Spin::Up), per_spin, degeneracy_tol);
    // Spin-symmetric input gives identical Hamiltonians.
    if (state.up == state.down)
      step.down = step.up;
    else
      step.down =
          fill_levels(build_mf_hamiltonian(lattice, params, state, field, Spin::Down), per_spin, degeneracy_tol);
  } catch (const EigensolverError& e) {
    throw ScfError(std::string("eigensolver failure at SCF iteration ") + std::to_string(iteration) + ": " +
                       e.what(),
                   iteration, std::numeric_limits<double>::quiet_NaN());
  }

  step.computed.up = step.up.density;
  step.computed.down = step.down.density;
  step.next = MeanFieldState(lattice.size());
  double residual = 0.0;
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    residual = std::max({residual, std::abs(step.computed.up[i] - state.up[i]),
                         std::abs(step.computed.down[i] - state.down[i])});
    step.next.up[i] = std::clamp((1.0 - mixing) * state.up[i] + mixing * step.computed.up[i], 0.0, 1.0);
    step.next.down[i] = std::clamp((1.0 - mixing) * state.down[i] + mixing * step.computed.down[i], 0.0, 1.0);
  }
  step.residual = residual;
  return step;
}

/// Staggered magnetization (1/N) sum_i eta_i (n_up - n_dn) / 2.
inline double staggered_magnetization(const RibbonLattice& lattice, const MeanFieldState& s) {
  double m = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) m += lattice.sublattice_sign(i) * 0.5 * s.spin(i);
  return m / static_cast<double>(s.size());
}

/// Dipole sum_i (1 - n_i) x_i in e*Angstrom.
inline double dipole_moment(const RibbonLattice& lattice, const MeanFieldState& s) {
  double p = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) p += (1.0 - s.charge(i)) * lattice.site(i).x;
  return p;
}

inline double max_charge_deviation(const MeanFieldState& s) {
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) d = std::max(d, std::abs(s.charge(i) - 1.0));
  return d;
}

inline double max_spin_density(const MeanFieldState& s) {
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) d = std::max(d, std::abs(s.spin(i)));
  return d;
}

struct ScfSolution {
  MeanFieldState state;            // densities that generated `spectrum_*`
  Eigen::VectorXd spectrum_up;
  Eigen::VectorXd spectrum_down;
  double total_energy = 0.0;
  double homo_lumo_gap = 0.0;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  SeedKind seed_kind = SeedKind::PARA;
  double staggered_m = 0.0;
  double dipole = 0.0;
  bool fractional_occupation = false;
  double first_iterate_energy = 0.0;
  bool variational_ok = true;  // total_energy <= first_iterate_energy (+ small slack)
  int seeds_failed = 0;        // set by ground_state
  bool from_continuation = false;
};

/// Converged phase label from the order parameters.
inline std::string_view phase_label(const ScfSolution& s, double threshold = 1e-6) {
  if (max_spin_density(s.state) > threshold) return "SP";
  if (std::abs(s.dipole) > threshold) return "CP";
  return "PARA";
}

inline double homo_lumo_gap(const Eigen::VectorXd& spectrum, std::size_t n_electrons) {
  if (n_electrons == 0 || n_electrons >= static_cast<std::size_t>(spectrum.size()))
    return std::numeric_limits<double>::infinity();
  return spectrum[static_cast<Eigen::Index>(n_electrons)] - spectrum[static_cast<Eigen::Index>(n_electrons - 1)];
}

/// Iterates from an explicit starting state. Throws ScfError on non-convergence.
inline ScfSolution solve_scf_from(const RibbonLattice& lattice, const ModelParams& params,
                                  const AppliedField& field, MeanFieldState seed, SeedKind lineage,
                                  const ScfControls& controls = {}) {
  params.validate();
  controls.validate();
  check_state(lattice, seed);

  ScfSolution sol;
  sol.seed_kind = lineage;
  MeanFieldState state = std::move(seed);
  double residual = std::numeric_limits<double>::infinity();
  double mark_residual = residual;
  int mark_iteration = 0;
  for (int it = 1; it <= controls.max_iter; ++it) {
    ScfStep step = scf_step(state, lattice, params, field, controls.mixing, controls.degeneracy_tol, it);
    residual = step.residual;
    if (residual < 0.5 * mark_residual) {
      mark_residual = residual;
      mark_iteration = it;
    } else if (controls.stall_window > 0 && it - mark_iteration > controls.stall_window) {
      throw ScfError("SCF from " + std::string(to_string(lineage)) + " seed stalled at iteration " +
                         std::to_string(it) + " (residual " + std::to_string(residual) + ")",
                     it, residual);
    }
    if (it == 1)
      sol.first_iterate_energy = total_energy(params, lattice, state, step.up.band_energy + step.down.band_energy);
    if (residual < controls.tol) {
      sol.total_energy = total_energy(params, lattice, state, step.up.band_energy + step.down.band_energy);
      sol.state = std::move(state);
      sol.spectrum_up = std::move(step.up.energies);
      sol.spectrum_down = std::move(step.down.energies);
      sol.fractional_occupation = step.up.fractional || step.down.fractional;
      sol.iterations = it;
      sol.residual = residual;
      sol.converged = true;
      break;
    }
    state = std::move(step.next);
  }
  if (!sol.converged)
    throw ScfError("SCF from " + std::string(to_string(lineage)) + " seed did not converge in " +
                       std::to_string(controls.max_iter) + " iterations (residual " + std::to_string(residual) + ")",
                   controls.max_iter, residual);

  const std::size_t per_spin = lattice.size() / 2;
  sol.homo_lumo_gap = std::min(homo_lumo_gap(sol.spectrum_up, per_spin), homo_lumo_gap(sol.spectrum_down, per_spin));
  sol.staggered_m = staggered_magnetization(lattice, sol.state);
  sol.dipole = dipole_moment(lattice, sol.state);
  sol.variational_ok = sol.total_energy <= sol.first_iterate_energy + 1e-9;
  return sol;
}

inline ScfSolution solve_scf(const RibbonLattice& lattice, const ModelParams& params, const AppliedField& field,
                             SeedKind seed_kind, const ScfControls& controls = {}) {
  return solve_scf_from(lattice, params, field, initial_seed(seed_kind, lattice, controls.seed_amplitude), seed_kind,
                        controls);
}

/// Energies closer than this are treated as ties in ground-state selection.
inline constexpr double kEnergyTieTolerance = 1e-10;

struct SeedOutcome {
  SeedKind kind = SeedKind::PARA;
  std::optional<ScfSolution> solution;
  std::optional<ScfError> error;
};

/// Runs solve_scf from the PARA, SP and CP seeds, in that order.
inline std::vector<SeedOutcome> solve_all_seeds(const RibbonLattice& lattice, const ModelParams& params,
                                                const AppliedField& field, const ScfControls& controls = {}) {
  std::vector<SeedOutcome> out;
  for (auto kind : {SeedKind::PARA, SeedKind::SP, SeedKind::CP}) {
    SeedOutcome o;
    o.kind = kind;
    try {
      o.solution = solve_scf(lattice, params, field, kind, controls);
    } catch (const ScfError& e) {
      o.error = e;
    }
    out.push_back(std::move(o));
  }
  return out;
}

/// Index of the lowest-energy converged outcome; earlier entries win ties.
/// Returns outcomes.size() if none converged.
inline std::size_t lowest_energy(const std::vector<SeedOutcome>& outcomes) {
  std::size_t best = outcomes.size();
  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    if (!outcomes[k].solution) continue;
    if (best == outcomes.size() ||
        outcomes[k].solution->total_energy < outcomes[best].solution->total_energy - kEnergyTieTolerance)
      best = k;
  }
  return best;
}

inline int count_failed(const std::vector<SeedOutcome>& outcomes) {
  int n = 0;
  for (const auto& o : outcomes) n += o.solution ? 0 : 1;
  return n;
}

/// Lowest-energy converged solution over the PARA, SP and CP seeds, plus an
/// optional continuation start which takes precedence on ties. Throws the
/// last ScfError only if every start fails.
inline ScfSolution ground_state(const RibbonLattice& lattice, const ModelParams& params, const AppliedField& field,
                                const ScfControls& controls = {},
                                const ScfSolution* continuation = nullptr) {
  std::vector<SeedOutcome> outcomes;
  if (continuation) {
    SeedOutcome o;
    o.kind = continuation->seed_kind;
    try {
      o.solution = solve_scf_from(lattice, params, field, continuation->state, continuation->seed_kind, controls);
      o.solution->from_continuation = true;
    } catch (const ScfError& e) {
      o.error = e;
    }
    outcomes.push_back(std::move(o));
  }
  for (auto& o : solve_all_seeds(lattice, params, field, controls)) outcomes.push_back(std::move(o));

  const auto best = lowest_energy(outcomes);
  if (best == outcomes.size()) throw *outcomes.back().error;
  ScfSolution result = std::move(*outcomes[best].solution);
  result.seeds_failed = count_failed(outcomes);
  return result;
}

}  // namespace nanocap
