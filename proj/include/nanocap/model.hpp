// Extended Hubbard model in the Hartree mean-field approximation.

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "nanocap/lattice.hpp"

namespace nanocap {

/// Energies are in units of the hopping t; t_ev is used only for SI output.
struct ModelParams {
  double t = 1.0;
  double U = 0.0;
  double V = 0.0;
  double t_ev = 2.7;

  void validate() const {
    if (!(t > 0.0)) throw std::invalid_argument("hopping t must be positive");
    if (U < 0.0 || V < 0.0) throw std::invalid_argument("U and V must be non-negative");
    if (!(t_ev > 0.0)) throw std::invalid_argument("t_ev must be positive");
  }

  bool interacting() const { return U != 0.0 || V != 0.0; }
};

/// Name of the decoupling scheme, written into output metadata.
inline constexpr const char* kMeanFieldScheme = "Hartree (density-density) for U and V, V measured from the neutral background; no Fock exchange";

enum class Spin { Up, Down };

/// Spin-resolved site occupations, each entry in [0, 1].
struct MeanFieldState {
  std::vector<double> up;
  std::vector<double> down;

  MeanFieldState() = default;
  explicit MeanFieldState(std::size_t n, double fill = 0.5) : up(n, fill), down(n, fill) {}

  std::size_t size() const { return up.size(); }
  double charge(std::size_t i) const { return up[i] + down[i]; }
  double spin(std::size_t i) const { return up[i] - down[i]; }
  const std::vector<double>& of(Spin s) const { return s == Spin::Up ? up : down; }
  std::vector<double>& of(Spin s) { return s == Spin::Up ? up : down; }

  friend bool operator==(const MeanFieldState&, const MeanFieldState&) = default;
};

enum class FieldProfile {
  Ramp,  ///< linear across the width, edges at +-dV/2
  Step   ///< +-dV/2 on the two electrode lines, zero inside
};

/// Transverse potential energy per site (units of t) for an edge-to-edge
/// voltage delta_v (units of t/e).
struct AppliedField {
  double delta_v = 0.0;
  std::vector<double> potential;
};

inline AppliedField zero_field(const RibbonLattice& lattice) {
  return {0.0, std::vector<double>(lattice.size(), 0.0)};
}

/// Linear ramp phi_i = -dV (x_i - x_c) / W: the bottom edge (x = 0) sits at
/// +dV/2 and the top edge at -dV/2. Negative dV reverses the polarity.
inline AppliedField ramp_potential(const RibbonLattice& lattice, double delta_v) {
  const double width = ribbon_width(lattice);
  const double centre = 0.5 * width;
  AppliedField field{delta_v, std::vector<double>(lattice.size(), 0.0)};
  if (delta_v == 0.0) return field;
  for (std::size_t i = 0; i < lattice.size(); ++i)
    field.potential[i] = -delta_v * (lattice.site(i).x - centre) / width;
  return field;
}

inline AppliedField step_potential(const RibbonLattice& lattice, double delta_v) {
  AppliedField field{delta_v, std::vector<double>(lattice.size(), 0.0)};
  if (delta_v == 0.0) return field;
  for (auto i : lattice.electrode_bottom()) field.potential[i] = +0.5 * delta_v;
  for (auto i : lattice.electrode_top()) field.potential[i] = -0.5 * delta_v;
  return field;
}

inline AppliedField make_field(const RibbonLattice& lattice, double delta_v, FieldProfile profile) {
  return profile == FieldProfile::Ramp ? ramp_potential(lattice, delta_v) : step_potential(lattice, delta_v);
}

inline void check_state(const RibbonLattice& lattice, const MeanFieldState& state) {
  if (state.up.size() != lattice.size() || state.down.size() != lattice.size())
    throw std::invalid_argument("density vector length " + std::to_string(state.up.size()) +
                                " does not match lattice size " + std::to_string(lattice.size()));
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (!(state.up[i] >= 0.0 && state.up[i] <= 1.0) || !(state.down[i] >= 0.0 && state.down[i] <= 1.0))
      throw std::invalid_argument("site occupation out of [0,1] at site " + std::to_string(i));
  }
}

/// One-body Hamiltonian seen by electrons of the given spin:
///   H_ij = -t on bonds,
///   H_ii = E_i + U <n_{i,-s}> + V sum_{j in nn(i)} (<n_j> - 1) + phi_i.
/// The intersite term is measured from the neutral background (one electron
/// per site), so edge atoms with fewer neighbours feel no extra attraction.
inline Eigen::MatrixXd build_mf_hamiltonian(const RibbonLattice& lattice, const ModelParams& params,
                                            const MeanFieldState& densities, const AppliedField& field,
                                            Spin spin) {
  check_state(lattice, densities);
  if (field.potential.size() != lattice.size())
    throw std::invalid_argument("field profile does not match lattice size");

  const std::size_t n = lattice.size();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (const auto& b : lattice.bonds()) {
    const auto i = static_cast<Eigen::Index>(b.i);
    const auto j = static_cast<Eigen::Index>(b.j);
    h(i, j) -= params.t;
    h(j, i) -= params.t;
  }
  const auto& other = densities.of(spin == Spin::Up ? Spin::Down : Spin::Up);
  for (std::size_t i = 0; i < n; ++i) {
    double hartree_v = 0.0;
    for (auto j : lattice.neighbors(i)) hartree_v += densities.charge(j) - 1.0;
    const auto k = static_cast<Eigen::Index>(i);
    h(k, k) = lattice.site(i).species.site_energy + params.U * other[i] + params.V * hartree_v +
              field.potential[i];
  }
  return h;
}

/// Energy that the band sum counts twice: U sum n_up n_dn + V sum_<ij> (n_i n_j - 1).
/// With the band sum this gives the Hartree value of
/// U sum n_up n_dn + V sum_<ij> (n_i - 1)(n_j - 1).
inline double double_counting(const RibbonLattice& lattice, const ModelParams& params,
                              const MeanFieldState& densities) {
  double onsite = 0.0;
  for (std::size_t i = 0; i < densities.size(); ++i) onsite += densities.up[i] * densities.down[i];
  double intersite = 0.0;
  for (const auto& b : lattice.bonds()) intersite += densities.charge(b.i) * densities.charge(b.j) - 1.0;
  return params.U * onsite + params.V * intersite;
}

/// Mean-field total energy from the band sum of the Hamiltonians built from
/// `densities`. `band_energy` is the occupation-weighted sum over both spins.
inline double total_energy(const ModelParams& params, const RibbonLattice& lattice,
                           const MeanFieldState& densities, double band_energy) {
  return band_energy - double_counting(lattice, params, densities);
}

/// Same, from the occupied orbital energies of each spin (integer filling).
inline double total_energy(const ModelParams& params, const RibbonLattice& lattice,
                           const MeanFieldState& densities, std::span<const double> occupied_up,
                           std::span<const double> occupied_down) {
  double band = 0.0;
  for (double e : occupied_up) band += e;
  for (double e : occupied_down) band += e;
  return total_energy(params, lattice, densities, band);
}

}  // namespace nanocap
