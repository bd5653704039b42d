// First-order perturbation theory for the noninteracting ribbon.
//
// For one spin, with orbitals psi_k, energies e_k and occupations f_k,
// a potential phi changes the density by
//   dn_i = sum_{k != l} (f_k - f_l) psi_k(i) psi_l(i) <k|phi|l> / (e_k - e_l).
// When the Fermi level is degenerate the group is first rotated to the
// eigenbasis of phi projected on it and re-occupied (degenerate
// perturbation theory); the reoccupation is a zeroth-order change, so the
// resulting capacitance then depends on the size of the voltage step.

#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "nanocap/eigensolver.hpp"
#include "nanocap/lattice.hpp"
#include "nanocap/model.hpp"
#include "nanocap/scf.hpp"

namespace nanocap::oracles {

struct LinearResponse {
  double capacitance = 0.0;     // e^2/t
  std::vector<double> delta_n;  // per site, both spins
  bool degenerate_fermi_level = false;
};

/// Tight-binding Hamiltonian with species site energies only.
inline Eigen::MatrixXd tight_binding_hamiltonian(const RibbonLattice& lattice, double t = 1.0) {
  const auto n = static_cast<Eigen::Index>(lattice.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (const auto& b : lattice.bonds()) {
    h(static_cast<Eigen::Index>(b.i), static_cast<Eigen::Index>(b.j)) -= t;
    h(static_cast<Eigen::Index>(b.j), static_cast<Eigen::Index>(b.i)) -= t;
  }
  for (std::size_t i = 0; i < lattice.size(); ++i)
    h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += lattice.site(i).species.site_energy;
  return h;
}

/// Capacitance |sum_{bottom} dn| / dV of the U = V = 0 ribbon to first order
/// in the applied field. Throws if the model is interacting.
inline LinearResponse lr_capacitance(const RibbonLattice& lattice, const ModelParams& params,
                                     const AppliedField& field, double degeneracy_tol = 1e-9) {
  if (params.interacting()) throw std::invalid_argument("linear-response oracle is valid only at U = V = 0");
  if (field.potential.size() != lattice.size()) throw std::invalid_argument("field profile does not match lattice");

  const std::size_t n = lattice.size();
  LinearResponse out;
  out.delta_n.assign(n, 0.0);
  if (field.delta_v == 0.0) return out;

  auto eig = eigh(tight_binding_hamiltonian(lattice, params.t));
  Eigen::VectorXd energies = eig.values;
  Eigen::MatrixXd psi = std::move(eig.vectors);
  bool fractional = false;
  std::vector<double> f = fermi_occupations(energies, n / 2, degeneracy_tol, &fractional);
  out.degenerate_fermi_level = fractional;

  const Eigen::Map<const Eigen::VectorXd> phi(field.potential.data(), static_cast<Eigen::Index>(n));
  Eigen::VectorXd dn = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));

  // Partially filled group, if any.
  std::size_t lo = n, hi = 0;
  for (std::size_t k = 0; k < n; ++k)
    if (f[k] > 0.0 && f[k] < 1.0) {
      lo = std::min(lo, k);
      hi = std::max(hi, k);
    }
  const bool has_group = lo <= hi;
  if (has_group) {
    const auto g0 = static_cast<Eigen::Index>(lo);
    const auto gn = static_cast<Eigen::Index>(hi - lo + 1);
    const Eigen::MatrixXd block = psi.middleCols(g0, gn);
    const Eigen::MatrixXd projected = block.transpose() * phi.asDiagonal() * block;
    auto rot = eigh(projected);
    double electrons = 0.0;
    for (std::size_t k = lo; k <= hi; ++k) electrons += f[k];
    const auto fg = fermi_occupations(rot.values, static_cast<std::size_t>(std::lround(electrons)), degeneracy_tol);
    const Eigen::MatrixXd rotated = block * rot.vectors;
    for (Eigen::Index c = 0; c < gn; ++c) {
      const double before = f[lo + static_cast<std::size_t>(c)];
      dn += fg[static_cast<std::size_t>(c)] * rotated.col(c).array().square().matrix() -
            before * block.col(c).array().square().matrix();
      f[lo + static_cast<std::size_t>(c)] = fg[static_cast<std::size_t>(c)];
    }
    psi.middleCols(g0, gn) = rotated;
  }

  // Coupling matrix <k|phi|l> and the first-order weights.
  const Eigen::MatrixXd coupling = psi.transpose() * phi.asDiagonal() * psi;
  Eigen::MatrixXd weight = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  auto in_group = [&](std::size_t k) { return has_group && k >= lo && k <= hi; };
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = 0; l < n; ++l) {
      if (k == l || f[k] == f[l]) continue;
      if (in_group(k) && in_group(l)) continue;
      const double de = energies[static_cast<Eigen::Index>(k)] - energies[static_cast<Eigen::Index>(l)];
      if (std::abs(de) <= degeneracy_tol) continue;
      weight(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) =
          (f[k] - f[l]) * coupling(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) / de;
    }
  }
  dn += (psi.array() * (psi * weight.transpose()).array()).rowwise().sum().matrix();

  double q = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.delta_n[i] = 2.0 * dn[static_cast<Eigen::Index>(i)];
  }
  for (auto i : lattice.electrode_bottom()) q -= out.delta_n[i];
  out.capacitance = std::abs(q) / std::abs(field.delta_v);
  return out;
}

}  // namespace nanocap::oracles
