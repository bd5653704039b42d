// Exact ground-state energy of the extended Hubbard model on small clusters.
//
//   H = -t sum_<ij>,s (c+_is c_js + h.c.) + U sum_i n_iu n_id
//       + V sum_<ij> (n_i - 1)(n_j - 1) + sum_i (E_i + phi_i) n_i
//
// in the half-filled S_z = 0 sector. Basis states are pairs of bit strings
// (up, down); all up operators are ordered before all down operators, so a
// hop picks up the parity of the occupied orbitals of its own spin between
// the two sites.

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>

#include "nanocap/lattice.hpp"
#include "nanocap/model.hpp"

namespace nanocap::oracles {

inline constexpr std::size_t kEdMaxSites = 10;

namespace detail {

inline std::vector<std::uint32_t> fixed_weight_strings(int n_orbitals, int n_particles) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t s = 0; s < (1u << n_orbitals); ++s)
    if (std::popcount(s) == n_particles) out.push_back(s);
  return out;
}

/// Fermion sign of c+_to c_from acting on `bits` (from occupied, to empty).
inline double hop_sign(std::uint32_t bits, int from, int to) {
  const int lo = std::min(from, to);
  const int hi = std::max(from, to);
  const std::uint32_t between = bits & (((1u << hi) - 1u) & ~((1u << (lo + 1)) - 1u));
  return (std::popcount(between) % 2 == 0) ? 1.0 : -1.0;
}

}  // namespace detail

/// Many-body Hamiltonian in the (N/2, N/2) sector, row-major sparse.
inline Eigen::SparseMatrix<double, Eigen::RowMajor> ed_hamiltonian(const RibbonLattice& lattice,
                                                                   const ModelParams& params,
                                                                   const AppliedField& field) {
  const std::size_t n = lattice.size();
  if (n > kEdMaxSites)
    throw std::invalid_argument("exact diagonalization is limited to " + std::to_string(kEdMaxSites) +
                                " sites (got " + std::to_string(n) + ")");
  if (n % 2 != 0) throw std::invalid_argument("half filling needs an even number of sites");
  if (field.potential.size() != n) throw std::invalid_argument("field profile does not match lattice");

  const int orbitals = static_cast<int>(n);
  const auto strings = detail::fixed_weight_strings(orbitals, orbitals / 2);
  const auto dim1 = strings.size();
  std::vector<std::int64_t> lookup(std::size_t{1} << n, -1);
  for (std::size_t k = 0; k < dim1; ++k) lookup[strings[k]] = static_cast<std::int64_t>(k);

  std::vector<double> onsite(n);
  for (std::size_t i = 0; i < n; ++i) onsite[i] = lattice.site(i).species.site_energy + field.potential[i];

  using Triplet = Eigen::Triplet<double>;
  std::vector<Triplet> entries;
  const auto dim = dim1 * dim1;
  entries.reserve(dim * (1 + 2 * lattice.bonds().size()));

  for (std::size_t a = 0; a < dim1; ++a) {
    const auto up = strings[a];
    for (std::size_t b = 0; b < dim1; ++b) {
      const auto dn = strings[b];
      const auto row = static_cast<Eigen::Index>(a * dim1 + b);
      auto occ = [&](std::size_t i) {
        return static_cast<double>((up >> i) & 1u) + static_cast<double>((dn >> i) & 1u);
      };

      double diag = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        diag += onsite[i] * occ(i);
        diag += params.U * static_cast<double>(((up >> i) & 1u) & ((dn >> i) & 1u));
      }
      for (const auto& bond : lattice.bonds()) diag += params.V * (occ(bond.i) - 1.0) * (occ(bond.j) - 1.0);
      entries.emplace_back(row, row, diag);

      for (const auto& bond : lattice.bonds()) {
        const int i = static_cast<int>(bond.i);
        const int j = static_cast<int>(bond.j);
        for (auto [from, to] : {std::pair{i, j}, std::pair{j, i}}) {
          if (((up >> from) & 1u) && !((up >> to) & 1u)) {
            const auto next = up ^ (1u << from) ^ (1u << to);
            const auto col = static_cast<Eigen::Index>(static_cast<std::size_t>(lookup[next]) * dim1 + b);
            entries.emplace_back(row, col, -params.t * detail::hop_sign(up, from, to));
          }
          if (((dn >> from) & 1u) && !((dn >> to) & 1u)) {
            const auto next = dn ^ (1u << from) ^ (1u << to);
            const auto col = static_cast<Eigen::Index>(a * dim1 + static_cast<std::size_t>(lookup[next]));
            entries.emplace_back(row, col, -params.t * detail::hop_sign(dn, from, to));
          }
        }
      }
    }
  }
  Eigen::SparseMatrix<double, Eigen::RowMajor> h(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  h.setFromTriplets(entries.begin(), entries.end());
  return h;
}

struct LanczosResult {
  double eigenvalue = 0.0;
  double residual = 0.0;  // ||H v - e v|| of the Ritz vector
  int steps = 0;
};

/// Lowest eigenvalue by Lanczos with full reorthogonalization.
inline LanczosResult lanczos_lowest(const Eigen::SparseMatrix<double, Eigen::RowMajor>& h, double tol = 1e-11,
                                    int max_steps = 300) {
  const Eigen::Index dim = h.rows();
  if (dim == 0) throw std::invalid_argument("empty Hamiltonian");
  if (dim <= 400) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> dense{Eigen::MatrixXd(h)};
    return {dense.eigenvalues()[0], 0.0, 0};
  }

  std::mt19937_64 rng(20240917);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = dist(rng);
  v.normalize();

  const int steps_cap = static_cast<int>(std::min<Eigen::Index>(max_steps, dim));
  Eigen::MatrixXd basis(dim, steps_cap);
  std::vector<double> alpha, beta;
  LanczosResult out;
  for (int k = 0; k < steps_cap; ++k) {
    basis.col(k) = v;
    Eigen::VectorXd w = h * v;
    const double a = v.dot(w);
    alpha.push_back(a);
    w -= basis.leftCols(k + 1) * (basis.leftCols(k + 1).transpose() * w);
    w -= basis.leftCols(k + 1) * (basis.leftCols(k + 1).transpose() * w);
    const double b = w.norm();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), k + 1);
    Eigen::VectorXd sub = beta.empty() ? Eigen::VectorXd() : Eigen::Map<Eigen::VectorXd>(beta.data(), k);
    tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    out.eigenvalue = tri.eigenvalues()[0];
    out.residual = std::abs(b * tri.eigenvectors()(k, 0));
    out.steps = k + 1;
    if (out.residual < tol || b < 1e-14) break;
    beta.push_back(b);
    v = w / b;
  }
  return out;
}

/// Exact ground-state energy in the half-filled S_z = 0 sector.
inline double ed_ground_energy(const RibbonLattice& lattice, const ModelParams& params, const AppliedField& field) {
  return lanczos_lowest(ed_hamiltonian(lattice, params, field)).eigenvalue;
}

inline double ed_ground_energy(const RibbonLattice& lattice, const ModelParams& params) {
  return ed_ground_energy(lattice, params, zero_field(lattice));
}

}  // namespace nanocap::oracles
