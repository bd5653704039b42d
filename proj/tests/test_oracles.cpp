#include <cmath>
#include <stdexcept>
#include <tuple>

#include <gtest/gtest.h>

#include "nanocap/eigensolver.hpp"
#include "nanocap/oracles/exact_diag.hpp"
#include "nanocap/oracles/linear_response.hpp"
#include "nanocap/oracles/quantum_capacitance.hpp"
#include "nanocap/oracles/tube_gap.hpp"
#include "nanocap/response.hpp"

using namespace nanocap;
using namespace nanocap::oracles;

TEST(QuantumCapacitance, FermiVelocityOfGraphite) {
  const double c = quantum_capacitance(8e5);
  EXPECT_NEAR(c, 96.8, 0.1);
  EXPECT_NEAR(c, 100.0, 5.0);
  EXPECT_NEAR(quantum_capacitance(1.6e6), 0.5 * c, 1e-12);
  EXPECT_LT(kMeasuredTubeCapacitance / c, 2.0);
}

TEST(QuantumCapacitance, IndependentOfBoxLength) {
  const double c = quantum_capacitance(8e5);
  for (double l : {1e-8, 1e-6, 3e-3}) EXPECT_NEAR(estimate_quantum_capacitance(8e5, l).c_q_per_length, c, 1e-9 * c);
  EXPECT_THROW(quantum_capacitance(0.0), std::invalid_argument);
  EXPECT_THROW(quantum_capacitance(-1.0), std::invalid_argument);
  EXPECT_THROW(estimate_quantum_capacitance(8e5, 0.0), std::invalid_argument);
}

TEST(TubeGap, MetallicityRule) {
  for (int m = 3; m <= 24; ++m) {
    const double g = tube_gap(m);
    if (m % 3 == 0) EXPECT_LT(g, 1e-6) << "m=" << m;
    else EXPECT_GT(g, 0.05) << "m=" << m;
  }
  EXPECT_GT(tube_gap(10), 0.1);
  EXPECT_THROW(tube_gap(2), std::invalid_argument);
}

TEST(TubeGap, DispersionAnchors) {
  EXPECT_NEAR(graphene_band_energy(0.0, 0.0), 3.0, 1e-15);
  const double k = 2.0 * std::numbers::pi / 3.0;
  EXPECT_NEAR(graphene_band_energy(k, -k), 0.0, 1e-15);
}

TEST(LinearResponse, RejectsInteractions) {
  const auto lat = build_ribbon(Material::BN, 4, 8);
  ModelParams p;
  p.U = 1.0;
  EXPECT_THROW(lr_capacitance(lat, p, ramp_potential(lat, 0.01)), std::invalid_argument);
}

TEST(LinearResponse, ZeroFieldAndLinearity) {
  const auto lat = build_ribbon(Material::BN, 4, 8);
  const auto zero = lr_capacitance(lat, ModelParams{}, zero_field(lat));
  EXPECT_EQ(zero.capacitance, 0.0);
  for (double d : zero.delta_n) EXPECT_EQ(d, 0.0);

  const auto one = lr_capacitance(lat, ModelParams{}, ramp_potential(lat, 0.01));
  const auto two = lr_capacitance(lat, ModelParams{}, ramp_potential(lat, 0.02));
  EXPECT_FALSE(one.degenerate_fermi_level);
  for (std::size_t i = 0; i < lat.size(); ++i) EXPECT_NEAR(two.delta_n[i], 2.0 * one.delta_n[i], 1e-14);
  EXPECT_NEAR(one.capacitance, two.capacitance, 1e-12);
  double sum = 0.0;
  for (double d : one.delta_n) sum += d;
  EXPECT_NEAR(sum, 0.0, 1e-12);
}

TEST(LinearResponse, BoronNitrideMatchesFiniteDifference) {
  const auto lat = build_ribbon(Material::BN, 4, 8);
  CapacitanceControls c;
  c.delta_v = 0.001;
  const auto fd = capacitance_fd(lat, ModelParams{}, c);
  const auto lr = lr_capacitance(lat, ModelParams{}, ramp_potential(lat, 0.001));
  EXPECT_NEAR(fd.c_natural, lr.capacitance, 0.01 * lr.capacitance);
}

TEST(LinearResponse, ReportsDegenerateFermiLevel) {
  // L divisible by 4 puts exact zero modes at the Fermi level.
  const auto lat = build_ribbon(Material::C, 4, 8);
  EXPECT_TRUE(lr_capacitance(lat, ModelParams{}, ramp_potential(lat, 0.001)).degenerate_fermi_level);
  const auto gapped = build_ribbon(Material::C, 4, 10);
  EXPECT_FALSE(lr_capacitance(gapped, ModelParams{}, ramp_potential(gapped, 0.001)).degenerate_fermi_level);
}

class OracleEquivalence : public ::testing::TestWithParam<std::tuple<Material, int, int>> {};

TEST_P(OracleEquivalence, FiniteDifferenceLimit) {
  const auto [material, n, l] = GetParam();
  const auto lat = build_ribbon(material, n, l);
  CapacitanceControls c;
  c.delta_v = 0.001;
  const auto fd = capacitance_fd(lat, ModelParams{}, c);
  const auto lr = lr_capacitance(lat, ModelParams{}, ramp_potential(lat, 0.001));
  EXPECT_NEAR(fd.c_natural, lr.capacitance, 0.01 * lr.capacitance);
}

INSTANTIATE_TEST_SUITE_P(All, OracleEquivalence,
                         ::testing::Combine(::testing::Values(Material::C, Material::BN, Material::BCN),
                                            ::testing::Values(3, 4, 5, 6, 7, 8), ::testing::Values(8, 12)));

TEST(ExactDiag, SizeCapAndParity) {
  EXPECT_THROW(ed_ground_energy(build_ribbon(Material::C, 3, 4), ModelParams{}), std::invalid_argument);
  EXPECT_THROW(ed_ground_energy(build_ribbon(Material::C, 2, 6), ModelParams{}), std::invalid_argument);
}

TEST(ExactDiag, FreeFermions) {
  const auto lat = build_ribbon(Material::C, 2, 4);
  for (auto material : {Material::C, Material::BN, Material::BCN}) {
    const auto l = build_ribbon(material, 2, 4);
    const auto e = eigvalsh(tight_binding_hamiltonian(l));
    double band = 0.0;
    for (Eigen::Index k = 0; k < 4; ++k) band += 2.0 * e[k];
    EXPECT_NEAR(ed_ground_energy(l, ModelParams{}), band, 1e-9);
  }
  // With a field the free problem is still a band sum.
  const auto field = ramp_potential(lat, 0.3);
  Eigen::MatrixXd h = tight_binding_hamiltonian(lat);
  for (std::size_t i = 0; i < lat.size(); ++i) h(i, i) += field.potential[i];
  const auto e = eigvalsh(h);
  EXPECT_NEAR(ed_ground_energy(lat, ModelParams{}, field), 2.0 * (e[0] + e[1] + e[2] + e[3]), 1e-9);
}

TEST(ExactDiag, HamiltonianIsSymmetric) {
  const auto lat = build_ribbon(Material::C, 2, 4);
  ModelParams p;
  p.U = 2.0;
  p.V = 0.7;
  const auto h = ed_hamiltonian(lat, p, ramp_potential(lat, 0.1));
  EXPECT_EQ(h.rows(), 4900);
  const Eigen::SparseMatrix<double> ht = h.transpose();
  EXPECT_LT((Eigen::SparseMatrix<double>(h) - ht).norm(), 1e-14);
}

TEST(ExactDiag, VariationalBound) {
  const auto lat = build_ribbon(Material::C, 2, 4);
  for (auto [u, v] : {std::pair{1.0, 0.0}, std::pair{0.0, 0.5}, std::pair{1.0, 0.5}, std::pair{2.0, 0.2},
                      std::pair{0.5, 1.0}}) {
    ModelParams p;
    p.U = u;
    p.V = v;
    const double exact = ed_ground_energy(lat, p);
    const auto mf = ground_state(lat, p, zero_field(lat));
    EXPECT_GE(mf.total_energy, exact - 1e-9) << "U=" << u << " V=" << v;
  }
}

TEST(Lanczos, MatchesDenseDiagonalization) {
  const auto lat = build_ribbon(Material::BN, 2, 4);
  ModelParams p;
  p.U = 1.5;
  p.V = 0.3;
  const auto h = ed_hamiltonian(lat, p, ramp_potential(lat, 0.2));
  ASSERT_GT(h.rows(), 400);
  const auto lz = lanczos_lowest(h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(h), Eigen::EigenvaluesOnly);
  EXPECT_NEAR(lz.eigenvalue, es.eigenvalues()[0], 1e-9);
  EXPECT_LT(lz.residual, 1e-8);
}
