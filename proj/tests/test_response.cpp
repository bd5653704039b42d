#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "nanocap/response.hpp"
#include "nanocap/units.hpp"

using namespace nanocap;

namespace {

ModelParams params(double u, double v) {
  ModelParams p;
  p.U = u;
  p.V = v;
  return p;
}

CapacitanceControls step(double dv) {
  CapacitanceControls c;
  c.delta_v = dv;
  return c;
}

}  // namespace

TEST(Units, SiConversion) {
  EXPECT_NEAR(units::natural_to_attofarad(1.0, 2.7), 0.0593, 5e-5);
  for (double t : {1.0, 2.7, 3.1})
    EXPECT_NEAR(units::natural_to_attofarad(1.0, t), 0.1602176634 / t, 1e-15);
}

TEST(ElectrodeCharge, NeutralCarbon) {
  const auto lat = build_ribbon(Material::C, 5, 12);
  const auto sol = ground_state(lat, ModelParams{}, zero_field(lat));
  EXPECT_NEAR(electrode_charge(sol, lat.electrode_bottom()), 0.0, 1e-12);
  EXPECT_NEAR(electrode_charge(sol, lat.electrode_top()), 0.0, 1e-12);
}

TEST(ElectrodeCharge, SpinPolarizedCarbon) {
  const auto lat = build_ribbon(Material::C, 6, 20);
  const auto sol = ground_state(lat, params(1.0, 0.0), zero_field(lat));
  ASSERT_EQ(phase_label(sol), "SP");
  EXPECT_NEAR(electrode_charge(sol, lat.electrode_bottom()), 0.0, 1e-6);
  EXPECT_NEAR(electrode_charge(sol, lat.electrode_top()), 0.0, 1e-6);
}

TEST(ElectrodeCharge, BoronNitrideTransfer) {
  const auto lat = build_ribbon(Material::BN, 4, 8);
  const auto sol = ground_state(lat, ModelParams{}, zero_field(lat));
  const double qb = electrode_charge(sol, lat.electrode_bottom());
  const double qt = electrode_charge(sol, lat.electrode_top());
  EXPECT_GT(std::abs(qb), 1e-3);
  EXPECT_NEAR(qb, -qt, 1e-8);
}

TEST(Capacitance, RejectsZeroStep) {
  const auto lat = build_ribbon(Material::C, 3, 8);
  EXPECT_THROW(capacitance_fd(lat, ModelParams{}, step(0.0)), std::invalid_argument);
}

TEST(Capacitance, RecordFields) {
  const auto lat = build_ribbon(Material::BN, 5, 12);
  const auto rec = capacitance_fd(lat, ModelParams{}, step(0.01));
  EXPECT_GT(rec.c_natural, 0.0);
  EXPECT_NEAR(rec.c_si, rec.c_natural * 0.1602176634 / 2.7, 1e-15);
  EXPECT_NEAR(rec.width_angstrom, ribbon_width(lat), 1e-12);
  EXPECT_FALSE(rec.phase_switched);
  EXPECT_EQ(rec.phase, "CP");  // intrinsic B/N polarization
  EXPECT_LT(rec.linearity_dev, 0.01);
  EXPECT_FALSE(rec.linearity_warning);
  EXPECT_GT(rec.c_polarizability, 0.0);
  // Under a positive step the bottom edge loses electrons.
  EXPECT_GT(rec.q_bottom_v, rec.q_bottom_0);
}

TEST(Capacitance, MirrorAntisymmetryOfCarbon) {
  for (auto [u, v] : {std::pair{0.0, 0.0}, std::pair{1.0, 0.0}}) {
    const auto lat = build_ribbon(Material::C, 6, 20);
    const auto rec = capacitance_fd(lat, params(u, v), step(0.01));
    EXPECT_NEAR(rec.q_top_v, -rec.q_bottom_v, 1e-8);
    EXPECT_NEAR(rec.q_top_0, -rec.q_bottom_0, 1e-8);
  }
}

TEST(Capacitance, NoninteractingCarbonIsOddInField) {
  const auto lat = build_ribbon(Material::C, 5, 18);
  CapacitanceControls c = step(0.01);
  const auto ref = ground_state(lat, ModelParams{}, zero_field(lat));
  const auto plus = field_response(lat, ModelParams{}, ref, +0.01, c);
  const auto minus = field_response(lat, ModelParams{}, ref, -0.01, c);
  const double q0 = electrode_charge(ref, lat.electrode_bottom());
  EXPECT_NEAR(std::abs(plus.q_bottom - q0), std::abs(minus.q_bottom - q0), 1e-12);
}

TEST(Linearity, GappedBoronNitride) {
  const auto lat = build_ribbon(Material::BN, 6, 12);
  EXPECT_LT(check_linearity(lat, ModelParams{}, 0.01), 0.01);
  CapacitanceControls tight;
  tight.scf.tol = 1e-13;
  EXPECT_LT(check_linearity(lat, ModelParams{}, 1e-4, tight), 1e-3);
}

TEST(Linearity, HugeStepOnSmallGapWarns) {
  const auto lat = build_ribbon(Material::C, 8, 20);
  const auto rec = capacitance_fd(lat, ModelParams{}, step(1.0));
  EXPECT_GT(rec.linearity_dev, kLinearityWarnThreshold);
  EXPECT_TRUE(rec.linearity_warning);
}

TEST(Capacitance, StepProfileAlsoWorks) {
  const auto lat = build_ribbon(Material::BN, 4, 8);
  CapacitanceControls c = step(0.01);
  c.profile = FieldProfile::Step;
  const auto rec = capacitance_fd(lat, ModelParams{}, c);
  EXPECT_GT(rec.c_natural, 0.0);
}

TEST(Capacitance, FreshSeedsUnderFieldAgreeForCp) {
  const auto lat = build_ribbon(Material::C, 5, 20);
  CapacitanceControls c = step(0.01);
  const auto a = capacitance_fd(lat, params(0.0, 0.5), c);
  c.fresh_seeds_with_field = true;
  const auto b = capacitance_fd(lat, params(0.0, 0.5), c);
  EXPECT_NEAR(a.c_natural, b.c_natural, 1e-6 * a.c_natural);
  EXPECT_EQ(a.phase, "CP");
  EXPECT_FALSE(a.phase_switched);
}
