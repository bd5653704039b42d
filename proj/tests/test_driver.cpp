#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include <gtest/gtest.h>

#include "nanocap/driver/fit.hpp"
#include "nanocap/driver/phase_scan.hpp"
#include "nanocap/driver/sweep.hpp"

using namespace nanocap;
using namespace nanocap::driver;

namespace {

SweepConfig small_config(Material m, double u = 0.0, double v = 0.0) {
  SweepConfig c;
  c.material = m;
  c.length = 8;
  c.n_rows = {3, 4, 5, 6};
  c.params.U = u;
  c.params.V = v;
  c.threads = 2;
  return c;
}

}  // namespace

TEST(LinearFit, ExactLineAndNoise) {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> y{3, 5, 7, 9};
  const auto f = linear_fit(x, y);
  EXPECT_NEAR(f.slope, 2.0, 1e-14);
  EXPECT_NEAR(f.intercept, 1.0, 1e-14);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-14);
  const std::vector<double> z{1, 4, 2, 5};
  // Hand-computed: sxy = 5, sxx = 5, syy = 10 -> R^2 = 25 / 50.
  EXPECT_NEAR(linear_fit(x, z).r_squared, 0.5, 1e-14);
  EXPECT_THROW(linear_fit(std::vector<double>{1}, std::vector<double>{1}), std::invalid_argument);
  EXPECT_THROW(linear_fit(std::vector<double>{1, 1}, std::vector<double>{1, 2}), std::invalid_argument);
}

TEST(SweepConfig, Validation) {
  auto c = small_config(Material::C);
  EXPECT_NO_THROW(c.validate());
  c.n_rows = {};
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.n_rows = {5, 3};
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.n_rows = {3, 4};
  c.length = 9;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(ParseWidths, Ranges) {
  EXPECT_EQ(parse_widths("3..6"), (std::vector<int>{3, 4, 5, 6}));
  EXPECT_EQ(parse_widths("7"), (std::vector<int>{7}));
  EXPECT_THROW(parse_widths("6..3"), std::invalid_argument);
  EXPECT_THROW(parse_widths("a..3"), std::invalid_argument);
}

TEST(Sweep, RowsSortedAndConsistent) {
  const auto cfg = small_config(Material::BN);
  const auto res = run_sweep(cfg);
  ASSERT_EQ(res.rows.size(), 4u);
  for (std::size_t k = 0; k < res.rows.size(); ++k) {
    const auto& r = res.rows[k];
    EXPECT_EQ(r.N, cfg.n_rows[k]);
    EXPECT_EQ(r.material, "BN");
    EXPECT_TRUE(r.converged);
    EXPECT_GT(r.c_natural, 0.0);
    EXPECT_NEAR(r.inv_c_natural * r.c_natural, 1.0, 1e-11);
  }
  for (std::size_t k = 1; k < res.rows.size(); ++k) EXPECT_GT(res.rows[k].inv_c_natural, res.rows[k - 1].inv_c_natural);
}

TEST(Sweep, CsvRoundTrip) {
  const auto cfg = small_config(Material::BCN, 1.0, 0.0);
  const auto res = run_sweep(cfg);
  const auto text = csv_string(cfg, res.rows);
  std::istringstream is(text);
  const auto back = read_csv(is);
  ASSERT_EQ(back.size(), res.rows.size());
  for (std::size_t k = 0; k < back.size(); ++k) EXPECT_EQ(back[k], res.rows[k]) << "row " << k;
  std::ostringstream again;
  write_csv(again, cfg, back);
  EXPECT_EQ(again.str(), text);
}

TEST(Sweep, CsvHeaderAndMetadata) {
  const auto cfg = small_config(Material::C);
  const auto text = csv_string(cfg, {});
  EXPECT_NE(text.find(std::string(kCsvColumns) + "\n"), std::string::npos);
  EXPECT_NE(text.find(std::string("# mean_field: ") + kMeanFieldScheme), std::string::npos);
  for (const char* key : {"# scf_tol:", "# scf_mixing:", "# scf_max_iter:", "# t_ev:", "# seeds:", "# delta_v"})
    EXPECT_NE(text.find(key), std::string::npos) << key;
}

TEST(Sweep, FailedRowsAreRecorded) {
  auto cfg = small_config(Material::BCN, 1.0, 0.0);
  cfg.n_rows = {6};
  cfg.capacitance.scf.max_iter = 2;
  cfg.capacitance.scf.stall_window = 0;
  const auto res = run_sweep(cfg);
  ASSERT_EQ(res.rows.size(), 1u);
  EXPECT_FALSE(res.rows[0].converged);
  EXPECT_TRUE(std::isnan(res.rows[0].c_natural));
  EXPECT_EQ(res.errors.size(), 1u);
  std::istringstream is(csv_string(cfg, res.rows));
  const auto back = read_csv(is);
  EXPECT_FALSE(back[0].converged);
  EXPECT_TRUE(std::isnan(back[0].c_natural));
}

TEST(Sweep, DeterministicAcrossThreadCounts) {
  auto cfg = small_config(Material::C, 0.0, 0.5);
  cfg.threads = 1;
  const auto one = csv_string(cfg, run_sweep(cfg).rows);
  cfg.threads = 3;
  const auto three = csv_string(cfg, run_sweep(cfg).rows);
  EXPECT_EQ(one, three);
}

TEST(Sweep, VerifyAgainstLinearResponse) {
  auto cfg = small_config(Material::BN);
  cfg.verify = true;
  cfg.capacitance.delta_v = 0.001;
  const auto res = run_sweep(cfg);
  ASSERT_EQ(res.verification.size(), 4u);
  EXPECT_TRUE(res.verification_passed());
  for (const auto& v : res.verification) EXPECT_LT(v.relative_error, kVerifyTolerance);

  auto inter = small_config(Material::BN, 1.0);
  inter.verify = true;
  EXPECT_TRUE(run_sweep(inter).verification.empty());
}

TEST(Threads, EnvironmentOverride) {
  EXPECT_EQ(resolve_threads(5), 5u);
  ::setenv("NANOCAP_THREADS", "3", 1);
  EXPECT_EQ(resolve_threads(0), 3u);
  ::setenv("NANOCAP_THREADS", "junk", 1);
  EXPECT_GE(resolve_threads(0), 1u);
  ::unsetenv("NANOCAP_THREADS");
}

TEST(PhaseScan, InputChecks) {
  const auto lat = build_ribbon(Material::C, 2, 4);
  EXPECT_THROW(phase_scan(lat, 1.0, {}), std::invalid_argument);
  EXPECT_THROW(phase_scan(lat, 1.0, {0.5, 0.1}), std::invalid_argument);
  EXPECT_EQ(linspace_inclusive(0.0, 1.0, 0.05).size(), 21u);
}

TEST(PhaseScan, SpinOrderAtSmallV) {
  const auto lat = build_ribbon(Material::C, 6, 20);
  const auto scan = phase_scan(lat, 1.0, {0.0, 0.2});
  ASSERT_EQ(scan.points.size(), 2u);
  EXPECT_EQ(scan.points[0].phase, "SP");
  EXPECT_FALSE(scan.found);
  EXPECT_EQ(scan.summary(), "not found in range");
}

TEST(PhaseScan, ChargeOrderWithoutU) {
  const auto lat = build_ribbon(Material::C, 6, 20);
  const auto scan = phase_scan(lat, 0.0, {0.5, 0.75, 1.0});
  for (const auto& p : scan.points) EXPECT_EQ(p.phase, "CP");
  EXPECT_FALSE(scan.found);
}
