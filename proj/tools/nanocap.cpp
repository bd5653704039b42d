#include <cmath>
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nanocap/driver/phase_scan.hpp"
#include "nanocap/driver/sweep.hpp"
#include "nanocap/lattice.hpp"
#include "nanocap/model.hpp"
#include "nanocap/oracles/exact_diag.hpp"
#include "nanocap/oracles/linear_response.hpp"
#include "nanocap/oracles/quantum_capacitance.hpp"
#include "nanocap/oracles/tube_gap.hpp"
#include "nanocap/scf.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 1, kVerifyFailed = 2, kScfFailed = 3 };

struct SweepArgs {
  std::string material = "c";
  int length = 20;
  std::string widths = "3..28";
  double u = 0.0;
  double v = 0.0;
  double delta_v = 0.01;
  double tol = 1e-8;
  int max_iter = 5000;
  double mixing = 0.3;
  double t_ev = 2.7;
  std::string out;
  bool verify = false;
  bool strict = false;
  bool fresh_seeds = false;
  unsigned threads = 0;
};

int run_sweep_command(const SweepArgs& a) {
  using namespace nanocap;
  driver::SweepConfig cfg;
  cfg.material = parse_material(a.material);
  cfg.length = a.length;
  cfg.n_rows = driver::parse_widths(a.widths);
  cfg.params.U = a.u;
  cfg.params.V = a.v;
  cfg.params.t_ev = a.t_ev;
  cfg.capacitance.delta_v = a.delta_v;
  cfg.capacitance.scf.tol = a.tol;
  cfg.capacitance.scf.max_iter = a.max_iter;
  cfg.capacitance.scf.mixing = a.mixing;
  cfg.capacitance.fresh_seeds_with_field = a.fresh_seeds;
  cfg.out_path = a.out;
  cfg.verify = a.verify;
  cfg.threads = a.threads;
  cfg.validate();

  const auto result = driver::run_sweep(cfg);
  if (cfg.out_path.empty()) {
    driver::write_csv(std::cout, cfg, result.rows);
  } else {
    driver::save_csv(cfg.out_path, cfg, result.rows);
    std::cerr << "wrote " << result.rows.size() << " rows to " << cfg.out_path << "\n";
  }
  for (const auto& e : result.errors) std::cerr << "scf failure: " << e << "\n";
  for (const auto& v : result.verification) {
    std::fprintf(stderr, "verify N=%d C_fd=%.10g C_lr=%.10g rel=%.3e %s\n", v.N, v.c_fd, v.c_lr, v.relative_error,
                 v.passed ? "ok" : "MISMATCH");
  }
  if (cfg.verify && cfg.params.interacting())
    std::cerr << "verify: interacting model, linear-response check skipped\n";
  if (!result.verification_passed()) return kVerifyFailed;
  if (a.strict && !result.all_converged()) return kScfFailed;
  return kOk;
}

int run_phase_scan(const std::string& material, int n_rows, int length, double u, double v_min, double v_max,
                   double v_step) {
  using namespace nanocap;
  const auto lat = build_ribbon(parse_material(material), n_rows, length);
  const auto scan = driver::phase_scan(lat, u, driver::linspace_inclusive(v_min, v_max, v_step));
  std::printf("V_over_t,phase,seed_won,energy_t,staggered_m,dipole_eA,max_charge_dev,converged\n");
  for (const auto& p : scan.points) {
    std::printf("%.12g,%s,%s,%.12g,%.12g,%.12g,%.12g,%s\n", p.v, p.phase.c_str(),
                std::string(to_string(p.seed_won)).c_str(), p.energy, p.staggered_m, p.dipole, p.max_charge_dev,
                p.converged ? "true" : "false");
  }
  std::printf("# %s\n", scan.summary().c_str());
  if (scan.found)
    std::printf("# m_s below %.6g, above %.6g; within-phase |dP| drift %.6g\n", scan.m_below, scan.m_above,
                scan.within_drift);
  return kOk;
}

int run_ed_check() {
  using namespace nanocap;
  bool ok = true;
  const auto lat = build_ribbon(Material::C, 2, 4);

  const auto levels = eigvalsh(oracles::tight_binding_hamiltonian(lat));
  double band = 0.0;
  for (std::size_t k = 0; k < lat.size() / 2; ++k) band += 2.0 * levels[static_cast<Eigen::Index>(k)];
  const double free = oracles::ed_ground_energy(lat, ModelParams{});
  const bool free_ok = std::abs(free - band) < 1e-9;
  ok = ok && free_ok;
  std::printf("free fermions: E_exact=%.12f  2*sum(occ)=%.12f  %s\n", free, band, free_ok ? "ok" : "FAIL");

  for (auto [u, v] : {std::pair{1.0, 0.0}, std::pair{0.0, 0.5}, std::pair{1.0, 0.5}}) {
    ModelParams p;
    p.U = u;
    p.V = v;
    const double exact = oracles::ed_ground_energy(lat, p);
    const auto mf = ground_state(lat, p, zero_field(lat));
    const double gap = mf.total_energy - exact;
    const bool bound = gap >= -1e-9;
    ok = ok && bound;
    std::printf("U=%.2f V=%.2f: E_exact=%.10f E_MF=%.10f (%s)  E_MF-E_exact=%.6f  bound %s, within 0.5t %s\n", u, v,
                exact, mf.total_energy, std::string(to_string(mf.seed_kind)).c_str(), gap, bound ? "ok" : "FAIL",
                gap < 0.5 ? "yes" : "no");
  }
  return ok ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Capacitance of graphene-type nanoribbons in the extended Hubbard model"};
  app.require_subcommand(1);

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "capacitance versus ribbon width, written as CSV");
  sweep->add_option("--material", sw.material, "c, bn or bcn")
      ->check(CLI::IsMember({"c", "bn", "bcn"}, CLI::ignore_case));
  sweep->add_option("--length", sw.length, "ribbon length L (even)");
  sweep->add_option("--widths", sw.widths, "row counts as N1..N2");
  sweep->add_option("--u", sw.u, "on-site U in units of t");
  sweep->add_option("--v", sw.v, "nearest-neighbour V in units of t");
  sweep->add_option("--delta-v", sw.delta_v, "voltage step in t/e");
  sweep->add_option("--tol", sw.tol, "SCF density tolerance");
  sweep->add_option("--max-iter", sw.max_iter, "SCF iteration cap");
  sweep->add_option("--mixing", sw.mixing, "linear mixing weight");
  sweep->add_option("--t-ev", sw.t_ev, "hopping t in eV for the aF column");
  sweep->add_option("--out", sw.out, "CSV path (default: stdout)");
  sweep->add_option("--threads", sw.threads, "worker count (default: NANOCAP_THREADS or all cores)");
  sweep->add_flag("--verify", sw.verify, "cross-check noninteracting rows against linear response");
  sweep->add_flag("--strict", sw.strict, "exit 3 if any row failed to converge");
  sweep->add_flag("--fresh-seeds", sw.fresh_seeds, "also restart all seeds under the field");

  std::string ps_material = "c";
  int ps_rows = 6, ps_length = 20;
  double ps_u = 1.0, ps_vmin = 0.0, ps_vmax = 1.0, ps_vstep = 0.05;
  auto* scan = app.add_subcommand("phase-scan", "ground state along V at fixed U");
  scan->add_option("--material", ps_material, "c, bn or bcn")
      ->check(CLI::IsMember({"c", "bn", "bcn"}, CLI::ignore_case));
  scan->add_option("--rows", ps_rows, "row count N");
  scan->add_option("--length", ps_length, "ribbon length L");
  scan->add_option("--u", ps_u, "on-site U in units of t");
  scan->add_option("--v-min", ps_vmin, "first V");
  scan->add_option("--v-max", ps_vmax, "last V");
  scan->add_option("--v-step", ps_vstep, "V spacing");

  int tube_m = 0;
  auto* tube = app.add_subcommand("tube-gap", "band gap of the (m,0) tube");
  tube->add_option("--m", tube_m, "tube index")->required();

  double vf = 0.0;
  auto* qcap = app.add_subcommand("quantum-cap", "quantum capacitance per length");
  qcap->add_option("--vf", vf, "Fermi velocity in m/s")->required();

  auto* ed = app.add_subcommand("ed-check", "exact-diagonalization checks on the 8-site cluster");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*sweep) return run_sweep_command(sw);
    if (*scan) return run_phase_scan(ps_material, ps_rows, ps_length, ps_u, ps_vmin, ps_vmax, ps_vstep);
    if (*tube) {
      const double gap = nanocap::oracles::tube_gap(tube_m);
      std::printf("m=%d gap=%.6e t %s\n", tube_m, gap, gap < 1e-6 ? "metallic" : "semiconducting");
      return kOk;
    }
    if (*qcap) {
      const double c = nanocap::oracles::quantum_capacitance(vf);
      std::printf("C_Q=%.4f aF/um (measured tube: %.0f aF/um, ratio %.3f)\n", c,
                  nanocap::oracles::kMeasuredTubeCapacitance, nanocap::oracles::kMeasuredTubeCapacitance / c);
      return kOk;
    }
    if (*ed) return run_ed_check();
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const nanocap::ScfError& e) {
    std::cerr << "scf failure: " << e.what() << "\n";
    return kScfFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
