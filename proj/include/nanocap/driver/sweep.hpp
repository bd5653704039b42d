// Width sweeps of the ribbon capacitance and their CSV form.

#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "nanocap/lattice.hpp"
#include "nanocap/model.hpp"
#include "nanocap/oracles/linear_response.hpp"
#include "nanocap/response.hpp"
#include "nanocap/scf.hpp"

namespace nanocap::driver {

inline constexpr std::string_view kCsvColumns =
    "material,L,N,width_angstrom,U_over_t,V_over_t,seed_won,staggered_m,dipole_eA,gap_t,q_edge0_e,"
    "C_e2_per_t,C_aF,invC_t_per_e2,linearity_dev,iterations,converged";

inline constexpr double kVerifyTolerance = 0.01;

struct SweepConfig {
  Material material = Material::C;
  int length = 20;
  std::vector<int> n_rows;
  ModelParams params;
  CapacitanceControls capacitance;
  std::string out_path;  // empty: no file
  bool verify = false;
  unsigned threads = 0;  // 0: NANOCAP_THREADS, then hardware concurrency

  void validate() const {
    if (n_rows.empty()) throw std::invalid_argument("width list is empty");
    if (!std::is_sorted(n_rows.begin(), n_rows.end()) ||
        std::adjacent_find(n_rows.begin(), n_rows.end()) != n_rows.end())
      throw std::invalid_argument("width list must be strictly ascending");
    if (n_rows.front() < 2) throw std::invalid_argument("ribbons need at least 2 rows");
    if (length < 4 || length % 2 != 0) throw std::invalid_argument("ribbon length must be even and >= 4");
    if (!(capacitance.delta_v > 0.0)) throw std::invalid_argument("voltage step must be positive");
    params.validate();
    capacitance.scf.validate();
  }
};

struct SweepRow {
  std::string material;
  int L = 0;
  int N = 0;
  double width_angstrom = 0.0;
  double u = 0.0;
  double v = 0.0;
  std::string seed_won;
  double staggered_m = 0.0;
  double dipole = 0.0;
  double gap = 0.0;
  double q_edge_0 = 0.0;
  double c_natural = 0.0;
  double c_si = 0.0;
  double inv_c_natural = 0.0;
  double linearity_dev = 0.0;
  int iterations = 0;
  bool converged = false;

  bool operator==(const SweepRow&) const = default;
};

/// Rounds to the 12 significant digits written to the CSV, so a record
/// survives a write/read cycle unchanged.
inline double round12(double x) {
  if (!std::isfinite(x)) return x;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline SweepRow make_row(const SweepConfig& cfg, int n, const CapacitanceRecord& rec) {
  SweepRow r;
  r.material = std::string(to_string(cfg.material));
  r.L = cfg.length;
  r.N = n;
  r.width_angstrom = round12(rec.width_angstrom);
  r.u = round12(cfg.params.U);
  r.v = round12(cfg.params.V);
  r.seed_won = std::string(to_string(rec.reference.seed_kind));
  r.staggered_m = round12(rec.reference.staggered_m);
  r.dipole = round12(rec.reference.dipole);
  r.gap = round12(rec.reference.homo_lumo_gap);
  r.q_edge_0 = round12(rec.q_bottom_0);
  r.c_natural = round12(rec.c_natural);
  r.c_si = round12(rec.c_si);
  r.inv_c_natural = rec.c_natural > 0.0 ? round12(1.0 / rec.c_natural) : std::numeric_limits<double>::infinity();
  r.linearity_dev = round12(rec.linearity_dev);
  r.iterations = rec.reference.iterations;
  r.converged = rec.reference.converged && rec.field_on.converged;
  return r;
}

inline SweepRow failed_row(const SweepConfig& cfg, int n, const RibbonLattice* lattice) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  SweepRow r;
  r.material = std::string(to_string(cfg.material));
  r.L = cfg.length;
  r.N = n;
  r.width_angstrom = lattice ? round12(ribbon_width(*lattice)) : nan;
  r.u = round12(cfg.params.U);
  r.v = round12(cfg.params.V);
  r.seed_won = "none";
  r.staggered_m = r.dipole = r.gap = r.q_edge_0 = r.c_natural = r.c_si = r.inv_c_natural = r.linearity_dev = nan;
  r.iterations = 0;
  r.converged = false;
  return r;
}

struct RowVerification {
  int N = 0;
  double c_fd = 0.0;
  double c_lr = 0.0;
  double relative_error = 0.0;
  bool passed = false;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<RowVerification> verification;
  std::vector<std::string> errors;  // one message per failed row

  [[nodiscard]] bool all_converged() const {
    return std::all_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.converged; });
  }
  [[nodiscard]] bool verification_passed() const {
    return std::all_of(verification.begin(), verification.end(), [](const RowVerification& v) { return v.passed; });
  }
};

inline unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("NANOCAP_THREADS")) {
    unsigned v = 0;
    const std::string_view s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc{} && ptr == s.data() + s.size() && v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs every width independently on a pool of workers; rows come back in
/// ascending N regardless of completion order.
inline SweepResult run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const std::size_t count = cfg.n_rows.size();
  std::vector<std::optional<SweepRow>> rows(count);
  std::vector<std::optional<RowVerification>> checks(count);
  std::vector<std::string> errors(count);

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < count; k = next++) {
      const int n = cfg.n_rows[k];
      std::optional<RibbonLattice> lattice;
      try {
        lattice.emplace(build_ribbon(cfg.material, n, cfg.length));
        const auto rec = capacitance_fd(*lattice, cfg.params, cfg.capacitance);
        rows[k] = make_row(cfg, n, rec);
        if (cfg.verify && !cfg.params.interacting()) {
          const auto field = make_field(*lattice, cfg.capacitance.delta_v, cfg.capacitance.profile);
          const auto lr = oracles::lr_capacitance(*lattice, cfg.params, field, cfg.capacitance.scf.degeneracy_tol);
          RowVerification v;
          v.N = n;
          v.c_fd = rec.c_natural;
          v.c_lr = lr.capacitance;
          v.relative_error = lr.capacitance > 0.0 ? std::abs(rec.c_natural - lr.capacitance) / lr.capacitance
                                                  : std::abs(rec.c_natural);
          v.passed = v.relative_error <= kVerifyTolerance;
          checks[k] = v;
        }
      } catch (const std::exception& e) {
        rows[k] = failed_row(cfg, n, lattice ? &*lattice : nullptr);
        errors[k] = "N=" + std::to_string(n) + ": " + e.what();
      }
    }
  };

  const unsigned workers = std::min<unsigned>(resolve_threads(cfg.threads), static_cast<unsigned>(count));
  std::vector<std::jthread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  pool.clear();

  SweepResult out;
  for (std::size_t k = 0; k < count; ++k) {
    out.rows.push_back(std::move(*rows[k]));
    if (checks[k]) out.verification.push_back(*checks[k]);
    if (!errors[k].empty()) out.errors.push_back(std::move(errors[k]));
  }
  return out;
}

inline void write_metadata(std::ostream& os, const SweepConfig& cfg) {
  const auto& s = cfg.capacitance.scf;
  os << "# nanocap capacitance sweep\n";
  os << "# mean_field: " << kMeanFieldScheme << "\n";
  os << "# material: " << to_string(cfg.material) << "\n";
  os << "# L: " << cfg.length << "\n";
  os << "# U_over_t: " << format_number(cfg.params.U) << "\n";
  os << "# V_over_t: " << format_number(cfg.params.V) << "\n";
  os << "# t_ev: " << format_number(cfg.params.t_ev) << "\n";
  os << "# delta_v_t_over_e: " << format_number(cfg.capacitance.delta_v) << "\n";
  os << "# field_profile: " << (cfg.capacitance.profile == FieldProfile::Ramp ? "ramp" : "step") << "\n";
  os << "# electrodes: full outermost rows\n";
  os << "# seeds: PARA,SP,CP at zero field (amplitude " << format_number(s.seed_amplitude)
     << "); every converged branch continued into the field"
     << (cfg.capacitance.fresh_seeds_with_field ? "; fresh seeds under field" : "") << "\n";
  os << "# scf_tol: " << format_number(s.tol) << "\n";
  os << "# scf_max_iter: " << s.max_iter << "\n";
  os << "# scf_mixing: linear " << format_number(s.mixing) << "\n";
  os << "# scf_stall_window: " << s.stall_window << "\n";
  os << "# degeneracy_tol: " << format_number(s.degeneracy_tol) << "\n";
  os << "# units: C in e^2/t and aF; width in Angstrom; dipole in e*Angstrom\n";
}

inline void write_row(std::ostream& os, const SweepRow& r) {
  os << r.material << ',' << r.L << ',' << r.N << ',' << format_number(r.width_angstrom) << ','
     << format_number(r.u) << ',' << format_number(r.v) << ',' << r.seed_won << ',' << format_number(r.staggered_m)
     << ',' << format_number(r.dipole) << ',' << format_number(r.gap) << ',' << format_number(r.q_edge_0) << ','
     << format_number(r.c_natural) << ',' << format_number(r.c_si) << ',' << format_number(r.inv_c_natural) << ','
     << format_number(r.linearity_dev) << ',' << r.iterations << ',' << (r.converged ? "true" : "false") << '\n';
}

inline void write_csv(std::ostream& os, const SweepConfig& cfg, const std::vector<SweepRow>& rows) {
  write_metadata(os, cfg);
  os << kCsvColumns << '\n';
  for (const auto& r : rows) write_row(os, r);
}

inline std::string csv_string(const SweepConfig& cfg, const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  write_csv(os, cfg, rows);
  return os.str();
}

namespace detail {

inline double parse_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad number '" + s + "'");
  return v;
}

inline int parse_int(const std::string& s) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw std::invalid_argument("bad integer '" + s + "'");
  return v;
}

}  // namespace detail

inline SweepRow parse_row(const std::string& line) {
  std::vector<std::string> f;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
  if (f.size() != 17) throw std::invalid_argument("expected 17 columns, got " + std::to_string(f.size()));
  SweepRow r;
  r.material = f[0];
  r.L = detail::parse_int(f[1]);
  r.N = detail::parse_int(f[2]);
  r.width_angstrom = detail::parse_double(f[3]);
  r.u = detail::parse_double(f[4]);
  r.v = detail::parse_double(f[5]);
  r.seed_won = f[6];
  r.staggered_m = detail::parse_double(f[7]);
  r.dipole = detail::parse_double(f[8]);
  r.gap = detail::parse_double(f[9]);
  r.q_edge_0 = detail::parse_double(f[10]);
  r.c_natural = detail::parse_double(f[11]);
  r.c_si = detail::parse_double(f[12]);
  r.inv_c_natural = detail::parse_double(f[13]);
  r.linearity_dev = detail::parse_double(f[14]);
  r.iterations = detail::parse_int(f[15]);
  if (f[16] != "true" && f[16] != "false") throw std::invalid_argument("bad converged flag '" + f[16] + "'");
  r.converged = f[16] == "true";
  return r;
}

/// Reads the data rows of a sweep CSV, skipping '#' lines and the header.
inline std::vector<SweepRow> read_csv(std::istream& is) {
  std::vector<SweepRow> rows;
  bool header_seen = false;
  for (std::string line; std::getline(is, line);) {
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != kCsvColumns) throw std::invalid_argument("unexpected CSV header");
      header_seen = true;
      continue;
    }
    rows.push_back(parse_row(line));
  }
  return rows;
}

/// Parses "N1..N2" or a single N.
inline std::vector<int> parse_widths(const std::string& range) {
  const auto dots = range.find("..");
  const int lo = detail::parse_int(range.substr(0, dots));
  const int hi = dots == std::string::npos ? lo : detail::parse_int(range.substr(dots + 2));
  if (hi < lo) throw std::invalid_argument("width range must be ascending");
  std::vector<int> out;
  for (int n = lo; n <= hi; ++n) out.push_back(n);
  return out;
}

inline void save_csv(const std::string& path, const SweepConfig& cfg, const std::vector<SweepRow>& rows) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_csv(os, cfg, rows);
  if (!os) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace nanocap::driver
