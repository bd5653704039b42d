// Band gap of the (m,0) zigzag tube from the graphene pi-band dispersion.
//
// With lattice vectors a1 (along the circumference) and a2, the phases
// phi1 = k.a1 and phi2 = k.a2 give |e(k)| = t |1 + exp(i phi1) + exp(i phi2)|.
// Rolling up m a1 quantizes phi1 = 2 pi j / m; the axial momentum sweeps
// phi2 over a full period.

#pragma once

#include <cmath>
#include <complex>
#include <algorithm>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/math/tools/minima.hpp>

namespace nanocap::oracles {

inline double graphene_band_energy(double phi1, double phi2, double t = 1.0) {
  const std::complex<double> f = 1.0 + std::polar(1.0, phi1) + std::polar(1.0, phi2);
  return t * std::abs(f);
}

/// 2 min |e| over the allowed lines of the (m,0) tube, in units of t.
inline double tube_gap(int m, double t = 1.0, int samples = 720) {
  if (m < 3) throw std::invalid_argument("tube index m must be at least 3");
  using std::numbers::pi;
  const double step = 2.0 * pi / samples;
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < m; ++j) {
    const double phi1 = 2.0 * pi * j / m;
    auto sq = [phi1](double phi2) {
      const double e = graphene_band_energy(phi1, phi2);
      return e * e;
    };
    int arg = 0;
    double coarse = std::numeric_limits<double>::infinity();
    for (int s = 0; s < samples; ++s) {
      const double v = sq(s * step);
      if (v < coarse) {
        coarse = v;
        arg = s;
      }
    }
    std::uintmax_t iters = 200;
    const auto [x, fx] =
        boost::math::tools::brent_find_minima(sq, (arg - 1) * step, (arg + 1) * step,
                                                 std::numeric_limits<double>::digits, iters);
    (void)x;
    best = std::min({best, coarse, fx});
  }
  return 2.0 * t * std::sqrt(std::max(best, 0.0));
}

}  // namespace nanocap::oracles
