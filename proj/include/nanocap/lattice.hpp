// Zigzag-edged honeycomb ribbons with a periodic edge direction.
//
// Sites are labelled (row r, column m): r runs across the width over the N
// zigzag lines, m runs along a zigzag line and wraps with period L. The
// ribbon rolled along m is the (L/2, 0) zigzag nanotube.

#pragma once

#include <cmath>
#include <cstddef>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nanocap {

enum class Material { C, BN, BCN };
enum class Element { C, B, N };
enum class Sublattice { A, B };

/// Which atoms of an edge line count as the electrode.
enum class ElectrodeMode {
  FullLine,   ///< every site of the outermost zigzag line
  OuterAtoms  ///< only the two-fold coordinated atoms of that line
};

enum class Boundary {
  Ribbon,  ///< periodic along the edge, open across the width
  Torus    ///< periodic in both directions (diagnostic only)
};

/// Atomic species and its on-site energy in units of t.
struct Species {
  Element kind = Element::C;
  double site_energy = 0.0;

  static constexpr Species of(Element e) {
    switch (e) {
      case Element::B: return {Element::B, +1.0};
      case Element::N: return {Element::N, -1.0};
      case Element::C: break;
    }
    return {Element::C, 0.0};
  }
};

struct Site {
  int row = 0;
  int col = 0;
  Sublattice sublattice = Sublattice::A;
  Species species;
  double x = 0.0;  // across the width, Angstrom
  double y = 0.0;  // along the edge, Angstrom
};

struct Bond {
  std::size_t i = 0;
  std::size_t j = 0;
};

inline std::string_view to_string(Material m) {
  switch (m) {
    case Material::C: return "C";
    case Material::BN: return "BN";
    case Material::BCN: return "BCN";
  }
  return "?";
}

inline std::string_view to_string(Element e) {
  switch (e) {
    case Element::C: return "C";
    case Element::B: return "B";
    case Element::N: return "N";
  }
  return "?";
}

inline Material parse_material(std::string_view s) {
  if (s == "c" || s == "C") return Material::C;
  if (s == "bn" || s == "BN") return Material::BN;
  if (s == "bcn" || s == "BCN") return Material::BCN;
  throw std::invalid_argument("unknown material '" + std::string(s) + "'");
}

class RibbonLattice {
 public:
  /// Carbon-carbon distance in Angstrom.
  static constexpr double kBondLength = 1.45;

  RibbonLattice(Material material, int n_rows, int length,
                ElectrodeMode electrodes = ElectrodeMode::FullLine,
                Boundary boundary = Boundary::Ribbon)
      : material_(material), n_rows_(n_rows), length_(length),
        electrode_mode_(electrodes), boundary_(boundary) {
    if (n_rows < 2) throw std::invalid_argument("ribbon needs at least 2 zigzag lines");
    if (length < 4) throw std::invalid_argument("ribbon length must be at least 4");
    if (length % 2 != 0)
      throw std::invalid_argument("ribbon length must be even to stay bipartite under the periodic wrap");
    if (boundary == Boundary::Torus && n_rows % 2 != 0)
      throw std::invalid_argument("torus geometry needs an even number of rows");

    const double a0 = kBondLength;
    const double dy = 0.5 * std::sqrt(3.0) * a0;
    sites_.reserve(static_cast<std::size_t>(n_rows) * length);
    for (int r = 0; r < n_rows; ++r) {
      for (int m = 0; m < length; ++m) {
        const int parity = (r + m) % 2;
        Site s;
        s.row = r;
        s.col = m;
        s.sublattice = parity == 0 ? Sublattice::A : Sublattice::B;
        s.species = Species::of(element_at(r, s.sublattice));
        s.x = 1.5 * r * a0 + 0.5 * a0 * (1 - parity);
        s.y = m * dy;
        sites_.push_back(s);
      }
    }

    for (int r = 0; r < n_rows; ++r)
      for (int m = 0; m < length; ++m) bonds_.push_back({index(r, m), index(r, (m + 1) % length)});
    const int inter_rows = boundary == Boundary::Torus ? n_rows : n_rows - 1;
    for (int r = 0; r < inter_rows; ++r)
      for (int m = 0; m < length; ++m)
        if ((r + m) % 2 == 0) bonds_.push_back({index(r, m), index((r + 1) % n_rows, m)});

    neighbors_.resize(sites_.size());
    for (const auto& b : bonds_) {
      neighbors_[b.i].push_back(b.j);
      neighbors_[b.j].push_back(b.i);
    }

    for (int m = 0; m < length; ++m) {
      const auto lo = index(0, m);
      const auto hi = index(n_rows - 1, m);
      if (electrodes == ElectrodeMode::FullLine || neighbors_[lo].size() == 2) bottom_.push_back(lo);
      if (electrodes == ElectrodeMode::FullLine || neighbors_[hi].size() == 2) top_.push_back(hi);
    }
  }

  Material material() const { return material_; }
  int n_rows() const { return n_rows_; }
  int length() const { return length_; }
  Boundary boundary() const { return boundary_; }
  ElectrodeMode electrode_mode() const { return electrode_mode_; }
  std::size_t size() const { return sites_.size(); }

  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * length_ + static_cast<std::size_t>(col);
  }

  const std::vector<Site>& sites() const { return sites_; }
  const Site& site(std::size_t i) const { return sites_[i]; }
  const std::vector<Bond>& bonds() const { return bonds_; }
  const std::vector<std::size_t>& neighbors(std::size_t i) const { return neighbors_[i]; }

  const std::vector<std::size_t>& electrode_bottom() const { return bottom_; }
  const std::vector<std::size_t>& electrode_top() const { return top_; }

  /// Circumference of the periodic direction in Angstrom.
  double periodic_extent() const { return length_ * 0.5 * std::sqrt(3.0) * kBondLength; }

  /// +1 on sublattice A, -1 on B.
  double sublattice_sign(std::size_t i) const {
    return sites_[i].sublattice == Sublattice::A ? 1.0 : -1.0;
  }

  /// Bond length with the periodic wrap applied along y (and along x for the torus).
  double bond_length(const Bond& b) const {
    const auto& p = sites_[b.i];
    const auto& q = sites_[b.j];
    double dx = q.x - p.x;
    double dy = q.y - p.y;
    const double ey = periodic_extent();
    dy -= ey * std::round(dy / ey);
    if (boundary_ == Boundary::Torus) {
      const double ex = 1.5 * n_rows_ * kBondLength;
      dx -= ex * std::round(dx / ex);
    }
    return std::hypot(dx, dy);
  }

  /// Image of site i under the reflection across the ribbon centre line.
  /// The reflection exchanges the sublattices; for odd N it comes with a
  /// one-column glide so that bonds map onto bonds.
  std::size_t mirror(std::size_t i) const {
    const auto& s = sites_[i];
    return index(n_rows_ - 1 - s.row, (s.col + n_rows_ % 2) % length_);
  }

 private:
  Element element_at(int row, Sublattice sub) const {
    switch (material_) {
      case Material::C: return Element::C;
      case Material::BN: return sub == Sublattice::A ? Element::B : Element::N;
      case Material::BCN:
        if (row == 0) return Element::B;
        if (row == n_rows_ - 1) return Element::N;
        return Element::C;
    }
    return Element::C;
  }

  Material material_;
  int n_rows_;
  int length_;
  ElectrodeMode electrode_mode_;
  Boundary boundary_;
  std::vector<Site> sites_;
  std::vector<Bond> bonds_;
  std::vector<std::vector<std::size_t>> neighbors_;
  std::vector<std::size_t> bottom_;
  std::vector<std::size_t> top_;
};

inline RibbonLattice build_ribbon(Material material, int n_rows, int length,
                                  ElectrodeMode electrodes = ElectrodeMode::FullLine) {
  return RibbonLattice(material, n_rows, length, electrodes, Boundary::Ribbon);
}

inline RibbonLattice build_torus(Material material, int n_rows, int length) {
  return RibbonLattice(material, n_rows, length, ElectrodeMode::FullLine, Boundary::Torus);
}

/// Distance between the two outermost atom lines, (1.5 N - 1) a0.
inline double ribbon_width(const RibbonLattice& lattice) {
  return (1.5 * lattice.n_rows() - 1.0) * RibbonLattice::kBondLength;
}

struct TubeLabel {
  int m = 0;  // the tube is (m, 0)
  bool metallic = false;
};

inline TubeLabel tube_label(const RibbonLattice& lattice) {
  const int m = lattice.length() / 2;
  return {m, m % 3 == 0};
}

/// Plain-text listing: one site per line (index r m sublattice species x y),
/// followed by one "bond i j" line per bond.
inline void dump(std::ostream& os, const RibbonLattice& lattice) {
  os << "# sites " << lattice.size() << " bonds " << lattice.bonds().size() << '\n';
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    const auto& s = lattice.site(i);
    os << i << ' ' << s.row << ' ' << s.col << ' ' << (s.sublattice == Sublattice::A ? 'A' : 'B') << ' '
       << to_string(s.species.kind) << ' ' << s.x << ' ' << s.y << '\n';
  }
  for (const auto& b : lattice.bonds()) os << "bond " << b.i << ' ' << b.j << '\n';
}

}  // namespace nanocap
