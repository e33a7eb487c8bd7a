#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "agd/point_family.hpp"
#include "agd/rational_map.hpp"
#include "agd/tolerances.hpp"

namespace agd {

// Open modulus window inner < |z| < outer; a missing bound means 0 or infinity.
struct ModulusWindow {
  std::optional<Rational> inner;
  std::optional<Rational> outer;

  bool unbounded() const { return !inner && !outer; }
  bool contains(const ComplexScalar& z) const;
  double lo() const { return inner ? inner->get_d() : 0.0; }
  double hi() const { return outer ? outer->get_d() : std::numeric_limits<double>::infinity(); }
  bool operator==(const ModulusWindow& other) const { return inner == other.inner && outer == other.outer; }
  std::string to_string() const;
};

// The closure of { map(f_i) : f_i in window, i not excluded } for a base family f.
// Accumulation points of the base never lie on the window boundary.
class SpectralPiece {
 public:
  explicit SpectralPiece(PointFamily base, ModulusWindow window = {}, RationalMap map = RationalMap::identity(),
                         std::vector<TermIndex> excluded = {});

  const PointFamily& base() const { return base_; }
  const ModulusWindow& window() const { return window_; }
  const RationalMap& map() const { return map_; }
  const std::vector<TermIndex>& excluded() const { return excluded_; }
  bool identity_map() const { return map_.is_identity(); }
  bool exact() const { return base_.exact() && map_.exact(); }

  std::vector<SpectralPiece> accumulation() const;
  bool is_finite() const;
  bool is_empty() const;
  // Distinct points of a finite piece.
  std::vector<ComplexScalar> finite_points() const;
  bool contains(const ComplexScalar& z, double tol) const;
  // First n members in term order.
  std::vector<ComplexScalar> sample(std::size_t n) const;

  // The following need an identity map.
  double distance_to_circle(const Rational& radius) const;
  // Smallest modulus of a nonzero member (0 when nonzero members accumulate at 0, inf when none).
  double min_nonzero_modulus() const;
  // Members with modulus in [lo, hi]; no accumulation point may have modulus in that band.
  std::vector<ComplexScalar> points_in_band(double lo, double hi) const;

  std::string describe() const;

 private:
  bool admits(TermIndex i, const ComplexScalar& value) const;
  std::vector<TermIndex> indices_in_band(double lo, double hi) const;
  void require_identity(const char* what) const;

  PointFamily base_;
  ModulusWindow window_;
  RationalMap map_;
  std::vector<TermIndex> excluded_;
};

// A finite union of pieces, optionally with the point 0 added explicitly.
class SpectralSet {
 public:
  SpectralSet() = default;
  explicit SpectralSet(std::vector<SpectralPiece> pieces, bool contains_zero = false);
  static SpectralSet of(const PointFamily& family) { return SpectralSet({SpectralPiece(family)}); }
  static SpectralSet points(const std::vector<ComplexScalar>& pts);

  const std::vector<SpectralPiece>& pieces() const { return pieces_; }
  bool contains_zero() const { return contains_zero_; }
  bool is_empty() const { return pieces_.empty() && !contains_zero_; }
  bool is_finite() const;
  // Distinct points in a deterministic order; requires is_finite().
  std::vector<ComplexScalar> finite_points() const;
  bool exact() const;
  std::string describe() const;

 private:
  std::vector<SpectralPiece> pieces_;
  bool contains_zero_ = false;
};

struct ClassFlags {
  bool qnil = false;
  bool acc_class = false;
  bool g_drazin = false;
  bool ag_drazin = false;
  bool operator==(const ClassFlags& other) const = default;
};

// The isolated points of a set, described as a difference.
struct IsolatedPoints {
  SpectralSet whole;
  SpectralSet removed;
  bool contains(const ComplexScalar& z, double tol = 1e-12) const;
  std::string describe() const;
};

struct Structure {
  SpectralSet acc;
  IsolatedPoints iso;
};

struct AnnulusCheck {
  bool clear = false;
  double gap = 0.0;
};

Structure derive_structure(const SpectralSet& s);
SpectralSet accumulation(const SpectralSet& s);
SpectralSet sigma_d_of(const SpectralSet& s);
SpectralSet sigma_ad_of(const SpectralSet& s);
// Throws EmptySpectrum for the empty set.
ClassFlags classify_set(const SpectralSet& s, double tol = 1e-12);
AnnulusCheck annulus_clear(const SpectralSet& s, const Rational& radius, const Tolerances& tol = {});
SpectralSet affine_map(const SpectralSet& s, const ComplexScalar& alpha, const ComplexScalar& beta);
SpectralSet set_union(const SpectralSet& a, const SpectralSet& b);
bool contains(const SpectralSet& s, const ComplexScalar& z, double tol = 1e-12);

// Cut helpers (pieces must carry identity maps).
double min_nonzero_modulus(const SpectralSet& s);
std::vector<ComplexScalar> points_in_band(const SpectralSet& s, double lo, double hi);
// Whether some member has modulus strictly between lo and hi; both circles must avoid the set.
bool band_occupied(const SpectralSet& s, const Rational& lo, const Rational& hi);

// Equality of closed sets: exact on finite sets; for infinite sets structural
// equality, or equal accumulation sets plus mutual containment of the first
// `depth` members of every piece.
bool set_equal(const SpectralSet& a, const SpectralSet& b, std::size_t depth = 1000, double tol = 1e-12);

}  // namespace agd
