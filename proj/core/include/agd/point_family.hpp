#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "agd/scalar.hpp"

namespace agd {

using TermIndex = std::size_t;

enum class FamilyKind { Finite, Power, Geometric, Cluster };

// Additive clusters have entries mu_m + nu_n. Relative clusters have entries
// mu_m + (mu_m - anchor) * nu_n, which keeps the spread proportional to the
// distance of each center from the anchor.
enum class SpreadMode { Additive, Relative };

// Upper bound on the number of terms any single enumeration may visit.
inline constexpr std::size_t kEnumerationLimit = 4000000;

// A bounded sequence of complex numbers from a small catalog. The catalog is
// closed under affine maps and under taking accumulation points:
//   Finite(z_0..z_{L-1})        term i = z_{i mod L}
//   Power(c, p, b)              term i = b + c * (i+1)^(-p)
//   Geometric(c, r, b)          term i = b + c * r^i, 0 < |r| < 1
//   Cluster(C, S, mode, q)      term (m, n) = mu_m + w_m * nu_n
// Values are immutable and cheap to copy.
class PointFamily {
 public:
  static PointFamily finite(std::vector<ComplexScalar> points);
  static PointFamily constant(const ComplexScalar& value) { return finite({value}); }
  static PointFamily power(const ComplexScalar& scale, const Rational& exponent,
                           const ComplexScalar& offset = ComplexScalar());
  static PointFamily geometric(const ComplexScalar& scale, const ComplexScalar& ratio,
                               const ComplexScalar& offset = ComplexScalar());
  static PointFamily cluster(const PointFamily& centers, const PointFamily& spread,
                             SpreadMode mode = SpreadMode::Additive,
                             const ComplexScalar& anchor = ComplexScalar());

  FamilyKind kind() const;
  const std::vector<ComplexScalar>& points() const;
  const ComplexScalar& scale() const;
  const Rational& exponent() const;
  const ComplexScalar& ratio() const;
  const ComplexScalar& offset() const;
  const PointFamily& centers() const;
  const PointFamily& spread() const;
  SpreadMode mode() const;
  const ComplexScalar& anchor() const;

  ComplexScalar term(TermIndex i) const;
  // Finitely many distinct values (Finite, or Cluster of two finite families).
  bool is_finite_set() const;
  // Sequence period for finite sets.
  std::optional<std::size_t> period() const;
  bool exact() const;
  // Finite family whose values all coincide.
  std::optional<ComplexScalar> constant_value() const;
  double sup_modulus() const;

  // Families whose closures cover exactly the accumulation points of this one.
  std::vector<PointFamily> accumulation() const;

  // Candidate term indices with modulus in [lo, hi] (a superset, callers recheck).
  // Requires that no accumulation point has modulus in [lo, hi].
  std::vector<TermIndex> terms_in_band(double lo, double hi) const;
  // Candidate term indices within `radius` of z (a superset, callers recheck).
  // Requires that z is farther than `radius` from every accumulation point.
  std::vector<TermIndex> terms_near(const ComplexScalar& z, double radius) const;
  // Distance from z to the closure. Exactly 0 for exact hits.
  double distance_to(const ComplexScalar& z) const;
  // Distance from the closure to the circle |w| = radius. Exactly 0 for exact hits.
  double distance_to_circle(const Rational& radius) const;

  PointFamily affine(const ComplexScalar& alpha, const ComplexScalar& beta) const;

  // Structural equality of the representation.
  bool operator==(const PointFamily& other) const;
  std::string describe() const;

 private:
  struct Data;
  explicit PointFamily(std::shared_ptr<const Data> data) : data_(std::move(data)) {}
  std::shared_ptr<const Data> data_;
};

}  // namespace agd
