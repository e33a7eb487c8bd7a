#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "agd/scalar.hpp"

namespace agd {

// Polynomial c[0] + c[1] z + ... with trailing zeros trimmed; the zero polynomial is empty.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<ComplexScalar> coefficients);
  static Polynomial constant(const ComplexScalar& c) { return Polynomial({c}); }
  static Polynomial monomial() { return Polynomial({ComplexScalar(0), ComplexScalar(1)}); }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  bool exact() const;
  const std::vector<ComplexScalar>& coefficients() const { return c_; }
  const ComplexScalar& leading() const { return c_.back(); }
  ComplexScalar operator()(const ComplexScalar& z) const;

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  Polynomial scaled(const ComplexScalar& s) const;
  // Exact division with remainder; requires exact coefficients.
  std::pair<Polynomial, Polynomial> divmod(const Polynomial& divisor) const;
  bool identical(const Polynomial& other) const;
  std::string to_string() const;

 private:
  void trim();
  std::vector<ComplexScalar> c_;
};

// A rational function num/den kept in lowest terms with a monic denominator.
// Diagonal blocks apply one such map per spectral region to their base family.
class RationalMap {
 public:
  RationalMap() : RationalMap(identity()) {}
  RationalMap(Polynomial num, Polynomial den);
  static RationalMap identity();
  static RationalMap constant(const ComplexScalar& c);
  static RationalMap affine(const ComplexScalar& alpha, const ComplexScalar& beta);

  const Polynomial& numerator() const { return num_; }
  const Polynomial& denominator() const { return den_; }
  bool exact() const { return num_.exact() && den_.exact(); }

  // Throws NotInvertible when the denominator vanishes at z.
  ComplexScalar operator()(const ComplexScalar& z) const;
  bool is_identity() const;
  std::optional<ComplexScalar> constant_value() const;
  bool is_zero() const { return num_.is_zero(); }
  // (alpha, beta) when the map is z -> alpha z + beta.
  std::optional<std::pair<ComplexScalar, ComplexScalar>> as_affine() const;
  // Points z with map(z) = w; empty if the map is constant.
  std::vector<ComplexScalar> preimages(const ComplexScalar& w) const;

  friend RationalMap operator+(const RationalMap& a, const RationalMap& b);
  friend RationalMap operator-(const RationalMap& a, const RationalMap& b);
  friend RationalMap operator*(const RationalMap& a, const RationalMap& b);
  RationalMap reciprocal() const;
  bool operator==(const RationalMap& other) const;
  std::string to_string() const;

 private:
  void normalize();
  Polynomial num_;
  Polynomial den_;
};

}  // namespace agd
