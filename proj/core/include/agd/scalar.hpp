#pragma once

#include <gmpxx.h>

#include <complex>
#include <string>
#include <string_view>

namespace agd {

using Rational = mpq_class;

// Accepts "p/q", integers and finite decimals such as "-0.25".
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& q);
double to_double(const Rational& q);
// Closest simple rational to v with denominator at most max_den.
Rational rational_approximation(double v, long max_den = 1000000);
// The rational with smallest denominator in the open interval (lo, hi), lo < hi.
Rational simplest_between(double lo, double hi);

// A complex number that is either exact (rational real and imaginary parts) or
// approximate (double precision). Arithmetic stays exact while both operands are exact.
class ComplexScalar {
 public:
  ComplexScalar() = default;
  // mpq_class(p, q) does not reduce, so parts are canonicalized on entry.
  ComplexScalar(const Rational& re) : re_(re) { re_.canonicalize(); }  // NOLINT: implicit from rationals is intended
  ComplexScalar(const Rational& re, const Rational& im) : re_(re), im_(im) {
    re_.canonicalize();
    im_.canonicalize();
  }
  ComplexScalar(long v) : re_(v) {}  // NOLINT
  static ComplexScalar approximate(std::complex<double> v);

  bool exact() const { return exact_; }
  const Rational& re() const { return re_; }
  const Rational& im() const { return im_; }
  std::complex<double> value() const;
  double abs() const { return std::abs(value()); }
  // |z|^2, exact only.
  Rational norm2() const { return re_ * re_ + im_ * im_; }
  bool is_zero() const;
  bool is_real() const;
  ComplexScalar conj() const;
  ComplexScalar pow(unsigned long k) const;
  std::string to_string() const;

  friend ComplexScalar operator+(const ComplexScalar& a, const ComplexScalar& b);
  friend ComplexScalar operator-(const ComplexScalar& a, const ComplexScalar& b);
  friend ComplexScalar operator*(const ComplexScalar& a, const ComplexScalar& b);
  friend ComplexScalar operator/(const ComplexScalar& a, const ComplexScalar& b);
  ComplexScalar operator-() const;
  ComplexScalar& operator+=(const ComplexScalar& b) { return *this = *this + b; }
  ComplexScalar& operator*=(const ComplexScalar& b) { return *this = *this * b; }

  // Structural identity: same mode and same stored value.
  bool identical(const ComplexScalar& other) const;

 private:
  bool exact_ = true;
  Rational re_{0};
  Rational im_{0};
  std::complex<double> approx_{};
};

// Exact equality when both are exact, otherwise |a - b| <= tol.
bool same_point(const ComplexScalar& a, const ComplexScalar& b, double tol);

// | |z| - radius |, exactly 0 for exact points on the circle and positive otherwise.
double circle_distance(const ComplexScalar& z, const Rational& radius);

// Sign of |z| - radius: exact for exact z, floating comparison otherwise.
int compare_modulus(const ComplexScalar& z, const Rational& radius);

}  // namespace agd
