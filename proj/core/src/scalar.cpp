#include "agd/scalar.hpp"

#include <bit>
#include <cctype>
#include <cstdint>
#include <cmath>
#include <limits>
#include <sstream>

#include "agd/error.hpp"

namespace agd {

namespace {

Rational parse_decimal(std::string_view text) {
  std::size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '-' || text[i] == '+')) {
    negative = text[i] == '-';
    ++i;
  }
  std::string digits;
  long scale = 0;
  bool seen_digit = false;
  bool seen_point = false;
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      seen_digit = true;
      if (seen_point) ++scale;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!seen_digit) throw Error(ErrorCode::ParseError, "not a number: '" + std::string(text) + "'");
  long exponent = 0;
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    std::string exp_text(text.substr(i));
    if (exp_text.empty()) throw Error(ErrorCode::ParseError, "bad exponent in '" + std::string(text) + "'");
    std::size_t used = 0;
    try {
      exponent = std::stol(exp_text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != exp_text.size()) throw Error(ErrorCode::ParseError, "bad exponent in '" + std::string(text) + "'");
    i = text.size();
  }
  if (i != text.size()) throw Error(ErrorCode::ParseError, "trailing characters in '" + std::string(text) + "'");
  if (std::labs(exponent) > 4000) throw Error(ErrorCode::ParseError, "exponent out of range in '" + std::string(text) + "'");
  mpz_class num(digits, 10);
  mpz_class ten_pow;
  long shift = exponent - scale;
  mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(shift)));
  Rational q = shift >= 0 ? Rational(num * ten_pow) : Rational(num, ten_pow);
  q.canonicalize();
  return negative ? Rational(-q) : q;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_decimal(text);
  Rational num = parse_decimal(text.substr(0, slash));
  Rational den = parse_decimal(text.substr(slash + 1));
  if (den == 0) throw Error(ErrorCode::ParseError, "zero denominator in '" + std::string(text) + "'");
  return num / den;
}

std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

double to_double(const Rational& q) {
  // get_d truncates toward zero; step to the neighbour when it is closer.
  double d = q.get_d();
  if (q == 0 || !std::isfinite(d)) return d;
  double away = std::nextafter(d, q > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity());
  if (!std::isfinite(away)) return d;
  Rational err_d = abs(q - Rational(d));
  Rational err_away = abs(Rational(away) - q);
  if (err_away != err_d) return err_away < err_d ? away : d;
  return (std::bit_cast<std::uint64_t>(d) & 1U) == 0 ? d : away;  // ties to even
}

Rational rational_approximation(double v, long max_den) {
  if (!std::isfinite(v)) throw Error(ErrorCode::ParseError, "non-finite value cannot be rationalized");
  bool negative = v < 0;
  double x = std::fabs(v);
  // Continued fraction convergents h/k.
  mpz_class h_prev = 1, h = static_cast<long>(std::floor(x));
  mpz_class k_prev = 0, k = 1;
  double frac = x - std::floor(x);
  for (int iter = 0; iter < 64 && frac > 1e-15; ++iter) {
    double inv = 1.0 / frac;
    long a = static_cast<long>(std::floor(inv));
    frac = inv - static_cast<double>(a);
    mpz_class h_next = a * h + h_prev;
    mpz_class k_next = a * k + k_prev;
    if (k_next > max_den) break;
    h_prev = h;
    h = h_next;
    k_prev = k;
    k = k_next;
  }
  Rational q(h, k);
  q.canonicalize();
  return negative ? Rational(-q) : q;
}

namespace {

Rational simplest_positive(double lo, double hi, int depth) {
  double fl = std::floor(lo);
  double candidate = fl + 1.0;
  if (candidate < hi || depth > 40) return Rational(mpz_class(static_cast<long>(candidate)));
  // lo and hi share the integer part fl.
  double inner_hi = lo - fl > 0 ? 1.0 / (lo - fl) : std::numeric_limits<double>::infinity();
  double inner_lo = 1.0 / (hi - fl);
  Rational tail = simplest_positive(inner_lo, inner_hi, depth + 1);
  return Rational(mpz_class(static_cast<long>(fl))) + 1 / tail;
}

}  // namespace

Rational simplest_between(double lo, double hi) {
  if (!(lo < hi)) throw Error(ErrorCode::UsageError, "simplest_between needs lo < hi");
  if (lo < 0 && hi > 0) return Rational(0);
  if (hi <= 0) return -simplest_positive(-hi, -lo, 0);
  return simplest_positive(lo, hi, 0);
}

ComplexScalar ComplexScalar::approximate(std::complex<double> v) {
  ComplexScalar z;
  z.exact_ = false;
  z.approx_ = v;
  return z;
}

std::complex<double> ComplexScalar::value() const {
  if (!exact_) return approx_;
  return {re_.get_d(), im_.get_d()};
}

bool ComplexScalar::is_zero() const {
  if (exact_) return re_ == 0 && im_ == 0;
  return approx_ == std::complex<double>(0.0, 0.0);
}

bool ComplexScalar::is_real() const {
  if (exact_) return im_ == 0;
  return approx_.imag() == 0.0;
}

ComplexScalar ComplexScalar::conj() const {
  if (!exact_) return approximate(std::conj(approx_));
  return ComplexScalar(re_, -im_);
}

ComplexScalar ComplexScalar::pow(unsigned long k) const {
  ComplexScalar result(1);
  ComplexScalar base = *this;
  while (k > 0) {
    if (k & 1UL) result = result * base;
    k >>= 1;
    if (k > 0) base = base * base;
  }
  return result;
}

std::string ComplexScalar::to_string() const {
  if (exact_) {
    if (im_ == 0) return agd::to_string(re_);
    if (re_ == 0) return agd::to_string(im_) + "i";
    std::string im_text = agd::to_string(im_ < 0 ? Rational(-im_) : im_);
    return agd::to_string(re_) + (im_ < 0 ? " - " : " + ") + im_text + "i";
  }
  std::ostringstream os;
  os.precision(17);
  if (approx_.imag() == 0.0) {
    os << approx_.real();
  } else {
    os << approx_.real() << (approx_.imag() < 0 ? " - " : " + ") << std::fabs(approx_.imag()) << "i";
  }
  return os.str();
}

ComplexScalar operator+(const ComplexScalar& a, const ComplexScalar& b) {
  if (a.exact_ && b.exact_) return ComplexScalar(a.re_ + b.re_, a.im_ + b.im_);
  return ComplexScalar::approximate(a.value() + b.value());
}

ComplexScalar operator-(const ComplexScalar& a, const ComplexScalar& b) {
  if (a.exact_ && b.exact_) return ComplexScalar(a.re_ - b.re_, a.im_ - b.im_);
  return ComplexScalar::approximate(a.value() - b.value());
}

ComplexScalar operator*(const ComplexScalar& a, const ComplexScalar& b) {
  if (a.exact_ && b.exact_) {
    return ComplexScalar(a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_);
  }
  return ComplexScalar::approximate(a.value() * b.value());
}

ComplexScalar operator/(const ComplexScalar& a, const ComplexScalar& b) {
  if (b.is_zero()) throw Error(ErrorCode::NotInvertible, "division by zero scalar");
  if (a.exact_ && b.exact_) {
    Rational d = b.norm2();
    return ComplexScalar((a.re_ * b.re_ + a.im_ * b.im_) / d, (a.im_ * b.re_ - a.re_ * b.im_) / d);
  }
  return ComplexScalar::approximate(a.value() / b.value());
}

ComplexScalar ComplexScalar::operator-() const {
  if (exact_) return ComplexScalar(-re_, -im_);
  return approximate(-approx_);
}

bool ComplexScalar::identical(const ComplexScalar& other) const {
  if (exact_ != other.exact_) return false;
  if (exact_) return re_ == other.re_ && im_ == other.im_;
  return approx_ == other.approx_;
}

bool same_point(const ComplexScalar& a, const ComplexScalar& b, double tol) {
  if (a.exact() && b.exact()) return a.re() == b.re() && a.im() == b.im();
  return std::abs(a.value() - b.value()) <= tol;
}

int compare_modulus(const ComplexScalar& z, const Rational& radius) {
  if (z.exact()) {
    Rational lhs = z.norm2();
    Rational rhs = radius * radius;
    return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
  }
  double m = z.abs();
  double r = radius.get_d();
  return m < r ? -1 : (m > r ? 1 : 0);
}

double circle_distance(const ComplexScalar& z, const Rational& radius) {
  if (z.exact()) {
    if (compare_modulus(z, radius) == 0) return 0.0;
    if (z.im() == 0) {
      Rational a = abs(z.re()) - radius;
      double d = std::fabs(a.get_d());
      return d > 0 ? d : std::numeric_limits<double>::denorm_min();
    }
  }
  double d = std::fabs(z.abs() - radius.get_d());
  return d > 0 ? d : std::numeric_limits<double>::denorm_min();
}

}  // namespace agd
