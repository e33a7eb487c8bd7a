#include "agd/rational_map.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <sstream>

#include "agd/error.hpp"

namespace agd {

Polynomial::Polynomial(std::vector<ComplexScalar> coefficients) : c_(std::move(coefficients)) { trim(); }

void Polynomial::trim() {
  while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
}

bool Polynomial::exact() const {
  return std::all_of(c_.begin(), c_.end(), [](const ComplexScalar& z) { return z.exact(); });
}

ComplexScalar Polynomial::operator()(const ComplexScalar& z) const {
  ComplexScalar acc(0);
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  std::vector<ComplexScalar> c(std::max(a.c_.size(), b.c_.size()), ComplexScalar(0));
  for (std::size_t i = 0; i < a.c_.size(); ++i) c[i] = c[i] + a.c_[i];
  for (std::size_t i = 0; i < b.c_.size(); ++i) c[i] = c[i] + b.c_[i];
  return Polynomial(std::move(c));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + b.scaled(ComplexScalar(-1)); }

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return Polynomial();
  std::vector<ComplexScalar> c(a.c_.size() + b.c_.size() - 1, ComplexScalar(0));
  for (std::size_t i = 0; i < a.c_.size(); ++i) {
    for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] = c[i + j] + a.c_[i] * b.c_[j];
  }
  return Polynomial(std::move(c));
}

Polynomial Polynomial::scaled(const ComplexScalar& s) const {
  std::vector<ComplexScalar> c;
  c.reserve(c_.size());
  for (const auto& z : c_) c.push_back(z * s);
  return Polynomial(std::move(c));
}

std::pair<Polynomial, Polynomial> Polynomial::divmod(const Polynomial& divisor) const {
  if (divisor.is_zero()) throw Error(ErrorCode::NotInvertible, "polynomial division by zero");
  std::vector<ComplexScalar> rem = c_;
  int dd = divisor.degree();
  std::vector<ComplexScalar> quot(std::max(0, degree() - dd + 1), ComplexScalar(0));
  for (int k = degree() - dd; k >= 0; --k) {
    ComplexScalar coef = rem[k + dd] / divisor.leading();
    quot[k] = coef;
    for (int j = 0; j <= dd; ++j) rem[k + j] = rem[k + j] - coef * divisor.c_[j];
    rem[k + dd] = ComplexScalar(0);
  }
  return {Polynomial(std::move(quot)), Polynomial(std::move(rem))};
}

bool Polynomial::identical(const Polynomial& other) const {
  if (c_.size() != other.c_.size()) return false;
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (!c_[i].identical(other.c_[i])) return false;
  }
  return true;
}

std::string Polynomial::to_string() const {
  if (c_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int k = degree(); k >= 0; --k) {
    const ComplexScalar& a = c_[k];
    if (a.is_zero()) continue;
    if (!first) os << " + ";
    first = false;
    bool unit = a.exact() && a.re() == 1 && a.im() == 0;
    std::string text = a.to_string();
    bool compound = text.find(' ') != std::string::npos;
    if (k == 0 || !unit) os << (compound && k > 0 ? "(" + text + ")" : text);
    if (k >= 1) os << "z";
    if (k >= 2) os << "^" << k;
  }
  return os.str();
}

RationalMap::RationalMap(Polynomial num, Polynomial den) : num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) throw Error(ErrorCode::NotInvertible, "rational map with zero denominator");
  normalize();
}

RationalMap RationalMap::identity() { return RationalMap(Polynomial::monomial(), Polynomial::constant(1)); }

RationalMap RationalMap::constant(const ComplexScalar& c) {
  return RationalMap(Polynomial::constant(c), Polynomial::constant(1));
}

RationalMap RationalMap::affine(const ComplexScalar& alpha, const ComplexScalar& beta) {
  return RationalMap(Polynomial({beta, alpha}), Polynomial::constant(1));
}

void RationalMap::normalize() {
  if (num_.is_zero()) {
    den_ = Polynomial::constant(1);
    return;
  }
  if (num_.exact() && den_.exact() && den_.degree() > 0 && num_.degree() > 0) {
    // Euclid over Q(i).
    Polynomial a = num_;
    Polynomial b = den_;
    while (!b.is_zero()) {
      Polynomial r = a.divmod(b).second;
      a = b;
      b = r;
    }
    if (a.degree() > 0) {
      num_ = num_.divmod(a).first;
      den_ = den_.divmod(a).first;
    }
  }
  ComplexScalar lead = den_.leading();
  if (!(lead.exact() && lead.re() == 1 && lead.im() == 0)) {
    ComplexScalar inv = ComplexScalar(1) / lead;
    num_ = num_.scaled(inv);
    den_ = den_.scaled(inv);
  }
}

ComplexScalar RationalMap::operator()(const ComplexScalar& z) const {
  ComplexScalar d = den_(z);
  if (d.is_zero()) throw Error(ErrorCode::NotInvertible, "rational map has a pole at " + z.to_string());
  return num_(z) / d;
}

bool RationalMap::is_identity() const {
  return den_.degree() == 0 && num_.degree() == 1 && num_.coefficients()[0].is_zero() &&
         num_.coefficients()[1].exact() && num_.coefficients()[1].re() == 1 && num_.coefficients()[1].im() == 0;
}

std::optional<ComplexScalar> RationalMap::constant_value() const {
  if (num_.degree() <= 0 && den_.degree() == 0) return num_.is_zero() ? ComplexScalar(0) : num_.coefficients()[0];
  return std::nullopt;
}

std::optional<std::pair<ComplexScalar, ComplexScalar>> RationalMap::as_affine() const {
  if (den_.degree() != 0 || num_.degree() > 1) return std::nullopt;
  ComplexScalar beta = num_.is_zero() ? ComplexScalar(0) : num_.coefficients()[0];
  ComplexScalar alpha = num_.degree() == 1 ? num_.coefficients()[1] : ComplexScalar(0);
  return std::make_pair(alpha, beta);
}

std::vector<ComplexScalar> RationalMap::preimages(const ComplexScalar& w) const {
  Polynomial eq = num_ - den_.scaled(w);
  if (eq.degree() <= 0) return {};
  std::vector<ComplexScalar> out;
  if (eq.degree() == 1) {
    out.push_back(-eq.coefficients()[0] / eq.coefficients()[1]);
  } else {
    int n = eq.degree();
    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(n, n);
    std::complex<double> lead = eq.leading().value();
    for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) companion(i, n - 1) = -eq.coefficients()[i].value() / lead;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
    for (int i = 0; i < n; ++i) out.push_back(ComplexScalar::approximate(solver.eigenvalues()(i)));
  }
  // Drop spurious roots at poles.
  std::vector<ComplexScalar> kept;
  for (const auto& z : out) {
    if (!den_(z).is_zero()) kept.push_back(z);
  }
  return kept;
}

RationalMap operator+(const RationalMap& a, const RationalMap& b) {
  if (a.den_.identical(b.den_)) return RationalMap(a.num_ + b.num_, a.den_);
  return RationalMap(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

RationalMap operator-(const RationalMap& a, const RationalMap& b) {
  if (a.den_.identical(b.den_)) return RationalMap(a.num_ - b.num_, a.den_);
  return RationalMap(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
}

RationalMap operator*(const RationalMap& a, const RationalMap& b) {
  return RationalMap(a.num_ * b.num_, a.den_ * b.den_);
}

RationalMap RationalMap::reciprocal() const {
  if (num_.is_zero()) throw Error(ErrorCode::NotInvertible, "reciprocal of the zero map");
  return RationalMap(den_, num_);
}

bool RationalMap::operator==(const RationalMap& other) const {
  return num_.identical(other.num_) && den_.identical(other.den_);
}

std::string RationalMap::to_string() const {
  if (den_.degree() == 0) return num_.to_string();
  auto wrap = [](const Polynomial& p) {
    std::string t = p.to_string();
    return t.find(' ') == std::string::npos ? t : "(" + t + ")";
  };
  return wrap(num_) + "/" + wrap(den_);
}

}  // namespace agd
