#include "agd/spectral_set.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "agd/error.hpp"

namespace agd {

namespace {

// Relative accuracy of distances whose exact value would need an unbounded scan.
constexpr double kDistanceFraction = 1e-3;

bool value_less(const ComplexScalar& a, const ComplexScalar& b) {
  auto va = a.value();
  auto vb = b.value();
  if (va.real() != vb.real()) return va.real() < vb.real();
  return va.imag() < vb.imag();
}

std::vector<ComplexScalar> distinct_points(std::vector<ComplexScalar> pts, double tol) {
  std::sort(pts.begin(), pts.end(), value_less);
  std::vector<ComplexScalar> out;
  for (auto& z : pts) {
    bool dup = false;
    // Equal points are adjacent up to rounding; scan back over the near-equal run.
    for (auto it = out.rbegin(); it != out.rend(); ++it) {
      if (it->value().real() < z.value().real() - 2 * tol - 1e-15) break;
      if (same_point(*it, z, tol)) {
        dup = true;
        break;
      }
    }
    if (!dup) out.push_back(std::move(z));
  }
  return out;
}

}  // namespace

bool ModulusWindow::contains(const ComplexScalar& z) const {
  if (inner && compare_modulus(z, *inner) <= 0) return false;
  if (outer && compare_modulus(z, *outer) >= 0) return false;
  return true;
}

std::string ModulusWindow::to_string() const {
  if (unbounded()) return "";
  std::string s;
  if (inner) s += agd::to_string(*inner) + " < ";
  s += "|z|";
  if (outer) s += " < " + agd::to_string(*outer);
  return s;
}

SpectralPiece::SpectralPiece(PointFamily base, ModulusWindow window, RationalMap map, std::vector<TermIndex> excluded)
    : base_(std::move(base)), window_(std::move(window)), map_(std::move(map)), excluded_(std::move(excluded)) {
  // Periodic sequences repeat every value infinitely often, so finitely many
  // removed terms never remove a point.
  if (base_.period()) excluded_.clear();
  std::sort(excluded_.begin(), excluded_.end());
  excluded_.erase(std::unique(excluded_.begin(), excluded_.end()), excluded_.end());
  if (window_.unbounded() && !map_.is_identity()) {
    if (auto affine = map_.as_affine()) {
      base_ = base_.affine(affine->first, affine->second);
      map_ = RationalMap::identity();
    }
  }
}

bool SpectralPiece::admits(TermIndex i, const ComplexScalar& value) const {
  if (!window_.contains(value)) return false;
  return !std::binary_search(excluded_.begin(), excluded_.end(), i);
}

void SpectralPiece::require_identity(const char* what) const {
  if (!identity_map()) {
    throw Error(ErrorCode::CutUnsupported, std::string(what) + " needs an unmapped spectral piece: " + describe());
  }
}

std::vector<TermIndex> SpectralPiece::indices_in_band(double lo, double hi) const {
  double a = std::max(lo, window_.lo());
  double b = std::min(hi, window_.outer ? window_.hi() : base_.sup_modulus() + 1.0);
  if (a > b) return {};
  return base_.terms_in_band(a, b);
}

std::vector<SpectralPiece> SpectralPiece::accumulation() const {
  if (map_.constant_value()) return {};
  std::vector<SpectralPiece> out;
  for (auto& g : base_.accumulation()) out.emplace_back(g, window_, map_);
  return out;
}

bool SpectralPiece::is_finite() const {
  for (const auto& p : accumulation()) {
    if (!p.is_empty()) return false;
  }
  return true;
}

bool SpectralPiece::is_empty() const {
  if (window_.unbounded() && excluded_.empty()) return false;
  // A nonempty accumulation set forces infinitely many members.
  for (const auto& p : base_.accumulation()) {
    if (!SpectralPiece(p, window_).is_empty()) return false;
  }
  std::vector<TermIndex> idx = base_.period() ? std::vector<TermIndex>() : indices_in_band(window_.lo(), window_.hi());
  if (base_.period()) {
    for (TermIndex i = 0; i < *base_.period(); ++i) idx.push_back(i);
  }
  for (TermIndex i : idx) {
    if (admits(i, base_.term(i))) return false;
  }
  return true;
}

std::vector<ComplexScalar> SpectralPiece::finite_points() const {
  if (auto c = map_.constant_value()) {
    if (is_empty()) return {};
    return {*c};
  }
  std::vector<TermIndex> idx;
  if (auto period = base_.period()) {
    for (TermIndex i = 0; i < *period; ++i) idx.push_back(i);
  } else {
    idx = indices_in_band(window_.lo(), window_.hi());
  }
  std::vector<ComplexScalar> pts;
  for (TermIndex i : idx) {
    ComplexScalar v = base_.term(i);
    if (admits(i, v)) pts.push_back(map_(v));
  }
  return distinct_points(std::move(pts), 1e-12);
}

bool SpectralPiece::contains(const ComplexScalar& z, double tol) const {
  for (const auto& p : accumulation()) {
    if (p.contains(z, tol)) return true;
  }
  if (auto c = map_.constant_value()) return same_point(*c, z, tol) && !is_empty();
  std::vector<ComplexScalar> pre = identity_map() ? std::vector<ComplexScalar>{z} : map_.preimages(z);
  for (const auto& y : pre) {
    bool exact_search = y.exact() && base_.exact();
    double radius = exact_search ? 0.0 : (identity_map() ? tol : 1e-9 * (1.0 + y.abs()));
    double acc_dist = std::numeric_limits<double>::infinity();
    for (const auto& g : base_.accumulation()) acc_dist = std::min(acc_dist, g.distance_to(y));
    if (acc_dist <= radius) {
      // y sits on an accumulation point of the base up to rounding.
      if (!exact_search && window_.contains(y)) return true;
      continue;
    }
    for (TermIndex i : base_.terms_near(y, radius)) {
      ComplexScalar v = base_.term(i);
      if (!admits(i, v)) continue;
      if (same_point(map_(v), z, tol)) return true;
    }
  }
  return false;
}

std::vector<ComplexScalar> SpectralPiece::sample(std::size_t n) const {
  std::vector<ComplexScalar> out;
  if (n == 0) return out;
  std::size_t limit = base_.period() ? *base_.period() : std::min<std::size_t>(kEnumerationLimit / 16, 64 * n + 100000);
  for (TermIndex i = 0; i < limit && out.size() < n; ++i) {
    ComplexScalar v = base_.term(i);
    if (admits(i, v)) out.push_back(map_(v));
  }
  return out;
}

double SpectralPiece::distance_to_circle(const Rational& radius) const {
  if (is_finite()) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& z : finite_points()) best = std::min(best, circle_distance(z, radius));
    return best;
  }
  require_identity("circle distance");
  double d_acc = std::numeric_limits<double>::infinity();
  for (const auto& p : accumulation()) d_acc = std::min(d_acc, p.distance_to_circle(radius));
  if (d_acc == 0) return 0;
  double r = radius.get_d();
  double eta = d_acc * (1.0 - kDistanceFraction);
  double best = d_acc;
  // The base family is a superset, so its distance is a lower bound; widen the
  // scanned band from there until an admitted member is found inside it.
  double reach = std::max(2.0 * base_.distance_to_circle(radius), 1e-12 * r);
  while (true) {
    reach = std::min(reach, eta);
    for (TermIndex i : indices_in_band(std::max(0.0, r - reach), r + reach)) {
      ComplexScalar v = base_.term(i);
      if (admits(i, v)) best = std::min(best, circle_distance(v, radius));
    }
    if (best <= reach || reach >= eta) return best;
    reach *= 4.0;
  }
}

double SpectralPiece::min_nonzero_modulus() const {
  double best = std::numeric_limits<double>::infinity();
  if (is_finite()) {
    for (const auto& z : finite_points()) {
      if (!z.is_zero()) best = std::min(best, z.abs());
    }
    return best;
  }
  require_identity("modulus bound");
  for (const auto& p : accumulation()) {
    if (p.contains(ComplexScalar(0), 0.0)) return 0.0;
    best = std::min(best, p.min_nonzero_modulus());
  }
  double eta = best * (1.0 - kDistanceFraction);
  for (TermIndex i : indices_in_band(0.0, eta)) {
    ComplexScalar v = base_.term(i);
    if (admits(i, v) && !v.is_zero()) best = std::min(best, v.abs());
  }
  return best;
}

std::vector<ComplexScalar> SpectralPiece::points_in_band(double lo, double hi) const {
  double slack = 1e-9 * (1.0 + hi);
  std::vector<ComplexScalar> out;
  if (is_finite()) {
    for (auto& z : finite_points()) {
      double m = z.abs();
      if (m >= lo - slack && m <= hi + slack) out.push_back(z);
    }
    return out;
  }
  require_identity("band enumeration");
  for (TermIndex i : indices_in_band(lo, hi)) {
    ComplexScalar v = base_.term(i);
    if (admits(i, v)) out.push_back(v);
  }
  return distinct_points(std::move(out), 1e-12);
}

std::string SpectralPiece::describe() const {
  if (window_.unbounded() && identity_map() && excluded_.empty()) return base_.describe();
  std::ostringstream os;
  os << "{" << (identity_map() ? std::string("z") : map_.to_string()) << " : z in " << base_.describe();
  if (!window_.unbounded()) os << ", " << window_.to_string();
  if (!excluded_.empty()) os << ", " << excluded_.size() << " term(s) replaced";
  os << "}";
  return os.str();
}

SpectralSet::SpectralSet(std::vector<SpectralPiece> pieces, bool contains_zero) : contains_zero_(contains_zero) {
  for (auto& p : pieces) {
    bool plain = p.window().unbounded() && p.identity_map() && p.excluded().empty();
    if (plain) {
      pieces_.push_back(std::move(p));
      continue;
    }
    if (p.is_empty()) continue;
    if (p.is_finite() && p.base().is_finite_set()) {
      pieces_.emplace_back(PointFamily::finite(p.finite_points()));
    } else {
      pieces_.push_back(std::move(p));
    }
  }
}

SpectralSet SpectralSet::points(const std::vector<ComplexScalar>& pts) {
  if (pts.empty()) return SpectralSet();
  return SpectralSet({SpectralPiece(PointFamily::finite(pts))});
}

bool SpectralSet::is_finite() const {
  return std::all_of(pieces_.begin(), pieces_.end(), [](const SpectralPiece& p) { return p.is_finite(); });
}

std::vector<ComplexScalar> SpectralSet::finite_points() const {
  std::vector<ComplexScalar> pts;
  for (const auto& p : pieces_) {
    auto f = p.finite_points();
    pts.insert(pts.end(), f.begin(), f.end());
  }
  if (contains_zero_) pts.emplace_back(0);
  return distinct_points(std::move(pts), 1e-12);
}

bool SpectralSet::exact() const {
  return std::all_of(pieces_.begin(), pieces_.end(), [](const SpectralPiece& p) { return p.exact(); });
}

std::string SpectralSet::describe() const {
  if (is_empty()) return "{}";
  std::vector<std::string> parts;
  if (is_finite()) {
    std::string s = "{";
    auto pts = finite_points();
    for (std::size_t i = 0; i < pts.size(); ++i) s += (i ? ", " : "") + pts[i].to_string();
    return s + "}";
  }
  std::vector<SpectralPiece> finite_part;
  for (const auto& p : pieces_) {
    if (p.is_finite()) {
      finite_part.push_back(p);
    } else {
      parts.push_back("closure " + p.describe());
    }
  }
  if (contains_zero_ || !finite_part.empty()) {
    parts.insert(parts.begin(), SpectralSet(finite_part, contains_zero_).describe());
  }
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? " U " : "") + parts[i];
  return s;
}

bool IsolatedPoints::contains(const ComplexScalar& z, double tol) const {
  return agd::contains(whole, z, tol) && !agd::contains(removed, z, tol);
}

std::string IsolatedPoints::describe() const {
  if (removed.is_empty()) return whole.describe();
  return "(" + whole.describe() + ") \\ (" + removed.describe() + ")";
}

SpectralSet accumulation(const SpectralSet& s) {
  std::vector<SpectralPiece> pieces;
  for (const auto& p : s.pieces()) {
    for (auto& q : p.accumulation()) pieces.push_back(std::move(q));
  }
  return SpectralSet(std::move(pieces));
}

Structure derive_structure(const SpectralSet& s) {
  SpectralSet acc = accumulation(s);
  return Structure{acc, IsolatedPoints{s, acc}};
}

SpectralSet sigma_d_of(const SpectralSet& s) { return accumulation(s); }

SpectralSet sigma_ad_of(const SpectralSet& s) { return accumulation(accumulation(s)); }

ClassFlags classify_set(const SpectralSet& s, double tol) {
  if (s.is_empty()) throw Error(ErrorCode::EmptySpectrum, "a spectrum is never empty");
  auto all_zero = [tol](const SpectralSet& set) {
    if (!set.is_finite()) return false;
    for (const auto& z : set.finite_points()) {
      if (!same_point(z, ComplexScalar(0), tol)) return false;
    }
    return true;
  };
  SpectralSet acc = accumulation(s);
  SpectralSet acc2 = accumulation(acc);
  ClassFlags flags;
  flags.qnil = all_zero(s);
  flags.acc_class = acc.is_empty() || all_zero(acc);
  flags.g_drazin = !contains(acc, ComplexScalar(0), tol);
  flags.ag_drazin = !contains(acc2, ComplexScalar(0), tol);
  return flags;
}

AnnulusCheck annulus_clear(const SpectralSet& s, const Rational& radius, const Tolerances& tol) {
  if (radius <= 0) throw Error(ErrorCode::CutInvalid, "cut radius must be positive");
  double gap = std::numeric_limits<double>::infinity();
  if (s.contains_zero()) gap = radius.get_d();
  for (const auto& p : s.pieces()) gap = std::min(gap, p.distance_to_circle(radius));
  AnnulusCheck out;
  out.gap = gap;
  out.clear = gap > 0 && gap >= tol.gap * radius.get_d();
  return out;
}

SpectralSet affine_map(const SpectralSet& s, const ComplexScalar& alpha, const ComplexScalar& beta) {
  std::vector<SpectralPiece> pieces;
  for (const auto& p : s.pieces()) {
    if (p.window().unbounded() && p.identity_map()) {
      pieces.emplace_back(p.base().affine(alpha, beta), p.window(), p.map(), p.excluded());
    } else {
      RationalMap m = RationalMap::constant(alpha) * p.map() + RationalMap::constant(beta);
      pieces.emplace_back(p.base(), p.window(), m, p.excluded());
    }
  }
  bool zero = s.contains_zero() && beta.is_zero();
  if (s.contains_zero() && !beta.is_zero()) pieces.emplace_back(PointFamily::constant(beta));
  return SpectralSet(std::move(pieces), zero);
}

SpectralSet set_union(const SpectralSet& a, const SpectralSet& b) {
  std::vector<SpectralPiece> pieces = a.pieces();
  pieces.insert(pieces.end(), b.pieces().begin(), b.pieces().end());
  return SpectralSet(std::move(pieces), a.contains_zero() || b.contains_zero());
}

bool contains(const SpectralSet& s, const ComplexScalar& z, double tol) {
  if (s.contains_zero() && same_point(z, ComplexScalar(0), tol)) return true;
  for (const auto& p : s.pieces()) {
    if (p.contains(z, tol)) return true;
  }
  return false;
}

double min_nonzero_modulus(const SpectralSet& s) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : s.pieces()) best = std::min(best, p.min_nonzero_modulus());
  return best;
}

std::vector<ComplexScalar> points_in_band(const SpectralSet& s, double lo, double hi) {
  std::vector<ComplexScalar> out;
  for (const auto& p : s.pieces()) {
    auto part = p.points_in_band(lo, hi);
    out.insert(out.end(), part.begin(), part.end());
  }
  if (s.contains_zero() && lo <= 0) out.emplace_back(0);
  return distinct_points(std::move(out), 1e-12);
}

bool band_occupied(const SpectralSet& s, const Rational& lo, const Rational& hi) {
  if (s.is_empty() || lo >= hi) return false;
  if (!s.is_finite() && band_occupied(accumulation(s), lo, hi)) return true;
  for (const auto& z : points_in_band(s, lo.get_d(), hi.get_d())) {
    if (compare_modulus(z, lo) > 0 && compare_modulus(z, hi) < 0) return true;
  }
  return false;
}

namespace {

bool same_piece(const SpectralPiece& a, const SpectralPiece& b) {
  return a.base() == b.base() && a.window() == b.window() && a.map() == b.map() && a.excluded() == b.excluded();
}

bool structurally_equal(const SpectralSet& a, const SpectralSet& b) {
  if (a.contains_zero() != b.contains_zero() || a.pieces().size() != b.pieces().size()) return false;
  for (const auto& p : a.pieces()) {
    bool found = std::any_of(b.pieces().begin(), b.pieces().end(), [&](const SpectralPiece& q) { return same_piece(p, q); });
    if (!found) return false;
  }
  return true;
}

bool sampled_subset(const SpectralSet& a, const SpectralSet& b, std::size_t depth, double tol) {
  if (a.contains_zero() && !contains(b, ComplexScalar(0), tol)) return false;
  for (const auto& p : a.pieces()) {
    for (const auto& z : p.sample(depth)) {
      if (!contains(b, z, tol)) return false;
    }
  }
  return true;
}

}  // namespace

bool set_equal(const SpectralSet& a, const SpectralSet& b, std::size_t depth, double tol) {
  bool fa = a.is_finite();
  bool fb = b.is_finite();
  if (fa != fb) return false;
  if (fa) {
    auto pa = a.finite_points();
    auto pb = b.finite_points();
    if (pa.size() != pb.size()) return false;
    for (const auto& z : pa) {
      bool found = std::any_of(pb.begin(), pb.end(), [&](const ComplexScalar& w) { return same_point(z, w, tol); });
      if (!found) return false;
    }
    return true;
  }
  if (structurally_equal(a, b)) return true;
  if (!set_equal(accumulation(a), accumulation(b), depth, tol)) return false;
  return sampled_subset(a, b, depth, tol) && sampled_subset(b, a, depth, tol);
}

}  // namespace agd
