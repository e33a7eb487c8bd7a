#include "agd/point_family.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "agd/error.hpp"

namespace agd {

namespace {

using cd = std::complex<double>;

// Relative accuracy of distances whose exact value would need an unbounded scan.
constexpr double kDistanceFraction = 1e-3;

void check_budget(double count) {
  if (!(count <= static_cast<double>(kEnumerationLimit))) {
    throw Error(ErrorCode::ComputationLimit, "enumeration exceeds the term budget");
  }
}

double band_slack(double hi) { return 1e-9 * (1.0 + std::fabs(hi)); }

double point_distance(const ComplexScalar& a, const ComplexScalar& b) {
  if (a.exact() && b.exact()) {
    if (a.re() == b.re() && a.im() == b.im()) return 0.0;
  }
  if (a.exact() && b.exact()) {
    // Subtracting exactly first keeps the relative accuracy for nearby points.
    ComplexScalar diff = a - b;
    double d = std::hypot(diff.re().get_d(), diff.im().get_d());
    return d > 0 ? d : std::numeric_limits<double>::denorm_min();
  }
  return std::abs(a.value() - b.value());
}

double log_abs(const mpz_class& v) {
  long exp = 0;
  double mant = mpz_get_d_2exp(&exp, v.get_mpz_t());
  return std::log(std::fabs(mant)) + static_cast<double>(exp) * std::log(2.0);
}

// log |a - b| for distinct exact points, valid far below the double range.
double log_distance(const ComplexScalar& a, const ComplexScalar& b) {
  Rational n2 = (a - b).norm2();
  return 0.5 * (log_abs(n2.get_num()) - log_abs(n2.get_den()));
}

}  // namespace

struct PointFamily::Data {
  FamilyKind kind = FamilyKind::Finite;
  std::vector<ComplexScalar> points;
  ComplexScalar scale;
  ComplexScalar ratio;
  ComplexScalar offset;
  ComplexScalar anchor;
  Rational exponent{1};
  std::optional<PointFamily> centers;
  std::optional<PointFamily> spread;
  SpreadMode mode = SpreadMode::Additive;

  // Floating copies used for index arithmetic.
  double s = 0.0;  // |scale|
  cd unit{1.0, 0.0};  // scale / |scale|
  double rho = 0.0;   // |ratio|
  double p = 1.0;     // exponent
  bool integer_exponent = true;
  unsigned long p_int = 1;

  cd approx_term(TermIndex i) const;
  std::size_t tail_start(double eta) const;
  std::size_t tail_start_log(double log_eta) const;  // Geometric only
  std::pair<TermIndex, TermIndex> split(TermIndex i) const;
  TermIndex join(TermIndex m, TermIndex n) const;
  std::vector<TermIndex> power_indices(double t_lo, double t_hi) const;
  std::vector<TermIndex> cluster_box(double delta) const;
  std::vector<TermIndex> cluster_band(double lo, double hi, double delta) const;
  std::vector<TermIndex> cluster_near(const ComplexScalar& z, double radius, double delta) const;
};

namespace {

void append_range(std::vector<TermIndex>& out, double lo_index, double hi_index) {
  if (hi_index < 0 || hi_index < lo_index) return;
  lo_index = std::max(0.0, lo_index);
  check_budget(hi_index - lo_index + 1 + static_cast<double>(out.size()));
  for (auto i = static_cast<TermIndex>(lo_index); i <= static_cast<TermIndex>(hi_index); ++i) out.push_back(i);
}

void unique_sorted(std::vector<TermIndex>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

cd PointFamily::Data::approx_term(TermIndex i) const {
  switch (kind) {
    case FamilyKind::Finite:
      return points[i % points.size()].value();
    case FamilyKind::Power:
      return offset.value() + scale.value() * std::pow(static_cast<double>(i) + 1.0, -p);
    case FamilyKind::Geometric:
      return offset.value() + scale.value() * std::pow(ratio.value(), static_cast<double>(i));
    case FamilyKind::Cluster: {
      auto [m, n] = split(i);
      cd mu = centers->data_->approx_term(m);
      cd nu = spread->data_->approx_term(n);
      cd w = mode == SpreadMode::Additive ? cd(1.0, 0.0) : mu - anchor.value();
      return mu + w * nu;
    }
  }
  return {};
}

// First index from which every term lies within eta of the offset (Power, Geometric).
std::size_t PointFamily::Data::tail_start(double eta) const {
  if (!(eta > 0)) throw Error(ErrorCode::ComputationLimit, "tail bound needs a positive radius");
  if (kind == FamilyKind::Power) {
    double x = std::pow(s / eta, 1.0 / p);
    check_budget(x);
    return static_cast<std::size_t>(std::floor(x)) + 2;
  }
  if (kind == FamilyKind::Geometric) return tail_start_log(std::log(eta));
  throw Error(ErrorCode::ComputationLimit, "tail bound requested for a family without a single limit");
}

std::size_t PointFamily::Data::tail_start_log(double log_eta) const {
  double log_s = std::log(s);
  if (log_s < log_eta) return 0;
  double x = (log_eta - log_s) / std::log(rho);
  check_budget(x);
  return static_cast<std::size_t>(std::floor(x)) + 2;
}

std::pair<TermIndex, TermIndex> PointFamily::Data::split(TermIndex i) const {
  auto lc = centers->period();
  auto ls = spread->period();
  if (lc && ls) return {i % *lc, (i / *lc) % *ls};
  if (lc) return {i % *lc, i / *lc};
  if (ls) return {i / *ls, i % *ls};
  // Cantor pairing for two infinite families.
  auto w = static_cast<TermIndex>((std::sqrt(8.0 * static_cast<double>(i) + 1.0) - 1.0) / 2.0);
  while (w * (w + 1) / 2 > i) --w;
  while ((w + 1) * (w + 2) / 2 <= i) ++w;
  TermIndex n = i - w * (w + 1) / 2;
  return {w - n, n};
}

TermIndex PointFamily::Data::join(TermIndex m, TermIndex n) const {
  auto lc = centers->period();
  auto ls = spread->period();
  if (lc) return m + *lc * n;
  if (ls) return n + *ls * m;
  TermIndex w = m + n;
  return w * (w + 1) / 2 + n;
}

// Power terms lie on the ray offset + t * unit with t_i = s * (i+1)^(-p). Returns
// indices whose t_i may fall in [t_lo, t_hi], padded by two on either side.
std::vector<TermIndex> PointFamily::Data::power_indices(double t_lo, double t_hi) const {
  std::vector<TermIndex> out;
  if (t_hi < t_lo) return out;
  if (!(t_lo > 0)) throw Error(ErrorCode::ComputationLimit, "enumeration window meets an accumulation point");
  double first = t_hi >= s ? 0.0 : std::floor(std::pow(s / t_hi, 1.0 / p)) - 2.0;
  double last = std::ceil(std::pow(s / t_lo, 1.0 / p)) + 1.0;
  append_range(out, first, last);
  return out;
}

std::vector<TermIndex> PointFamily::Data::cluster_box(double delta) const {
  if (!(delta > 0)) throw Error(ErrorCode::ComputationLimit, "enumeration window meets an accumulation point");
  const auto& c = *centers;
  const auto& sp = *spread;
  double v = sp.sup_modulus();
  double w = mode == SpreadMode::Additive ? 1.0 : c.sup_modulus() + anchor.abs();
  double k = mode == SpreadMode::Additive ? 1.0 : 1.0 + v;
  std::size_t n_count = sp.period() ? *sp.period() : (w > 0 ? sp.data_->tail_start(delta / w) : 1);
  std::size_t m_count = c.period() ? *c.period() : c.data_->tail_start(delta / k);
  check_budget(static_cast<double>(n_count) * static_cast<double>(m_count));
  std::vector<TermIndex> out;
  out.reserve(n_count * m_count);
  for (TermIndex m = 0; m < m_count; ++m) {
    for (TermIndex n = 0; n < n_count; ++n) out.push_back(join(m, n));
  }
  unique_sorted(out);
  return out;
}

// Terms with modulus in [lo, hi], given that the boundary circles stay delta away from
// every accumulation point. Only centers whose sub-cluster can reach the band are visited,
// and each contributes the spread indices whose displacement is at least delta.
std::vector<TermIndex> PointFamily::Data::cluster_band(double lo, double hi, double delta) const {
  if (!(delta > 0)) throw Error(ErrorCode::ComputationLimit, "enumeration window meets an accumulation point");
  const auto& c = *centers;
  const auto& sp = *spread;
  double v = sp.sup_modulus();
  double a = mode == SpreadMode::Additive ? 0.0 : anchor.abs();
  double c_lo = 0.0;
  double c_hi = 0.0;
  if (mode == SpreadMode::Additive) {
    c_lo = lo - v;
    c_hi = hi + v;
  } else {
    if (!(v < 1.0)) return cluster_box(delta);
    // |mu + (mu - anchor) nu| lies within |mu| -+ (|mu| + |anchor|) v.
    c_lo = (lo - a * v) / (1.0 + v);
    c_hi = (hi + a * v) / (1.0 - v);
  }
  double slack = band_slack(c_hi);
  std::vector<TermIndex> ms;
  try {
    ms = c.terms_in_band(std::max(0.0, c_lo - slack), c_hi + slack);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ComputationLimit) throw;
    return cluster_box(delta);
  }
  std::vector<TermIndex> out;
  for (TermIndex m : ms) {
    double w = mode == SpreadMode::Additive ? 1.0 : std::abs(c.data_->approx_term(m) - anchor.value());
    std::size_t n_count = sp.period() ? *sp.period() : (w > 0 ? sp.data_->tail_start(delta / w) : 1);
    check_budget(static_cast<double>(out.size() + n_count));
    for (TermIndex n = 0; n < n_count; ++n) out.push_back(join(m, n));
  }
  unique_sorted(out);
  return out;
}

// Terms within `radius` of z, given that z stays `delta` away from every accumulation point.
// Spread terms smaller than delta cannot reach z, so only finitely many spread indices n
// matter, and for each of them the matching centers solve a single-family query.
std::vector<TermIndex> PointFamily::Data::cluster_near(const ComplexScalar& z, double radius, double delta) const {
  if (!(delta > 0)) throw Error(ErrorCode::ComputationLimit, "enumeration window meets an accumulation point");
  const auto& c = *centers;
  const auto& sp = *spread;
  bool exact = radius == 0 && z.exact() && anchor.exact();
  double slack = 1e-9 * (1.0 + z.abs());
  std::vector<TermIndex> out;
  if (c.period() && !sp.period()) {
    // Few centers: solve for the spread term directly at each of them.
    for (TermIndex m = 0; m < *c.period(); ++m) {
      ComplexScalar mu = c.term(m);
      ComplexScalar target = z - mu;
      double reach = radius;
      if (mode == SpreadMode::Relative) {
        ComplexScalar scale = mu - anchor;
        if (scale.abs() == 0.0) {
          if (point_distance(mu, z) <= radius + slack) out.push_back(join(m, 0));
          continue;
        }
        target = target / scale;
        reach = radius / scale.abs();
      }
      if (!exact || !target.exact()) reach += slack;
      double acc_gap = std::numeric_limits<double>::infinity();
      for (const auto& g : sp.accumulation()) acc_gap = std::min(acc_gap, g.distance_to(target));
      if (acc_gap <= reach) continue;  // the limit of this sub-cluster is its center, already excluded by delta
      for (TermIndex n : sp.terms_near(target, reach)) out.push_back(join(m, n));
    }
    unique_sorted(out);
    return out;
  }
  double w = mode == SpreadMode::Additive ? 1.0 : c.sup_modulus() + anchor.abs();
  double v = sp.sup_modulus();
  if (mode == SpreadMode::Relative && v < 1.0) {
    // A reaching term has |mu - anchor| <= |z - anchor| + |mu - z| <= |z - anchor| + |mu - anchor| v + radius.
    w = std::min(w, (point_distance(z, anchor) + radius) / (1.0 - v) * (1.0 + 1e-9));
  }
  std::size_t n_count = sp.period() ? *sp.period() : (w > 0 ? sp.data_->tail_start(delta / w) : 1);
  check_budget(static_cast<double>(n_count));
  for (TermIndex n = 0; n < n_count; ++n) {
    ComplexScalar nu = sp.term(n);
    // Relative terms are mu (1 + nu) - anchor nu.
    ComplexScalar target = z - nu;
    double reach = radius;
    if (mode == SpreadMode::Relative) {
      ComplexScalar factor = ComplexScalar(1) + nu;
      if (factor.abs() < 1e-12) return cluster_box(delta);
      target = (z + anchor * nu) / factor;
      reach = radius / factor.abs();
    }
    std::vector<TermIndex> ms = exact && target.exact() ? c.terms_near(target, 0.0) : c.terms_near(target, reach + slack);
    for (TermIndex m : ms) out.push_back(join(m, n));
  }
  unique_sorted(out);
  return out;
}

PointFamily PointFamily::finite(std::vector<ComplexScalar> points) {
  if (points.empty()) throw Error(ErrorCode::MalformedFamily, "finite family needs at least one point");
  auto d = std::make_shared<Data>();
  d->kind = FamilyKind::Finite;
  d->points = std::move(points);
  return PointFamily(d);
}

PointFamily PointFamily::power(const ComplexScalar& scale, const Rational& exponent, const ComplexScalar& offset) {
  if (exponent <= 0) throw Error(ErrorCode::MalformedFamily, "power family needs a positive exponent");
  if (scale.is_zero()) return constant(offset);
  auto d = std::make_shared<Data>();
  d->kind = FamilyKind::Power;
  d->scale = scale;
  d->exponent = exponent;
  d->offset = offset;
  d->s = scale.abs();
  d->unit = scale.value() / d->s;
  d->p = exponent.get_d();
  d->integer_exponent = exponent.get_den() == 1 && exponent.get_num().fits_ulong_p();
  d->p_int = d->integer_exponent ? exponent.get_num().get_ui() : 0;
  return PointFamily(d);
}

PointFamily PointFamily::geometric(const ComplexScalar& scale, const ComplexScalar& ratio, const ComplexScalar& offset) {
  bool bad_ratio = ratio.is_zero() || (ratio.exact() ? ratio.norm2() >= 1 : ratio.abs() >= 1.0);
  if (bad_ratio) throw Error(ErrorCode::MalformedFamily, "geometric family needs 0 < |r| < 1");
  if (scale.is_zero()) return constant(offset);
  auto d = std::make_shared<Data>();
  d->kind = FamilyKind::Geometric;
  d->scale = scale;
  d->ratio = ratio;
  d->offset = offset;
  d->s = scale.abs();
  d->unit = scale.value() / d->s;
  d->rho = ratio.abs();
  return PointFamily(d);
}

PointFamily PointFamily::cluster(const PointFamily& centers, const PointFamily& spread, SpreadMode mode,
                                 const ComplexScalar& anchor) {
  if (centers.kind() == FamilyKind::Cluster || spread.kind() == FamilyKind::Cluster) {
    throw Error(ErrorCode::MalformedFamily, "cluster centers and spread must not be clusters");
  }
  if (spread.kind() != FamilyKind::Finite && !spread.offset().is_zero()) {
    throw Error(ErrorCode::MalformedFamily, "cluster spread must accumulate only at 0");
  }
  if (mode == SpreadMode::Relative) {
    auto hits = [](const PointFamily& f, const ComplexScalar& z) {
      if (f.kind() != FamilyKind::Finite && same_point(f.offset(), z, 0.0)) return false;
      for (TermIndex i : f.terms_near(z, 0.0)) {
        if (same_point(f.term(i), z, 1e-12)) return true;
      }
      return false;
    };
    if (hits(centers, anchor)) throw Error(ErrorCode::MalformedFamily, "relative cluster anchor coincides with a center");
    if (hits(spread, ComplexScalar(-1))) throw Error(ErrorCode::MalformedFamily, "relative cluster spread contains -1");
  }
  auto d = std::make_shared<Data>();
  d->kind = FamilyKind::Cluster;
  d->centers = centers;
  d->spread = spread;
  d->mode = mode;
  d->anchor = mode == SpreadMode::Relative ? anchor : ComplexScalar();
  return PointFamily(d);
}

FamilyKind PointFamily::kind() const { return data_->kind; }
const std::vector<ComplexScalar>& PointFamily::points() const { return data_->points; }
const ComplexScalar& PointFamily::scale() const { return data_->scale; }
const Rational& PointFamily::exponent() const { return data_->exponent; }
const ComplexScalar& PointFamily::ratio() const { return data_->ratio; }
const ComplexScalar& PointFamily::offset() const { return data_->offset; }
const PointFamily& PointFamily::centers() const { return *data_->centers; }
const PointFamily& PointFamily::spread() const { return *data_->spread; }
SpreadMode PointFamily::mode() const { return data_->mode; }
const ComplexScalar& PointFamily::anchor() const { return data_->anchor; }

ComplexScalar PointFamily::term(TermIndex i) const {
  const Data& d = *data_;
  switch (d.kind) {
    case FamilyKind::Finite:
      return d.points[i % d.points.size()];
    case FamilyKind::Power: {
      if (exact()) {
        mpz_class n = static_cast<unsigned long>(i) + 1UL;
        mpz_class np;
        mpz_pow_ui(np.get_mpz_t(), n.get_mpz_t(), d.p_int);
        return d.offset + d.scale * ComplexScalar(Rational(mpz_class(1), np));
      }
      return ComplexScalar::approximate(d.approx_term(i));
    }
    case FamilyKind::Geometric:
      if (exact()) return d.offset + d.scale * d.ratio.pow(i);
      return ComplexScalar::approximate(d.approx_term(i));
    case FamilyKind::Cluster: {
      auto [m, n] = d.split(i);
      ComplexScalar mu = d.centers->term(m);
      ComplexScalar nu = d.spread->term(n);
      ComplexScalar w = d.mode == SpreadMode::Additive ? ComplexScalar(1) : mu - d.anchor;
      return mu + w * nu;
    }
  }
  return {};
}

bool PointFamily::is_finite_set() const {
  switch (data_->kind) {
    case FamilyKind::Finite: return true;
    case FamilyKind::Cluster: return data_->centers->is_finite_set() && data_->spread->is_finite_set();
    default: return false;
  }
}

std::optional<std::size_t> PointFamily::period() const {
  if (data_->kind == FamilyKind::Finite) return data_->points.size();
  if (data_->kind == FamilyKind::Cluster && is_finite_set()) {
    return *data_->centers->period() * *data_->spread->period();
  }
  return std::nullopt;
}

bool PointFamily::exact() const {
  const Data& d = *data_;
  switch (d.kind) {
    case FamilyKind::Finite:
      return std::all_of(d.points.begin(), d.points.end(), [](const ComplexScalar& z) { return z.exact(); });
    case FamilyKind::Power:
      return d.integer_exponent && d.scale.exact() && d.offset.exact();
    case FamilyKind::Geometric:
      return d.scale.exact() && d.ratio.exact() && d.offset.exact();
    case FamilyKind::Cluster:
      return d.centers->exact() && d.spread->exact() && d.anchor.exact();
  }
  return false;
}

std::optional<ComplexScalar> PointFamily::constant_value() const {
  if (data_->kind != FamilyKind::Finite) return std::nullopt;
  const auto& pts = data_->points;
  for (const auto& z : pts) {
    if (!same_point(z, pts.front(), 0.0)) return std::nullopt;
  }
  return pts.front();
}

double PointFamily::sup_modulus() const {
  const Data& d = *data_;
  switch (d.kind) {
    case FamilyKind::Finite: {
      double m = 0;
      for (const auto& z : d.points) m = std::max(m, z.abs());
      return m;
    }
    case FamilyKind::Power:
    case FamilyKind::Geometric:
      return d.offset.abs() + d.s;
    case FamilyKind::Cluster: {
      double c = d.centers->sup_modulus();
      double w = d.mode == SpreadMode::Additive ? 1.0 : c + d.anchor.abs();
      return c + w * d.spread->sup_modulus();
    }
  }
  return 0;
}

std::vector<PointFamily> PointFamily::accumulation() const {
  const Data& d = *data_;
  switch (d.kind) {
    case FamilyKind::Finite:
      return {};
    case FamilyKind::Power:
    case FamilyKind::Geometric:
      return {constant(d.offset)};
    case FamilyKind::Cluster: {
      std::vector<PointFamily> out;
      const PointFamily& c = *d.centers;
      const PointFamily& sp = *d.spread;
      bool spread_infinite = !sp.is_finite_set();
      if (spread_infinite) {
        // Every center is a limit of its own sub-cluster (w_m != 0 by validation).
        out.push_back(c);
        for (auto& f : c.accumulation()) out.push_back(f);
      }
      if (!c.is_finite_set()) {
        // Centers converge to c0; the rows converge to c0 + w* nu_n.
        const ComplexScalar& c0 = c.offset();
        ComplexScalar w_star = d.mode == SpreadMode::Additive ? ComplexScalar(1) : c0 - d.anchor;
        if (w_star.is_zero()) {
          out.push_back(constant(c0));
        } else {
          out.push_back(sp.affine(w_star, c0));
          if (spread_infinite) out.push_back(constant(c0));
        }
      }
      return out;
    }
  }
  return {};
}

std::vector<TermIndex> PointFamily::terms_in_band(double lo, double hi) const {
  const Data& d = *data_;
  std::vector<TermIndex> candidates;
  switch (d.kind) {
    case FamilyKind::Finite:
      for (TermIndex i = 0; i < d.points.size(); ++i) candidates.push_back(i);
      break;
    case FamilyKind::Power: {
      cd b = d.offset.value();
      double beta = std::real(b * std::conj(d.unit));
      double b2 = std::norm(b);
      auto roots = [&](double r) -> std::optional<std::pair<double, double>> {
        double disc = beta * beta - b2 + r * r;
        if (disc < 0) return std::nullopt;
        double sq = std::sqrt(disc);
        return std::make_pair(-beta - sq, -beta + sq);
      };
      auto outer = roots(hi);
      if (!outer) return {};
      double x = std::max(outer->first, 0.0);
      double y = std::min(outer->second, d.s);
      std::vector<std::pair<double, double>> pieces;
      auto inner = lo > 0 ? roots(lo) : std::nullopt;
      if (inner) {
        pieces.emplace_back(x, std::min(y, inner->first));
        pieces.emplace_back(std::max(x, inner->second), y);
      } else {
        pieces.emplace_back(x, y);
      }
      for (auto [a, bnd] : pieces) {
        if (bnd < a) continue;
        auto part = d.power_indices(a, bnd);
        candidates.insert(candidates.end(), part.begin(), part.end());
      }
      unique_sorted(candidates);
      break;
    }
    case FamilyKind::Geometric: {
      double m = d.offset.abs();
      double delta = m < lo ? lo - m : (m > hi ? m - hi : 0.0);
      if (!(delta > 0)) throw Error(ErrorCode::ComputationLimit, "enumeration band meets an accumulation point");
      std::size_t count = d.tail_start(delta);
      for (TermIndex i = 0; i < count; ++i) candidates.push_back(i);
      break;
    }
    case FamilyKind::Cluster: {
      double delta = std::numeric_limits<double>::infinity();
      for (const auto& g : accumulation()) {
        delta = std::min(delta, g.distance_to_circle(Rational(hi)));
        delta = std::min(delta, g.distance_to_circle(Rational(lo)));
      }
      if (!std::isfinite(delta)) {
        for (TermIndex i = 0; i < *period(); ++i) candidates.push_back(i);
      } else {
        candidates = d.cluster_band(lo, hi, delta);
      }
      break;
    }
  }
  double slack = band_slack(hi);
  std::vector<TermIndex> out;
  for (TermIndex i : candidates) {
    double m = std::abs(d.approx_term(i));
    if (m >= lo - slack && m <= hi + slack) out.push_back(i);
  }
  return out;
}

std::vector<TermIndex> PointFamily::terms_near(const ComplexScalar& z, double radius) const {
  const Data& d = *data_;
  cd zv = z.value();
  std::vector<TermIndex> candidates;
  switch (d.kind) {
    case FamilyKind::Finite:
      for (TermIndex i = 0; i < d.points.size(); ++i) candidates.push_back(i);
      break;
    case FamilyKind::Power: {
      cd bz = d.offset.value() - zv;
      double beta = std::real(bz * std::conj(d.unit));
      double c0 = std::norm(bz) - radius * radius;
      double disc = beta * beta - c0;
      double slack = 1e-9 * (1.0 + std::abs(bz) + d.s);
      if (disc < -slack) return {};
      double sq = std::sqrt(std::max(disc, 0.0));
      if (-beta - sq <= 0 && -beta + sq >= 0) {
        throw Error(ErrorCode::ComputationLimit, "point lies at an accumulation point");
      }
      // Widened by the slack so a hit on the largest term survives rounding in beta.
      double a = std::max(-beta - sq - slack, 0.5 * std::max(-beta - sq, 0.0));
      double bnd = std::min(-beta + sq + slack, d.s);
      if (bnd < a || bnd <= 0) return {};
      candidates = d.power_indices(a, bnd);
      break;
    }
    case FamilyKind::Geometric: {
      if (radius == 0 && z.exact() && d.offset.exact()) {
        if (same_point(z, d.offset, 0.0)) throw Error(ErrorCode::ComputationLimit, "point lies at an accumulation point");
        // Moduli |term - offset| strictly decrease, so only the index matching |z - offset| can hit.
        double x = (log_distance(d.offset, z) - std::log(d.s)) / std::log(d.rho);
        check_budget(x);
        if (x < -1) return {};
        auto mid = static_cast<TermIndex>(std::max(0.0, std::round(x)));
        for (TermIndex i = mid > 0 ? mid - 1 : 0; i <= mid + 1; ++i) candidates.push_back(i);
        break;
      }
      double delta = point_distance(d.offset, z) - radius;
      if (!(delta > 0)) throw Error(ErrorCode::ComputationLimit, "point lies at an accumulation point");
      std::size_t count = d.tail_start(delta * (1.0 - 1e-9));
      for (TermIndex i = 0; i < count; ++i) candidates.push_back(i);
      break;
    }
    case FamilyKind::Cluster: {
      double dist = std::numeric_limits<double>::infinity();
      for (const auto& g : accumulation()) dist = std::min(dist, g.distance_to(z));
      if (!std::isfinite(dist)) {
        for (TermIndex i = 0; i < *period(); ++i) candidates.push_back(i);
      } else {
        candidates = d.cluster_near(z, radius, dist - radius);
      }
      break;
    }
  }
  double slack = 1e-9 * (1.0 + std::abs(zv));
  std::vector<TermIndex> out;
  for (TermIndex i : candidates) {
    if (std::abs(d.approx_term(i) - zv) <= radius + slack) out.push_back(i);
  }
  return out;
}

double PointFamily::distance_to(const ComplexScalar& z) const {
  const Data& d = *data_;
  double best = std::numeric_limits<double>::infinity();
  auto consider = [&](TermIndex i) { best = std::min(best, point_distance(term(i), z)); };
  switch (d.kind) {
    case FamilyKind::Finite:
      for (const auto& w : d.points) best = std::min(best, point_distance(w, z));
      return best;
    case FamilyKind::Power: {
      best = point_distance(d.offset, z);
      if (best == 0) return 0;
      consider(0);
      double t_star = std::real((z.value() - d.offset.value()) * std::conj(d.unit));
      if (t_star > 0 && t_star < d.s) {
        for (TermIndex i : d.power_indices(t_star, t_star)) consider(i);
      }
      return best;
    }
    case FamilyKind::Geometric: {
      best = point_distance(d.offset, z);
      if (best == 0) return 0;
      std::size_t count = d.tail_start(kDistanceFraction * best);
      for (TermIndex i = 0; i < count; ++i) consider(i);
      return best;
    }
    case FamilyKind::Cluster: {
      for (const auto& g : accumulation()) best = std::min(best, g.distance_to(z));
      if (best == 0) return 0;
      std::vector<TermIndex> candidates;
      if (!std::isfinite(best)) {
        for (TermIndex i = 0; i < *period(); ++i) candidates.push_back(i);
      } else {
        candidates = d.cluster_box(kDistanceFraction * best);
      }
      cd zv = z.value();
      for (TermIndex i : candidates) {
        double approx = std::abs(d.approx_term(i) - zv);
        if (approx < best + 1e-9) consider(i);
      }
      return best;
    }
  }
  return best;
}

double PointFamily::distance_to_circle(const Rational& radius) const {
  const Data& d = *data_;
  double best = std::numeric_limits<double>::infinity();
  auto consider = [&](TermIndex i) { best = std::min(best, circle_distance(term(i), radius)); };
  double r = radius.get_d();
  switch (d.kind) {
    case FamilyKind::Finite:
      for (const auto& w : d.points) best = std::min(best, circle_distance(w, radius));
      return best;
    case FamilyKind::Power: {
      best = circle_distance(d.offset, radius);
      if (best == 0) return 0;
      consider(0);
      // |offset + t unit| is convex in t, so the closest terms bracket the
      // crossings with the circle or the vertex of the modulus.
      cd b = d.offset.value();
      double beta = std::real(b * std::conj(d.unit));
      std::vector<double> critical{-beta};
      double disc = beta * beta - std::norm(b) + r * r;
      if (disc >= 0) {
        critical.push_back(-beta - std::sqrt(disc));
        critical.push_back(-beta + std::sqrt(disc));
      }
      for (double t : critical) {
        if (t > 0 && t < d.s) {
          for (TermIndex i : d.power_indices(t, t)) consider(i);
        }
      }
      return best;
    }
    case FamilyKind::Geometric: {
      best = circle_distance(d.offset, radius);
      if (best == 0) return 0;
      std::size_t count = d.tail_start(kDistanceFraction * best);
      for (TermIndex i = 0; i < count; ++i) consider(i);
      return best;
    }
    case FamilyKind::Cluster: {
      for (const auto& g : accumulation()) best = std::min(best, g.distance_to_circle(radius));
      if (best == 0) return 0;
      if (!std::isfinite(best)) {
        for (TermIndex i = 0; i < *period(); ++i) consider(i);
        return best;
      }
      // Widen a band around the circle until it holds a term closer than its half-width;
      // narrow bands keep the enumeration away from the accumulation points.
      double eta = best * (1.0 - kDistanceFraction);
      double reach = std::min(eta, std::max(1e-6 * eta, 1e-12 * r));
      while (true) {
        for (TermIndex i : terms_in_band(std::max(0.0, r - reach), r + reach)) consider(i);
        if (best <= reach || reach >= eta) return best;
        reach = std::min(4.0 * reach, eta);
      }
    }
  }
  return best;
}

PointFamily PointFamily::affine(const ComplexScalar& alpha, const ComplexScalar& beta) const {
  const Data& d = *data_;
  if (alpha.is_zero()) return constant(beta);
  switch (d.kind) {
    case FamilyKind::Finite: {
      std::vector<ComplexScalar> pts;
      pts.reserve(d.points.size());
      for (const auto& z : d.points) pts.push_back(alpha * z + beta);
      return finite(std::move(pts));
    }
    case FamilyKind::Power:
      return power(alpha * d.scale, d.exponent, alpha * d.offset + beta);
    case FamilyKind::Geometric:
      return geometric(alpha * d.scale, d.ratio, alpha * d.offset + beta);
    case FamilyKind::Cluster: {
      // Relative weights scale with the centers, so the spread is unchanged there.
      PointFamily c = d.centers->affine(alpha, beta);
      PointFamily sp = d.mode == SpreadMode::Additive ? d.spread->affine(alpha, ComplexScalar()) : *d.spread;
      return cluster(c, sp, d.mode, alpha * d.anchor + beta);
    }
  }
  return *this;
}

bool PointFamily::operator==(const PointFamily& other) const {
  if (data_ == other.data_) return true;
  const Data& a = *data_;
  const Data& b = *other.data_;
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case FamilyKind::Finite:
      if (a.points.size() != b.points.size()) return false;
      for (std::size_t i = 0; i < a.points.size(); ++i) {
        if (!a.points[i].identical(b.points[i])) return false;
      }
      return true;
    case FamilyKind::Power:
      return a.scale.identical(b.scale) && a.exponent == b.exponent && a.offset.identical(b.offset);
    case FamilyKind::Geometric:
      return a.scale.identical(b.scale) && a.ratio.identical(b.ratio) && a.offset.identical(b.offset);
    case FamilyKind::Cluster:
      return a.mode == b.mode && a.anchor.identical(b.anchor) && *a.centers == *b.centers &&
             *a.spread == *b.spread;
  }
  return false;
}

std::string PointFamily::describe() const {
  const Data& d = *data_;
  std::ostringstream os;
  switch (d.kind) {
    case FamilyKind::Finite: {
      os << "finite{";
      for (std::size_t i = 0; i < d.points.size(); ++i) os << (i ? ", " : "") << d.points[i].to_string();
      os << "}";
      break;
    }
    case FamilyKind::Power:
      os << "power(c=" << d.scale.to_string() << ", p=" << agd::to_string(d.exponent);
      if (!d.offset.is_zero()) os << ", offset=" << d.offset.to_string();
      os << ")";
      break;
    case FamilyKind::Geometric:
      os << "geometric(c=" << d.scale.to_string() << ", r=" << d.ratio.to_string();
      if (!d.offset.is_zero()) os << ", offset=" << d.offset.to_string();
      os << ")";
      break;
    case FamilyKind::Cluster:
      os << "cluster(centers=" << d.centers->describe() << ", spread=" << d.spread->describe();
      if (d.mode == SpreadMode::Relative) os << ", relative to " << d.anchor.to_string();
      os << ")";
      break;
  }
  return os.str();
}

}  // namespace agd
