#include "agd/operator_model.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "agd/error.hpp"

namespace agd {

namespace {

bool exactly_equal(const ComplexScalar& a, const ComplexScalar& b) {
  return a.exact() && b.exact() && same_point(a, b, 0.0);
}

ComplexScalar apply(AlgebraKind kind, const ComplexScalar& a, const ComplexScalar& b) {
  switch (kind) {
    case AlgebraKind::Add: return a + b;
    case AlgebraKind::Subtract: return a - b;
    case AlgebraKind::Multiply: return a * b;
  }
  return a;
}

RationalMap apply(AlgebraKind kind, const RationalMap& a, const RationalMap& b) {
  switch (kind) {
    case AlgebraKind::Add: return a + b;
    case AlgebraKind::Subtract: return a - b;
    case AlgebraKind::Multiply: return a * b;
  }
  return a;
}

// p(g(z)) by Horner's rule.
Polynomial compose(const Polynomial& p, const Polynomial& g) {
  Polynomial out;
  const auto& c = p.coefficients();
  for (auto it = c.rbegin(); it != c.rend(); ++it) out = out * g + Polynomial::constant(*it);
  return out;
}

RationalMap compose(const RationalMap& m, const Polynomial& g) {
  return RationalMap(compose(m.numerator(), g), compose(m.denominator(), g));
}

// (coefficient, k) when the map is z -> coefficient * z^k with k >= 1.
std::optional<std::pair<ComplexScalar, unsigned long>> as_monomial(const RationalMap& m) {
  if (m.denominator().degree() != 0 || m.numerator().degree() < 1) return std::nullopt;
  const auto& c = m.numerator().coefficients();
  for (std::size_t i = 0; i + 1 < c.size(); ++i) {
    if (!c[i].is_zero()) return std::nullopt;
  }
  return std::make_pair(c.back() / m.denominator().leading(), static_cast<unsigned long>(c.size() - 1));
}

std::size_t checked_lcm(std::size_t a, std::size_t b) {
  std::size_t l = std::lcm(a, b);
  if (l > kEnumerationLimit) throw Error(ErrorCode::ComputationLimit, "combined period exceeds the enumeration limit");
  return l;
}

// Largest power of a shared ratio we look for when relating geometric families.
constexpr unsigned long kMaxRelatedPower = 64;

// beta + alpha * ((z - offset) / scale)^k, the polynomial taking the terms of a
// family with the given scale and offset to those of a related one.
Polynomial power_relation(const ComplexScalar& alpha, const ComplexScalar& beta, const ComplexScalar& scale,
                          const ComplexScalar& offset, unsigned long k) {
  Polynomial u({-offset / scale, ComplexScalar(1) / scale});
  Polynomial out = Polynomial::constant(1);
  for (unsigned long i = 0; i < k; ++i) out = out * u;
  return out.scaled(alpha) + Polynomial::constant(beta);
}

// A polynomial g with from.term(i) = g(to.term(i)) for every i.
std::optional<Polynomial> relate(const PointFamily& from, const PointFamily& to) {
  if (auto c = from.constant_value()) return Polynomial::constant(*c);
  if (from.kind() != to.kind()) return std::nullopt;
  switch (from.kind()) {
    case FamilyKind::Power: {
      Rational k = from.exponent() / to.exponent();
      if (k.get_den() != 1 || !k.get_num().fits_ulong_p()) return std::nullopt;
      return power_relation(from.scale(), from.offset(), to.scale(), to.offset(), k.get_num().get_ui());
    }
    case FamilyKind::Geometric: {
      ComplexScalar r = to.ratio();
      for (unsigned long k = 1; k <= kMaxRelatedPower; ++k, r = r * to.ratio()) {
        if (same_point(r, from.ratio(), 1e-15)) {
          return power_relation(from.scale(), from.offset(), to.scale(), to.offset(), k);
        }
        if (r.abs() < from.ratio().abs() * 0.5) break;
      }
      return std::nullopt;
    }
    case FamilyKind::Finite: {
      if (from.points().size() != to.points().size()) return std::nullopt;
      const auto& f = from.points();
      const auto& t = to.points();
      std::size_t j = 1;
      while (j < t.size() && exactly_equal(t[j], t[0])) ++j;
      if (j == t.size()) return std::nullopt;
      ComplexScalar alpha = (f[j] - f[0]) / (t[j] - t[0]);
      ComplexScalar beta = f[0] - alpha * t[0];
      for (std::size_t i = 0; i < t.size(); ++i) {
        if (!same_point(alpha * t[i] + beta, f[i], 1e-12 * (1.0 + f[i].abs()))) return std::nullopt;
      }
      return Polynomial({beta, alpha});
    }
    case FamilyKind::Cluster: {
      // Affine images of one cluster: read alpha and beta off two distinct terms,
      // then confirm structurally.
      ComplexScalar t0 = to.term(0);
      for (TermIndex i = 1; i < 64; ++i) {
        ComplexScalar ti = to.term(i);
        if (exactly_equal(ti, t0)) continue;
        ComplexScalar alpha = (from.term(i) - from.term(0)) / (ti - t0);
        ComplexScalar beta = from.term(0) - alpha * t0;
        if (alpha.is_zero() || !(to.affine(alpha, beta) == from)) return std::nullopt;
        return Polynomial({beta, alpha});
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

// Entrywise result for two pure blocks over unrelated bases, when the catalog has it.
std::optional<PointFamily> catalog_combine(const PointFamily& a, const PointFamily& b, AlgebraKind kind) {
  if (a.kind() == FamilyKind::Finite && b.kind() == FamilyKind::Finite) {
    std::size_t n = checked_lcm(a.points().size(), b.points().size());
    std::vector<ComplexScalar> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) pts.push_back(apply(kind, a.term(i), b.term(i)));
    return PointFamily::finite(std::move(pts));
  }
  if (kind != AlgebraKind::Multiply || a.kind() != b.kind()) return std::nullopt;
  if (!a.offset().is_zero() || !b.offset().is_zero()) return std::nullopt;
  if (a.kind() == FamilyKind::Power) return PointFamily::power(a.scale() * b.scale(), a.exponent() + b.exponent());
  if (a.kind() == FamilyKind::Geometric) return PointFamily::geometric(a.scale() * b.scale(), a.ratio() * b.ratio());
  return std::nullopt;
}

// Cut radii and per-region maps over some base family.
struct Layout {
  std::vector<Rational> cuts;
  std::vector<RationalMap> maps;
};

const RationalMap& map_above(const Layout& l, const std::optional<Rational>& inner) {
  std::size_t r = 0;
  if (inner) r = static_cast<std::size_t>(std::upper_bound(l.cuts.begin(), l.cuts.end(), *inner) - l.cuts.begin());
  return l.maps[r];
}

DiagonalBlock merge(const PointFamily& base, const Layout& a, const Layout& b, AlgebraKind kind,
                    const DiagonalBlock& da, const DiagonalBlock& db) {
  std::vector<Rational> cuts = a.cuts;
  cuts.insert(cuts.end(), b.cuts.begin(), b.cuts.end());
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<RationalMap> maps;
  for (std::size_t r = 0; r <= cuts.size(); ++r) {
    std::optional<Rational> inner;
    if (r > 0) inner = cuts[r - 1];
    maps.push_back(apply(kind, map_above(a, inner), map_above(b, inner)));
  }
  std::map<std::size_t, ComplexScalar> overrides;
  for (const auto& [pos, v] : da.overrides()) overrides[pos] = apply(kind, v, db.entry(pos));
  for (const auto& [pos, v] : db.overrides()) overrides[pos] = apply(kind, da.entry(pos), v);
  return DiagonalBlock(base, std::move(cuts), std::move(maps), std::move(overrides));
}

Layout layout_of(const DiagonalBlock& d) { return {d.cuts(), d.maps()}; }

void require_same_shape(const StructuredOperator& a, const StructuredOperator& b) {
  if (a.matrix().dim() != b.matrix().dim() || a.has_diagonal() != b.has_diagonal()) {
    throw Error(ErrorCode::ShapeMismatch, "operators have different block shapes");
  }
}

}  // namespace

DiagonalBlock::DiagonalBlock(PointFamily base, std::map<std::size_t, ComplexScalar> overrides)
    : DiagonalBlock(std::move(base), {}, {RationalMap::identity()}, std::move(overrides)) {}

DiagonalBlock::DiagonalBlock(PointFamily base, std::vector<Rational> cuts, std::vector<RationalMap> maps,
                             std::map<std::size_t, ComplexScalar> overrides)
    : base_(std::move(base)), cuts_(std::move(cuts)), maps_(std::move(maps)), overrides_(std::move(overrides)) {
  normalize();
}

void DiagonalBlock::normalize() {
  if (maps_.size() != cuts_.size() + 1) {
    throw Error(ErrorCode::MalformedFamily, "a diagonal block needs one map per cut region");
  }
  if (overrides_.count(0)) throw Error(ErrorCode::MalformedFamily, "diagonal positions start at 1");
  for (std::size_t i = 0; i < cuts_.size(); ++i) {
    if (cuts_[i] <= 0) throw Error(ErrorCode::MalformedFamily, "cut radii must be positive");
    if (i > 0 && cuts_[i] <= cuts_[i - 1]) {
      throw Error(ErrorCode::MalformedFamily, "cut radii must be strictly increasing");
    }
    if (base_.distance_to_circle(cuts_[i]) == 0.0) {
      throw Error(ErrorCode::MalformedFamily, "cut circle |z| = " + to_string(cuts_[i]) + " meets the base family");
    }
  }
  // Adjacent regions with one map need no cut between them.
  for (std::size_t i = cuts_.size(); i-- > 0;) {
    if (maps_[i] == maps_[i + 1]) {
      cuts_.erase(cuts_.begin() + static_cast<std::ptrdiff_t>(i));
      maps_.erase(maps_.begin() + static_cast<std::ptrdiff_t>(i) + 1);
    }
  }
  if (auto period = base_.period()) {
    if (!cuts_.empty() || !maps_.front().is_identity() || base_.kind() != FamilyKind::Finite) {
      std::vector<ComplexScalar> pts;
      pts.reserve(*period);
      for (TermIndex i = 0; i < *period; ++i) {
        ComplexScalar v = base_.term(i);
        pts.push_back(map_for(v)(v));
      }
      base_ = PointFamily::finite(std::move(pts));
      cuts_.clear();
      maps_ = {RationalMap::identity()};
    }
    if (auto c = base_.constant_value()) base_ = PointFamily::constant(*c);
  }
  if (cuts_.empty() && !maps_.front().is_identity()) {
    const RationalMap& m = maps_.front();
    if (auto c = m.constant_value()) {
      base_ = PointFamily::constant(*c);
      maps_.front() = RationalMap::identity();
    } else if (auto ab = m.as_affine()) {
      base_ = base_.affine(ab->first, ab->second);
      maps_.front() = RationalMap::identity();
    } else if (auto mono = as_monomial(m); mono && base_.offset().is_zero()) {
      // c z^k keeps power and geometric families in kind.
      if (base_.kind() == FamilyKind::Power) {
        base_ = PointFamily::power(mono->first * base_.scale().pow(mono->second),
                                   base_.exponent() * Rational(mono->second));
        maps_.front() = RationalMap::identity();
      } else if (base_.kind() == FamilyKind::Geometric) {
        base_ = PointFamily::geometric(mono->first * base_.scale().pow(mono->second), base_.ratio().pow(mono->second));
        maps_.front() = RationalMap::identity();
      }
    }
  }
  for (auto it = overrides_.begin(); it != overrides_.end();) {
    ComplexScalar v = base_.term(it->first - 1);
    if (exactly_equal(it->second, map_for(v)(v))) {
      it = overrides_.erase(it);
    } else {
      ++it;
    }
  }
}

bool DiagonalBlock::exact() const {
  if (!base_.exact()) return false;
  for (const auto& m : maps_) {
    if (!m.exact()) return false;
  }
  for (const auto& [pos, v] : overrides_) {
    if (!v.exact()) return false;
  }
  return true;
}

const RationalMap& DiagonalBlock::map_for(const ComplexScalar& base_value) const {
  std::size_t r = 0;
  while (r < cuts_.size() && compare_modulus(base_value, cuts_[r]) > 0) ++r;
  return maps_[r];
}

ComplexScalar DiagonalBlock::entry(std::size_t position) const {
  if (position == 0) throw Error(ErrorCode::ShapeMismatch, "diagonal positions start at 1");
  if (auto it = overrides_.find(position); it != overrides_.end()) return it->second;
  ComplexScalar v = base_.term(position - 1);
  return map_for(v)(v);
}

ModulusWindow DiagonalBlock::region(std::size_t r) const {
  ModulusWindow w;
  if (r > 0) w.inner = cuts_[r - 1];
  if (r < cuts_.size()) w.outer = cuts_[r];
  return w;
}

SpectralSet DiagonalBlock::spectrum() const {
  std::vector<TermIndex> excluded;
  std::vector<ComplexScalar> replaced;
  for (const auto& [pos, v] : overrides_) {
    excluded.push_back(pos - 1);
    replaced.push_back(v);
  }
  std::vector<SpectralPiece> pieces;
  for (std::size_t r = 0; r < maps_.size(); ++r) pieces.emplace_back(base_, region(r), maps_[r], excluded);
  if (!replaced.empty()) pieces.emplace_back(PointFamily::finite(replaced));
  return SpectralSet(std::move(pieces));
}

bool DiagonalBlock::is_zero() const {
  for (const auto& [pos, v] : overrides_) {
    if (!v.is_zero()) return false;
  }
  std::vector<TermIndex> excluded;
  for (const auto& [pos, v] : overrides_) excluded.push_back(pos - 1);
  for (std::size_t r = 0; r < maps_.size(); ++r) {
    if (maps_[r].is_zero()) continue;
    SpectralPiece piece(base_, region(r), maps_[r], excluded);
    if (piece.is_empty()) continue;
    // A nonzero rational map vanishes at finitely many points only.
    if (!piece.is_finite()) return false;
    for (const auto& z : piece.finite_points()) {
      if (!z.is_zero()) return false;
    }
  }
  return true;
}

std::string DiagonalBlock::describe() const {
  std::ostringstream os;
  os << "diag " << base_.describe();
  if (!pure()) {
    os << " mapped by";
    for (std::size_t r = 0; r < maps_.size(); ++r) {
      std::string w = region(r).to_string();
      os << (r ? "; " : " ") << maps_[r].to_string();
      if (!w.empty()) os << " on " << w;
    }
  }
  if (!overrides_.empty()) {
    os << " with";
    bool first = true;
    for (const auto& [pos, v] : overrides_) {
      os << (first ? " " : ", ") << "d_" << pos << " = " << v.to_string();
      first = false;
    }
  }
  return os.str();
}

DiagonalBlock combine(const DiagonalBlock& a, const DiagonalBlock& b, AlgebraKind kind) {
  if (a.base() == b.base()) return merge(a.base(), layout_of(a), layout_of(b), kind, a, b);
  if (a.pure() && b.pure()) {
    if (auto f = catalog_combine(a.base(), b.base(), kind)) {
      std::map<std::size_t, ComplexScalar> overrides;
      for (const auto& [pos, v] : a.overrides()) overrides[pos] = apply(kind, v, b.entry(pos));
      for (const auto& [pos, v] : b.overrides()) overrides[pos] = apply(kind, a.entry(pos), v);
      return DiagonalBlock(*f, std::move(overrides));
    }
  }
  if (b.cuts().empty()) {
    if (auto rel = relate(b.base(), a.base())) {
      Layout lb{{}, {compose(b.maps().front(), *rel)}};
      return merge(a.base(), layout_of(a), lb, kind, a, b);
    }
  }
  if (a.cuts().empty()) {
    if (auto rel = relate(a.base(), b.base())) {
      Layout la{{}, {compose(a.maps().front(), *rel)}};
      return merge(b.base(), la, layout_of(b), kind, a, b);
    }
  }
  throw Error(ErrorCode::FamilyNotClosed,
              "entrywise result of " + a.describe() + " and " + b.describe() + " leaves the family catalog");
}

DiagonalBlock reciprocal(const DiagonalBlock& d) {
  if (contains(d.spectrum(), ComplexScalar())) {
    throw Error(ErrorCode::NotInvertible, "0 lies in the spectrum of " + d.describe());
  }
  std::vector<RationalMap> maps;
  for (const auto& m : d.maps()) maps.push_back(m.reciprocal());
  std::map<std::size_t, ComplexScalar> overrides;
  for (const auto& [pos, v] : d.overrides()) overrides[pos] = ComplexScalar(1) / v;
  return DiagonalBlock(d.base(), d.cuts(), std::move(maps), std::move(overrides));
}

DiagonalBlock scale_shift(const DiagonalBlock& d, const ComplexScalar& alpha, const ComplexScalar& beta) {
  std::vector<RationalMap> maps;
  for (const auto& m : d.maps()) maps.push_back(RationalMap::constant(alpha) * m + RationalMap::constant(beta));
  std::map<std::size_t, ComplexScalar> overrides;
  for (const auto& [pos, v] : d.overrides()) overrides[pos] = alpha * v + beta;
  return DiagonalBlock(d.base(), d.cuts(), std::move(maps), std::move(overrides));
}

DiagonalBlock indicator_below(const DiagonalBlock& d, const Rational& radius) {
  if (!d.pure()) {
    throw Error(ErrorCode::CutUnsupported, "spectral cuts need an unmapped diagonal block: " + d.describe());
  }
  if (radius <= 0) throw Error(ErrorCode::CutInvalid, "cut radius must be positive");
  if (d.base().distance_to_circle(radius) == 0.0) {
    throw Error(ErrorCode::CutInvalid, "cut circle |z| = " + to_string(radius) + " meets the spectrum");
  }
  std::map<std::size_t, ComplexScalar> overrides;
  for (const auto& [pos, v] : d.overrides()) {
    int c = compare_modulus(v, radius);
    if (c == 0) throw Error(ErrorCode::CutInvalid, "cut circle |z| = " + to_string(radius) + " meets the spectrum");
    overrides[pos] = ComplexScalar(c < 0 ? 1 : 0);
  }
  return DiagonalBlock(d.base(), {radius}, {RationalMap::constant(1), RationalMap::constant(0)}, std::move(overrides));
}

MatrixBlock truncate(const DiagonalBlock& d, std::size_t k) {
  CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < k; ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = d.entry(i + 1).value();
  return MatrixBlock(std::move(m));
}

StructuredOperator::StructuredOperator(MatrixBlock m, std::optional<DiagonalBlock> d) : m_(std::move(m)), d_(std::move(d)) {
  if (m_.dim() == 0 && !d_) throw Error(ErrorCode::EmptyOperator, "an operator needs a matrix or a diagonal block");
}

std::string StructuredOperator::describe() const {
  std::ostringstream os;
  if (has_matrix()) os << m_.dim() << "x" << m_.dim() << " matrix";
  if (has_matrix() && d_) os << " (+) ";
  if (d_) os << d_->describe();
  return os.str();
}

StructuredOperator build_operator(std::optional<MatrixBlock> m, std::optional<DiagonalBlock> d) {
  return StructuredOperator(m ? std::move(*m) : MatrixBlock(), std::move(d));
}

SpectralSet spectrum_of(const StructuredOperator& op, const Tolerances& tol) {
  std::vector<SpectralPiece> pieces;
  if (op.has_matrix()) pieces.emplace_back(PointFamily::finite(eigenvalues(op.matrix(), tol)));
  if (op.diagonal()) {
    SpectralSet d = op.diagonal()->spectrum();
    for (const auto& p : d.pieces()) pieces.push_back(p);
  }
  SpectralSet s(std::move(pieces));
  if (contains(s, ComplexScalar(), tol.equality)) s = SpectralSet(s.pieces(), true);
  return s;
}

StructuredOperator algebra(const StructuredOperator& a, const StructuredOperator& b, AlgebraKind kind) {
  require_same_shape(a, b);
  MatrixBlock m;
  if (a.has_matrix()) {
    switch (kind) {
      case AlgebraKind::Add: m = a.matrix() + b.matrix(); break;
      case AlgebraKind::Subtract: m = a.matrix() - b.matrix(); break;
      case AlgebraKind::Multiply: m = a.matrix() * b.matrix(); break;
    }
  }
  std::optional<DiagonalBlock> d;
  if (a.diagonal()) d = combine(*a.diagonal(), *b.diagonal(), kind);
  return StructuredOperator(std::move(m), std::move(d));
}

StructuredOperator scale_shift(const StructuredOperator& op, const ComplexScalar& alpha, const ComplexScalar& beta) {
  MatrixBlock m;
  if (op.has_matrix()) m = op.matrix().scale_shift(alpha.value(), beta.value());
  std::optional<DiagonalBlock> d;
  if (op.diagonal()) d = scale_shift(*op.diagonal(), alpha, beta);
  return StructuredOperator(std::move(m), std::move(d));
}

StructuredOperator unit_like(const StructuredOperator& op) {
  std::optional<DiagonalBlock> d;
  if (op.diagonal()) d = DiagonalBlock(PointFamily::constant(1));
  return StructuredOperator(op.has_matrix() ? MatrixBlock::identity(op.matrix().dim()) : MatrixBlock(), std::move(d));
}

StructuredOperator zero_like(const StructuredOperator& op) {
  std::optional<DiagonalBlock> d;
  if (op.diagonal()) d = DiagonalBlock(PointFamily::constant(0));
  return StructuredOperator(op.has_matrix() ? MatrixBlock::zero(op.matrix().dim()) : MatrixBlock(), std::move(d));
}

StructuredOperator inverse(const StructuredOperator& op, const Tolerances& tol) {
  MatrixBlock m;
  if (op.has_matrix()) {
    if (drazin_index(op.matrix(), tol) != 0) throw Error(ErrorCode::NotInvertible, "matrix block is singular");
    const CMatrix& a = op.matrix().entries();
    CMatrix inv = a.partialPivLu().inverse();
    m = MatrixBlock(std::move(inv));
  }
  std::optional<DiagonalBlock> d;
  if (op.diagonal()) d = reciprocal(*op.diagonal());
  return StructuredOperator(std::move(m), std::move(d));
}

double relative_residual(const CMatrix& r, double denominator) {
  double n = r.size() ? spectral_norm(r) : 0.0;
  if (n == 0.0) return 0.0;
  if (denominator == 0.0) return std::numeric_limits<double>::infinity();
  return n / denominator;
}

namespace {

bool diagonal_idempotent(const DiagonalBlock& d) {
  return combine(combine(d, d, AlgebraKind::Multiply), d, AlgebraKind::Subtract).is_zero();
}

double matrix_idempotent_residual(const MatrixBlock& p) {
  MatrixBlock sq = p * p;
  return relative_residual(sq.entries() - p.entries(), 1.0 + sq.scale());
}

}  // namespace

StructureReport structure_checks(const StructuredOperator& op1, const std::optional<StructuredOperator>& op2,
                                 const Tolerances& tol) {
  StructureReport rep;
  rep.commutes = true;
  if (op2) {
    require_same_shape(op1, *op2);
    if (op1.has_matrix()) {
      const MatrixBlock& a = op1.matrix();
      const MatrixBlock& b = op2->matrix();
      CMatrix c = a.entries() * b.entries() - b.entries() * a.entries();
      rep.commute_residual = relative_residual(c, a.scale() * b.scale());
      rep.commutes = rep.commute_residual <= tol.residual;
    }
  }
  rep.idempotent = true;
  for (const StructuredOperator* op : {&op1, op2 ? &*op2 : nullptr}) {
    if (!op) continue;
    if (op->has_matrix()) {
      double r = matrix_idempotent_residual(op->matrix());
      rep.idempotent_residual = std::max(rep.idempotent_residual, r);
      if (r > tol.idempotent) rep.idempotent = false;
    }
    if (op->diagonal() && !diagonal_idempotent(*op->diagonal())) rep.idempotent = false;
  }
  return rep;
}

StructuredOperator finite_rank_perturb(const StructuredOperator& op, const std::map<std::size_t, ComplexScalar>& edits,
                                       const std::optional<MatrixBlock>& matrix_delta) {
  MatrixBlock m = op.matrix();
  if (matrix_delta) {
    if (matrix_delta->dim() != m.dim()) throw Error(ErrorCode::ShapeMismatch, "matrix perturbation has the wrong size");
    if (m.dim() > 0) m = m + *matrix_delta;
  }
  std::optional<DiagonalBlock> d = op.diagonal();
  if (!edits.empty()) {
    if (!d) throw Error(ErrorCode::ShapeMismatch, "diagonal edits need a diagonal block");
    auto overrides = d->overrides();
    for (const auto& [pos, v] : edits) {
      if (pos == 0) throw Error(ErrorCode::ShapeMismatch, "diagonal positions start at 1");
      overrides[pos] = v;
    }
    d = DiagonalBlock(d->base(), d->cuts(), d->maps(), std::move(overrides));
  }
  return StructuredOperator(std::move(m), std::move(d));
}

bool operators_equal(const StructuredOperator& a, const StructuredOperator& b, const Tolerances& tol) {
  if (a.matrix().dim() != b.matrix().dim() || a.has_diagonal() != b.has_diagonal()) return false;
  if (a.has_matrix()) {
    MatrixBlock diff = a.matrix() - b.matrix();
    if (relative_residual(diff.entries(), std::max(1.0, diff.scale())) > tol.residual) return false;
  }
  if (a.diagonal()) {
    try {
      return combine(*a.diagonal(), *b.diagonal(), AlgebraKind::Subtract).is_zero();
    } catch (const Error& e) {
      if (e.code() != ErrorCode::FamilyNotClosed) throw;
      // Unrelated representations: compare entrywise to the sampling depth.
      for (std::size_t k = 1; k <= tol.sampling_depth; ++k) {
        if (!same_point(a.diagonal()->entry(k), b.diagonal()->entry(k), tol.equality)) return false;
      }
    }
  }
  return true;
}

}  // namespace agd
