#include "agd/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "agd/error.hpp"

namespace agd {

namespace {

// Fraction of the smallest nonzero accumulation modulus that candidate cuts stay below.
constexpr double kAccMargin = 1e-3;
// Ratio between the top and bottom of the modulus window scanned for cut gaps when
// the spectrum accumulates at 0.
constexpr double kScanDepth = 1e-3;
// Most moduli kept by a gap scan; the band stops widening once this many are found.
constexpr std::size_t kScanMaxModuli = 513;

StructuredOperator mul(const StructuredOperator& a, const StructuredOperator& b) {
  return algebra(a, b, AlgebraKind::Multiply);
}
StructuredOperator add(const StructuredOperator& a, const StructuredOperator& b) {
  return algebra(a, b, AlgebraKind::Add);
}
StructuredOperator sub(const StructuredOperator& a, const StructuredOperator& b) {
  return algebra(a, b, AlgebraKind::Subtract);
}

// Largest |entry| of a diagonal block over the sampling depth.
double sampled_sup(const DiagonalBlock& d, std::size_t depth) {
  double worst = 0.0;
  for (const auto& [pos, v] : d.overrides()) worst = std::max(worst, v.abs());
  for (std::size_t k = 1; k <= depth; ++k) worst = std::max(worst, d.entry(k).abs());
  return worst;
}

// Residual of an identity that should make `diff` vanish: 0 when the diagonal
// part is exactly zero, otherwise its sampled size; the matrix part relative to `scale`.
double identity_residual(const StructuredOperator& diff, double scale, const Tolerances& tol, bool& holds) {
  double r = 0.0;
  holds = true;
  if (diff.has_matrix()) {
    r = relative_residual(diff.matrix().entries(), scale);
    if (r > tol.residual) holds = false;
  }
  if (diff.diagonal() && !diff.diagonal()->is_zero()) {
    holds = false;
    r = std::max(r, sampled_sup(*diff.diagonal(), tol.sampling_depth));
  }
  return r;
}

double matrix_scale(const StructuredOperator& op) { return op.has_matrix() ? op.matrix().scale() : 0.0; }

CardClass card_of(const SpectralSet& s) {
  CardClass c;
  if (s.is_finite()) {
    c.finite = true;
    c.count = s.finite_points().size();
  }
  return c;
}

SpectralSet restrict_piece_windows(const SpectralSet& s, const ModulusWindow& w, bool keep_zero) {
  std::vector<SpectralPiece> pieces;
  for (const auto& p : s.pieces()) {
    if (!p.identity_map()) {
      throw Error(ErrorCode::CutUnsupported, "spectral cuts need unmapped spectral pieces: " + p.describe());
    }
    ModulusWindow nw = p.window();
    if (w.inner && (!nw.inner || *nw.inner < *w.inner)) nw.inner = w.inner;
    if (w.outer && (!nw.outer || *nw.outer > *w.outer)) nw.outer = w.outer;
    if (nw.inner && nw.outer && *nw.inner >= *nw.outer) continue;
    pieces.emplace_back(p.base(), nw, p.map(), p.excluded());
  }
  return SpectralSet(std::move(pieces), keep_zero && s.contains_zero());
}

ProjectionPair matrix_split(const StructuredOperator& a, const Rational& cut, const Tolerances& tol) {
  if (!a.has_matrix()) return {};
  return riesz_projection(a.matrix(), cut, tol);
}

void absorb(InverseCertificate& cert, const VerifyResult& v) {
  cert.residuals.insert(cert.residuals.end(), v.residuals.begin(), v.residuals.end());
  cert.card = v.card;
  cert.residual_spectrum = v.residual_spectrum;
  cert.verified = v.ok;
}

double spectral_bound(const StructuredOperator& a) {
  double b = a.has_matrix() ? a.matrix().norm() : 0.0;
  if (a.diagonal()) {
    b = std::max(b, a.diagonal()->base().sup_modulus());
    for (const auto& [pos, v] : a.diagonal()->overrides()) b = std::max(b, v.abs());
  }
  return b;
}

// A simple rational near the geometric mean of lo < hi, strictly inside (lo, hi).
Rational cut_between(double lo, double hi) {
  if (lo <= 0.0) return simplest_between(0.25 * hi, 0.75 * hi);
  double g = std::sqrt(lo * hi);
  double w = 0.25 * std::min(g - lo, hi - g);
  return simplest_between(g - w, g + w);
}

struct GapScan {
  std::vector<double> moduli;  // distinct nonzero moduli in the scanned window, increasing
  bool zero_isolated = false;  // 0 is not an accumulation point
  bool unbounded_top = false;  // nothing accumulates away from 0
};

GapScan scan_gaps(const StructuredOperator& a, const Tolerances& tol) {
  if (a.diagonal() && !a.diagonal()->pure()) {
    throw Error(ErrorCode::CutUnsupported, "spectral cuts need an unmapped diagonal block");
  }
  SpectralSet s = spectrum_of(a, tol);
  SpectralSet acc = accumulation(s);
  GapScan scan;
  double delta = acc.is_empty() ? std::numeric_limits<double>::infinity() : min_nonzero_modulus(acc);
  if (delta == 0.0) return scan;
  scan.zero_isolated = !contains(acc, ComplexScalar(), tol.equality);
  scan.unbounded_top = std::isinf(delta);
  double hi = scan.unbounded_top ? spectral_bound(a) + 1.0 : delta * (1.0 - kAccMargin);
  double floor_lo = scan.zero_isolated ? 0.0 : hi * kScanDepth;
  double lo = scan.zero_isolated ? 0.0 : std::max(floor_lo, 0.5 * hi);
  while (true) {
    scan.moduli.clear();
    for (const auto& z : points_in_band(s, lo, hi)) {
      if (!z.is_zero()) scan.moduli.push_back(z.abs());
    }
    if (lo <= floor_lo || scan.moduli.size() >= kScanMaxModuli) break;
    lo = std::max(floor_lo, 0.125 * lo);
  }
  std::sort(scan.moduli.begin(), scan.moduli.end());
  if (!scan.zero_isolated && scan.moduli.size() > kScanMaxModuli) {
    // Keep the largest moduli, nearest the top of the window.
    scan.moduli.erase(scan.moduli.begin(), scan.moduli.end() - static_cast<std::ptrdiff_t>(kScanMaxModuli));
  }
  std::vector<double> distinct;
  for (double m : scan.moduli) {
    if (distinct.empty() || m - distinct.back() > 2.0 * tol.gap * m) distinct.push_back(m);
  }
  scan.moduli = std::move(distinct);
  return scan;
}

bool cut_is_valid(const StructuredOperator& a, const Rational& cut, const Tolerances& tol) {
  try {
    validate_cut(a, cut, tol);
    return true;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::CutInvalid) throw;
    return false;
  }
}

}  // namespace

std::string CardClass::to_string() const { return finite ? "Finite(" + std::to_string(count) + ")" : "Infinite"; }

std::string ReducedPair::describe() const {
  std::ostringstream os;
  os << "core summand: spectrum " << core_spectrum.describe() << (core_invertible ? ", invertible" : ", singular");
  os << "; small summand: spectrum " << small_spectrum.describe() << (small_acc ? ", in A^acc" : ", not in A^acc");
  if (matrix_core_dim || matrix_small_dim) {
    os << "; matrix block splits as " << matrix_core_dim << " + " << matrix_small_dim;
  }
  return os.str();
}

ClassFlags classify_element(const StructuredOperator& a, const Tolerances& tol) {
  return classify_set(spectrum_of(a, tol), tol.equality);
}

SpectralSet spectrum_inside(const SpectralSet& s, const Rational& radius) {
  ModulusWindow w;
  w.outer = radius;
  return restrict_piece_windows(s, w, true);
}

SpectralSet spectrum_outside(const SpectralSet& s, const Rational& radius) {
  ModulusWindow w;
  w.inner = radius;
  return restrict_piece_windows(s, w, false);
}

void validate_cut(const StructuredOperator& a, const Rational& cut, const Tolerances& tol) {
  if (cut <= 0) throw Error(ErrorCode::CutInvalid, "cut radius must be positive");
  SpectralSet s = spectrum_of(a, tol);
  // The symbolic accumulation test is cheap; the clearance scan can be slow near accumulation points.
  SpectralSet acc = accumulation(s);
  if (!acc.is_empty() && cut.get_d() >= min_nonzero_modulus(acc)) {
    throw Error(ErrorCode::CutInvalid,
                "accumulation points other than 0 lie inside |z| < " + to_string(cut) + ": " + acc.describe());
  }
  AnnulusCheck check = annulus_clear(s, cut, tol);
  if (!check.clear) {
    std::ostringstream os;
    os << "circle |z| = " << to_string(cut) << " does not clear the spectrum (gap " << check.gap << ")";
    throw Error(ErrorCode::CutInvalid, os.str());
  }
}

StructuredOperator cut_projection(const StructuredOperator& a, const Rational& cut, const Tolerances& tol) {
  MatrixBlock m;
  if (a.has_matrix()) m = riesz_projection(a.matrix(), cut, tol).p;
  std::optional<DiagonalBlock> d;
  if (a.diagonal()) d = indicator_below(*a.diagonal(), cut);
  return StructuredOperator(std::move(m), std::move(d));
}

InverseCertificate construct_agdrazin(const StructuredOperator& a, const Rational& cut, const Tolerances& tol) {
  validate_cut(a, cut, tol);
  ProjectionPair split = matrix_split(a, cut, tol);
  StructuredOperator p = cut_projection(a, cut, tol);
  StructuredOperator one = unit_like(a);
  StructuredOperator comp = sub(one, p);
  std::string formula = "(a+p)^-1(1-p)";
  StructuredOperator inv = one;
  try {
    inv = inverse(add(a, p), tol);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotInvertible) throw;
    // a + p is singular when -1 lies inside the cut; a(1-p) + p inverts the same core.
    formula = "(a(1-p)+p)^-1(1-p)";
    inv = inverse(add(mul(a, comp), p), tol);
  }
  StructuredOperator x = mul(inv, comp);

  SpectralSet s = spectrum_of(a, tol);
  ReducedPair rp;
  rp.core_spectrum = spectrum_outside(s, cut);
  rp.small_spectrum = spectrum_inside(s, cut);
  rp.core_invertible = !contains(rp.core_spectrum, ComplexScalar(), tol.equality);
  rp.small_acc = rp.small_spectrum.is_empty() || classify_set(rp.small_spectrum, tol.equality).acc_class;
  rp.matrix_core_dim = split.outside_dim;
  rp.matrix_small_dim = split.inside_dim;

  InverseCertificate cert{x, p, cut, formula, {}, {}, {}, rp, false};
  if (a.has_matrix()) {
    MatrixBlock pp = p.matrix() * p.matrix();
    cert.residuals.emplace_back("p^2 - p", relative_residual(pp.entries() - p.matrix().entries(), 1.0 + pp.scale()));
    const CMatrix& am = a.matrix().entries();
    const CMatrix& pm = p.matrix().entries();
    cert.residuals.emplace_back("ap - pa",
                                relative_residual(am * pm - pm * am, a.matrix().scale() * p.matrix().scale()));
  }
  return cert;
}

VerifyResult verify_certificate(const StructuredOperator& a, const StructuredOperator& x, const Tolerances& tol) {
  if (a.matrix().dim() != x.matrix().dim() || a.has_diagonal() != x.has_diagonal()) {
    throw Error(ErrorCode::ShapeMismatch, "candidate inverse has a different block shape");
  }
  VerifyResult v;
  StructureReport sr = structure_checks(a, x, tol);
  v.commutes = sr.commutes;
  v.residuals.emplace_back("ax - xa", sr.commute_residual);

  StructuredOperator xax = mul(mul(x, a), x);
  double scale = std::max(matrix_scale(xax), matrix_scale(x));
  v.residuals.emplace_back("xax - x", identity_residual(sub(xax, x), scale, tol, v.xax_equals_x));

  StructuredOperator r = sub(a, mul(mul(a, a), x));
  v.residual_spectrum = spectrum_of(r, tol);
  v.residual_acc = classify_set(v.residual_spectrum, tol.equality).acc_class;
  v.card = card_of(v.residual_spectrum);
  v.ok = v.commutes && v.xax_equals_x && v.residual_acc;
  return v;
}

InverseCertificate agdrazin_inverse(const StructuredOperator& a, const Rational& cut, const Tolerances& tol) {
  if (!classify_element(a, tol).ag_drazin) {
    throw Error(ErrorCode::NotAGDInvertible, "0 is an accumulation point of sigma_d(a)");
  }
  InverseCertificate cert = construct_agdrazin(a, cut, tol);
  absorb(cert, verify_certificate(a, cert.x, tol));
  if (!cert.verified) throw Error(ErrorCode::CertificateInvalid, "constructed inverse failed verification");
  return cert;
}

InverseCertificate gdrazin_inverse(const StructuredOperator& a, const Tolerances& tol) {
  if (!classify_element(a, tol).g_drazin) {
    throw Error(ErrorCode::NotGDInvertible, "0 is an accumulation point of sigma(a)");
  }
  SpectralSet s = spectrum_of(a, tol);
  InverseCertificate cert{zero_like(a), unit_like(a), std::nullopt, "quasinilpotent", {}, {}, {}, std::nullopt, false};
  if (!contains(s, ComplexScalar(), tol.equality)) {
    cert.x = inverse(a, tol);
    cert.p = zero_like(a);
    cert.formula = "inverse";
  } else if (double m = min_nonzero_modulus(s); std::isfinite(m)) {
    cert = construct_agdrazin(a, simplest_between(0.25 * m, 0.75 * m), tol);
  }
  absorb(cert, verify_certificate(a, cert.x, tol));
  if (!cert.verified || !classify_set(cert.residual_spectrum, tol.equality).qnil) {
    throw Error(ErrorCode::CertificateInvalid, "a - a^2 x is not quasinilpotent");
  }
  return cert;
}

InverseCertificate drazin_certificate(const StructuredOperator& a, const Tolerances& tol) {
  if (a.has_diagonal()) {
    if (!classify_element(a, tol).g_drazin) {
      throw Error(ErrorCode::NotDrazinInvertible, "0 is an accumulation point of sigma(a)");
    }
    return gdrazin_inverse(a, tol);
  }
  MatrixBlock xd = drazin_inverse(a.matrix(), tol);
  StructuredOperator x(xd, std::nullopt);
  StructuredOperator p = sub(unit_like(a), mul(x, a));
  InverseCertificate cert{x, p, std::nullopt, "drazin", {}, {}, {}, std::nullopt, false};
  int k = drazin_index(a.matrix(), tol);
  cert.residuals.emplace_back("index", static_cast<double>(k));
  CMatrix ak = CMatrix::Identity(a.matrix().dim(), a.matrix().dim());
  for (int i = 0; i < k; ++i) ak = ak * a.matrix().entries();
  cert.residuals.emplace_back("a^k x a - a^k", relative_residual(ak * xd.entries() * a.matrix().entries() - ak,
                                                                 std::pow(a.matrix().scale(), k)));
  absorb(cert, verify_certificate(a, x, tol));
  if (!cert.verified) throw Error(ErrorCode::CertificateInvalid, "Drazin inverse failed verification");
  return cert;
}

QuasipolarWitness quasipolar_witness(const StructuredOperator& a, const StructuredOperator& x, const Tolerances& tol) {
  VerifyResult v = verify_certificate(a, x, tol);
  if (!v.ok) throw Error(ErrorCode::CertificateInvalid, "x is not an ag-Drazin inverse of a");
  StructuredOperator q = mul(x, a);
  QuasipolarWitness w{q, false, false, false, false, false, {}};
  StructureReport sr = structure_checks(q, std::nullopt, tol);
  w.idempotent = sr.idempotent;
  w.residuals.emplace_back("q^2 - q", sr.idempotent_residual);
  StructureReport cr = structure_checks(q, a, tol);
  w.commutes = cr.commutes;
  w.residuals.emplace_back("qa - aq", cr.commute_residual);
  StructuredOperator ax = mul(a, x);
  w.in_both_ideals = operators_equal(q, ax, tol);
  StructuredOperator comp = sub(unit_like(a), q);
  w.complement_acc = classify_element(mul(a, comp), tol).acc_class;
  try {
    inverse(add(mul(a, q), comp), tol);
    w.core_invertible = true;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotInvertible) throw;
  }
  if (!w.idempotent || !w.commutes || !w.in_both_ideals || !w.complement_acc) {
    throw Error(ErrorCode::CertificateInvalid, "x a is not an acc-quasi-polar idempotent for a");
  }
  return w;
}

CoreAccDecomposition core_acc_decompose(const StructuredOperator& a, const Rational& cut, const Tolerances& tol) {
  validate_cut(a, cut, tol);
  StructuredOperator p = cut_projection(a, cut, tol);
  StructuredOperator x = mul(a, sub(unit_like(a), p));
  StructuredOperator y = mul(a, p);
  CoreAccDecomposition d{x, y, false, false, false, false, {}};
  double scale = matrix_scale(a);
  d.residuals.emplace_back("a - (x + y)", identity_residual(sub(a, add(x, y)), scale, tol, d.sums_to_a));
  bool xy_zero = false;
  bool yx_zero = false;
  StructuredOperator xy = mul(x, y);
  StructuredOperator yx = mul(y, x);
  d.residuals.emplace_back("xy", identity_residual(xy, matrix_scale(xy), tol, xy_zero));
  d.residuals.emplace_back("yx", identity_residual(yx, matrix_scale(yx), tol, yx_zero));
  d.annihilate = xy_zero && yx_zero;
  d.x_group_invertible = true;
  if (x.has_matrix()) {
    try {
      group_inverse(x.matrix(), tol);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::IndexTooLarge) throw;
      d.x_group_invertible = false;
    }
  }
  // A normal diagonal block is group invertible exactly when 0 is not an accumulation point.
  if (x.diagonal() && !classify_set(x.diagonal()->spectrum(), tol.equality).g_drazin) d.x_group_invertible = false;
  d.y_acc = classify_element(y, tol).acc_class;
  return d;
}

InverseFamily nonuniqueness_family(const StructuredOperator& a, const std::vector<Rational>& cuts,
                                   const Tolerances& tol) {
  InverseFamily fam;
  std::vector<SpectralSet> inside;
  std::vector<int> inside_dims;
  SpectralSet s = spectrum_of(a, tol);
  for (const auto& c : cuts) {
    fam.certificates.push_back(agdrazin_inverse(a, c, tol));
    inside.push_back(spectrum_inside(s, c));
    inside_dims.push_back(fam.certificates.back().reduced->matrix_small_dim);
  }
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    for (std::size_t j = i + 1; j < cuts.size(); ++j) {
      FamilyPair pr;
      pr.first = i;
      pr.second = j;
      pr.same_split = inside_dims[i] == inside_dims[j] &&
                      set_equal(inside[i], inside[j], tol.sampling_depth, tol.equality);
      pr.same_inverse = operators_equal(fam.certificates[i].x, fam.certificates[j].x, tol);
      if (pr.same_split != pr.same_inverse) {
        throw Error(ErrorCode::CertificateInvalid, "cuts " + to_string(cuts[i]) + " and " + to_string(cuts[j]) +
                                                       " disagree between spectral split and inverse");
      }
      fam.pairs.push_back(pr);
    }
  }
  return fam;
}

ProductCheck sigma_ad_product_check(const StructuredOperator& a, const StructuredOperator& b, const Tolerances& tol) {
  ProductCheck pc;
  pc.ab = sigma_ad_of(spectrum_of(mul(a, b), tol));
  pc.ba = sigma_ad_of(spectrum_of(mul(b, a), tol));
  pc.equal = set_equal(pc.ab, pc.ba, tol.sampling_depth, tol.equality);
  return pc;
}

std::vector<Rational> candidate_cuts(const StructuredOperator& a, const Tolerances& tol) {
  GapScan scan = scan_gaps(a, tol);
  std::vector<Rational> raw;
  const auto& m = scan.moduli;
  if (scan.zero_isolated && !m.empty()) raw.push_back(cut_between(0.0, m.front()));
  for (std::size_t i = 0; i + 1 < m.size(); ++i) raw.push_back(cut_between(m[i], m[i + 1]));
  if (scan.unbounded_top) raw.push_back(m.empty() ? Rational(1) : cut_between(m.back(), 2.0 * m.back()));
  std::vector<Rational> out;
  for (const auto& c : raw) {
    if (cut_is_valid(a, c, tol)) out.push_back(c);
  }
  return out;
}

std::optional<Rational> auto_cut(const StructuredOperator& a, const Tolerances& tol) {
  GapScan scan = scan_gaps(a, tol);
  const auto& m = scan.moduli;
  std::optional<Rational> best;
  double best_ratio = 1.0;
  for (std::size_t i = 0; i + 1 < m.size(); ++i) {
    double ratio = m[i + 1] / m[i];
    if (ratio <= best_ratio) continue;
    Rational c = cut_between(m[i], m[i + 1]);
    if (!cut_is_valid(a, c, tol)) continue;
    best = c;
    best_ratio = ratio;
  }
  if (best) return best;
  std::vector<Rational> fallback;
  if (scan.zero_isolated && !m.empty()) fallback.push_back(cut_between(0.0, m.front()));
  if (scan.unbounded_top) fallback.push_back(m.empty() ? Rational(1) : cut_between(m.back(), 2.0 * m.back()));
  for (const auto& c : fallback) {
    if (cut_is_valid(a, c, tol)) return c;
  }
  return std::nullopt;
}

}  // namespace agd
