// Acceptance suite: prints one PASS/FAIL line per criterion and exits nonzero on any failure.
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "agd/engine.hpp"
#include "agd/error.hpp"
#include "support/oracles.hpp"

using namespace agd;
using namespace agd::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void fail(const std::string& why) {
    if (pass) detail << why;
    pass = false;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

ComplexScalar q(long num, long den = 1) { return ComplexScalar(Rational(num, den)); }

StructuredOperator harmonic() {
  return build_operator(std::nullopt, DiagonalBlock(PointFamily::power(q(1), Rational(1))));
}

bool exactly(const ComplexScalar& a, const ComplexScalar& b) { return a.exact() && b.exact() && (a - b).is_zero(); }

double max_residual(const ResidualTable& t) {
  double m = 0.0;
  for (const auto& [name, v] : t) m = std::max(m, v);
  return m;
}

// Entry n of the inverse built from a cut on diag(1/n): n when 1/n lies outside the cut, else 0.
ComplexScalar harmonic_inverse_entry(std::size_t n, const Rational& cut) {
  Rational v(1, static_cast<long>(n));
  return v > cut ? ComplexScalar(Rational(static_cast<long>(n))) : ComplexScalar(0);
}

Outcome criterion1() {
  Outcome o;
  auto t0 = Clock::now();
  StructuredOperator t = harmonic();
  std::vector<Rational> cuts{Rational(2, 5), Rational(29, 100)};
  std::vector<InverseCertificate> certs;
  for (const auto& cut : cuts) {
    InverseCertificate c = agdrazin_inverse(t, cut);
    if (!c.verified || !c.x.exact()) o.fail("certificate not verified or not exact");
    for (const auto& [name, v] : c.residuals)
      if (v != 0.0) o.fail("nonzero residual " + name);
    for (std::size_t n = 1; n <= 2000; ++n)
      if (!exactly(c.x.diagonal()->entry(n), harmonic_inverse_entry(n, cut))) o.fail("wrong entry of x");
    certs.push_back(c);
  }
  if (exactly(certs[0].x.diagonal()->entry(3), certs[1].x.diagonal()->entry(3)) ||
      operators_equal(certs[0].x, certs[1].x))
    o.fail("the two inverses coincide");

  // T - T^2 T1 with T1 the first certificate.
  StructuredOperator t2 = algebra(t, t, AlgebraKind::Multiply);
  StructuredOperator r = algebra(t, algebra(t2, certs[0].x, AlgebraKind::Multiply), AlgebraKind::Subtract);
  for (std::size_t n = 1; n <= 2000; ++n) {
    ComplexScalar expect = n <= 2 ? ComplexScalar(0) : ComplexScalar(Rational(1, static_cast<long>(n)));
    if (!exactly(r.diagonal()->entry(n), expect)) o.fail("wrong entry of T - T^2 T1");
  }
  SpectralSet sr = spectrum_of(r);
  SpectralSet oracle = DiagonalBlock(PointFamily::power(q(1), Rational(1)), {{1, q(0)}, {2, q(0)}}).spectrum();
  if (!set_equal(sr, oracle)) o.fail("sigma(T - T^2 T1) differs from {0} u {1/n : n >= 3}");
  if (!set_equal(accumulation(sr), SpectralSet::points({q(0)}))) o.fail("acc sigma(T - T^2 T1) is not {0}");
  double secs = seconds_since(t0);
  if (secs >= 1.0) o.fail("runtime over 1 s");
  if (o.pass) o.detail << "x = diag(1,2,0,...) and diag(1,2,3,0,...), zero residuals, " << secs << " s";
  return o;
}

struct CorpusRun {
  CorpusEntry entry;
  ClassFlags flags;
  ConstructiveSearch search;
};

const std::vector<CorpusRun>& corpus_runs() {
  static const std::vector<CorpusRun> runs = [] {
    std::vector<CorpusRun> out;
    for (auto& e : classification_corpus()) {
      ClassFlags f = classify_element(e.op);
      ConstructiveSearch s = constructive_search(e.op);
      out.push_back({e, f, s});
    }
    return out;
  }();
  return runs;
}

Outcome criterion2() {
  Outcome o;
  const auto& runs = corpus_runs();
  if (runs.size() < 50) o.fail("corpus has fewer than 50 operators");
  std::size_t agree = 0;
  std::size_t ag = 0;
  std::size_t rejected_clusters = 0;
  for (const auto& r : runs) {
    if (r.flags.ag_drazin == r.search.found) {
      ++agree;
    } else {
      o.fail("disagreement on " + r.entry.label);
    }
    if (r.flags.ag_drazin) ++ag;
    if (r.entry.zero_centers) {
      if (r.flags.ag_drazin || r.search.found) o.fail("cluster with centers at 0 accepted: " + r.entry.label);
      ++rejected_clusters;
    }
  }
  if (o.pass)
    o.detail << agree << "/" << runs.size() << " agree (" << ag << " ag-Drazin, " << rejected_clusters
             << " zero-center clusters rejected by both)";
  return o;
}

Outcome criterion3() {
  Outcome o;
  std::size_t finite = 0;
  for (const auto& r : corpus_runs()) {
    if (r.search.found_finite_card != r.flags.g_drazin) o.fail("finite-card mismatch on " + r.entry.label);
    if (r.flags.g_drazin) ++finite;
  }
  StructuredOperator t = harmonic();
  if (classify_element(t).g_drazin) o.fail("T classified g-Drazin");
  std::vector<Rational> cuts = candidate_cuts(t);
  for (const auto& c : constructive_search(t).verified_cuts) cuts.push_back(c);
  for (const auto& cut : cuts) {
    if (agdrazin_inverse(t, cut).card.finite) o.fail("finite card for T at cut " + to_string(cut));
  }
  if (o.pass)
    o.detail << finite << " g-Drazin operators with finite card, " << cuts.size() << " certificates for T all Infinite";
  return o;
}

StructuredOperator matrix_op(const CMatrix& m) { return build_operator(MatrixBlock(m), std::nullopt); }

// S (C (+) N) S^-1 with |eig(C)| in [1, 3] and |eig(N)| <= 0.1.
CMatrix split_case(Rng& rng, double* cond_out) {
  int n = uniform_int(rng, 2, 16);
  int core = uniform_int(rng, 1, n - 1);
  std::vector<std::complex<double>> big;
  std::vector<std::complex<double>> small;
  for (int i = 0; i < core; ++i) big.push_back(std::polar(uniform_real(rng, 1.0, 3.0), uniform_real(rng, -M_PI, M_PI)));
  for (int i = core; i < n; ++i) {
    double m = uniform_int(rng, 0, 2) == 0 ? 0.0 : uniform_real(rng, 0.0, 0.1);
    small.push_back(std::polar(m, uniform_real(rng, -M_PI, M_PI)));
  }
  CMatrix block = direct_sum(triangular_with_diagonal(big, 0.5, rng), triangular_with_diagonal(small, 0.05, rng));
  double cond = std::exp(uniform_real(rng, 0.0, std::log(1e3)));
  CMatrix s = conditioned_matrix(n, cond, rng);
  *cond_out = condition_number(s);
  return s * block * s.inverse();
}

Outcome criterion4() {
  Outcome o;
  auto t0 = Clock::now();
  Rng rng(4);
  double worst = 0.0;
  double worst_cond = 0.0;
  for (int i = 0; i < 100; ++i) {
    double cond = 0.0;
    StructuredOperator a = matrix_op(split_case(rng, &cond));
    worst_cond = std::max(worst_cond, cond);
    if (cond > 1e3 * (1 + 1e-9)) o.fail("cond(S) above 1e3");
    try {
      InverseCertificate c = construct_agdrazin(a, Rational(1, 2));
      VerifyResult v = verify_certificate(a, c.x);
      double res = max_residual(v.residuals);
      worst = std::max(worst, res);
      if (!v.ok || res > 1e-9) o.fail("case " + std::to_string(i) + " failed verification");
    } catch (const Error& e) {
      o.fail("case " + std::to_string(i) + ": " + e.what());
    }
  }
  double secs = seconds_since(t0);
  if (secs >= 10.0) o.fail("runtime over 10 s");
  if (o.pass) o.detail << "100 cases, max residual " << worst << ", max cond " << worst_cond << ", " << secs << " s";
  return o;
}

Outcome criterion5() {
  Outcome o;
  Rng rng(5);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    DrazinCase c = random_drazin_case(8, 1e3, rng);
    MatrixBlock a(c.a);
    try {
      MatrixBlock x = drazin_inverse(a);
      double ref = spectral_norm(c.drazin);
      double err = spectral_norm(x.entries() - c.drazin) / (ref > 0 ? ref : 1.0);
      worst = std::max(worst, err);
      if (err > 1e-8) o.fail("case " + std::to_string(i) + " differs from the oracle by " + std::to_string(err));
      int k = drazin_index(a);
      if (k != c.index)
        o.fail("case " + std::to_string(i) + " index " + std::to_string(k) + " != " + std::to_string(c.index));
    } catch (const Error& e) {
      o.fail("case " + std::to_string(i) + ": " + e.what());
    }
  }
  if (o.pass) o.detail << "200 cases, max relative error " << worst << ", indices exact";
  return o;
}

// Certificates gathered from the corpus search, the harmonic cuts and random matrix splits.
struct CertifiedPair {
  std::string label;
  StructuredOperator a;
  StructuredOperator x;
};

std::vector<CertifiedPair> certified_pairs() {
  std::vector<CertifiedPair> out;
  for (const auto& r : corpus_runs())
    for (const auto& cut : r.search.verified_cuts)
      out.push_back({r.entry.label + " @ " + to_string(cut), r.entry.op, construct_agdrazin(r.entry.op, cut).x});
  StructuredOperator t = harmonic();
  for (const auto& cut : {Rational(2, 5), Rational(29, 100)})
    out.push_back({"harmonic @ " + to_string(cut), t, agdrazin_inverse(t, cut).x});
  Rng rng(6);
  for (int i = 0; i < 20; ++i) {
    double cond = 0.0;
    StructuredOperator a = matrix_op(split_case(rng, &cond));
    out.push_back({"matrix split " + std::to_string(i), a, agdrazin_inverse(a, Rational(1, 2)).x});
  }
  return out;
}

Outcome criterion6() {
  Outcome o;
  auto pairs = certified_pairs();
  for (const auto& pr : pairs) {
    try {
      QuasipolarWitness w = quasipolar_witness(pr.a, pr.x);
      StructuredOperator q2 = algebra(w.q, w.q, AlgebraKind::Multiply);
      if (w.q.has_diagonal()) {
        DiagonalBlock diff = combine(*q2.diagonal(), *w.q.diagonal(), AlgebraKind::Subtract);
        if (!diff.is_zero()) o.fail("q^2 != q on the diagonal for " + pr.label);
      }
      if (w.q.has_matrix()) {
        const CMatrix& qm = w.q.matrix().entries();
        double nq = spectral_norm(qm);
        double res = spectral_norm(qm * qm - qm) / std::max(1.0, nq * nq);
        if (res > 1e-10) o.fail("q^2 != q on the matrix block for " + pr.label);
      }
      StructuredOperator comp = algebra(pr.a, algebra(unit_like(pr.a), w.q, AlgebraKind::Subtract), AlgebraKind::Multiply);
      if (!classify_element(comp).acc_class) o.fail("a(1-q) not in the acc class for " + pr.label);
      if (!w.core_invertible) o.fail("core not invertible for " + pr.label);
    } catch (const Error& e) {
      o.fail(pr.label + ": " + e.what());
    }
  }
  if (o.pass) o.detail << pairs.size() << " certificates round-tripped";
  return o;
}

bool product_vanishes(const StructuredOperator& u, const StructuredOperator& v) {
  StructuredOperator p = algebra(u, v, AlgebraKind::Multiply);
  if (p.has_diagonal() && !p.diagonal()->is_zero()) return false;
  if (p.has_matrix()) {
    double denom = std::max(1.0, u.matrix().norm() * v.matrix().norm());
    if (spectral_norm(p.matrix().entries()) > 1e-10 * denom) return false;
  }
  return true;
}

Outcome criterion7() {
  Outcome o;
  std::size_t count = 0;
  for (const auto& r : corpus_runs()) {
    if (!r.flags.ag_drazin) continue;
    for (const auto& cut : r.search.verified_cuts) {
      std::string label = r.entry.label + " @ " + to_string(cut);
      try {
        CoreAccDecomposition d = core_acc_decompose(r.entry.op, cut);
        ++count;
        if (!d.ok()) o.fail("decomposition checks failed for " + label);
        if (!operators_equal(algebra(d.x_part, d.y_part, AlgebraKind::Add), r.entry.op))
          o.fail("parts do not sum to a for " + label);
        if (!product_vanishes(d.x_part, d.y_part) || !product_vanishes(d.y_part, d.x_part))
          o.fail("parts do not annihilate for " + label);
        if (d.x_part.has_matrix() && drazin_index(d.x_part.matrix()) > 1)
          o.fail("matrix core has index above 1 for " + label);
        if (!classify_element(d.x_part).g_drazin) o.fail("core part not group invertible for " + label);
        if (!classify_element(d.y_part).acc_class) o.fail("acc part outside the acc class for " + label);
      } catch (const Error& e) {
        o.fail(label + ": " + e.what());
      }
    }
  }
  if (o.pass) o.detail << count << " decompositions";
  return o;
}

std::vector<CorpusEntry> diagonal_entries() {
  std::vector<CorpusEntry> out;
  for (auto& e : classification_corpus())
    if (e.op.has_diagonal() && !e.op.has_matrix()) out.push_back(e);
  return out;
}

Outcome criterion8() {
  Outcome o;
  Rng rng(8);
  auto diags = diagonal_entries();

  // (i) commuting nilpotent additions on the matrix block.
  for (int i = 0; i < 20; ++i) {
    std::vector<int> sizes;
    int blocks = uniform_int(rng, 1, 3);
    for (int b = 0; b < blocks; ++b) sizes.push_back(uniform_int(rng, 1, 3));
    CMatrix j = jordan_nilpotent(sizes);
    Eigen::Index n = j.rows();
    CMatrix lam = CMatrix::Zero(n, n);
    CMatrix t = CMatrix::Zero(n, n);
    Eigen::Index at = 0;
    for (int s : sizes) {
      std::complex<double> l = uniform_int(rng, 0, 2) == 0 ? 0.0 : std::polar(uniform_real(rng, 0.5, 2.0), uniform_real(rng, -M_PI, M_PI));
      double tv = uniform_real(rng, 0.5, 2.0);
      for (Eigen::Index k = at; k < at + s; ++k) {
        lam(k, k) = l;
        t(k, k) = tv;
      }
      at += s;
    }
    CMatrix s = conditioned_matrix(n, 10.0, rng);
    CMatrix s_inv = s.inverse();
    CMatrix m = s * (lam + j) * s_inv;
    CMatrix nb = s * (t * j) * s_inv;
    const DiagonalBlock& d = *diags[static_cast<std::size_t>(i) % diags.size()].op.diagonal();
    StructuredOperator a = build_operator(MatrixBlock(m), d);
    StructuredOperator b = build_operator(MatrixBlock(nb), DiagonalBlock(PointFamily::constant(q(0))));
    if (!structure_checks(a, b).commutes) o.fail("(i) perturbation does not commute");
    CMatrix pw = CMatrix::Identity(n, n);
    for (Eigen::Index k = 0; k < n; ++k) pw = pw * nb;
    if (spectral_norm(pw) > 1e-8 * std::pow(std::max(1.0, spectral_norm(nb)), static_cast<double>(n)))
      o.fail("(i) perturbation is not nilpotent");
    if (classify_element(a).ag_drazin != classify_element(algebra(a, b, AlgebraKind::Add)).ag_drazin)
      o.fail("(i) flag changed on case " + std::to_string(i));
  }

  // (ii) finite diagonal edits keep sigma_d.
  std::size_t edited = 0;
  for (const auto& e : classification_corpus()) {
    if (!e.op.has_diagonal()) continue;
    for (int rep = 0; rep < 3; ++rep) {
      std::map<std::size_t, ComplexScalar> edits;
      for (int k = 0; k < 3; ++k)
        edits[static_cast<std::size_t>(uniform_int(rng, 1, 20))] =
            ComplexScalar(random_rational(rng, 9, 7), random_rational(rng, 3, 5));
      StructuredOperator p = finite_rank_perturb(e.op, edits, std::nullopt);
      if (!set_equal(sigma_d_of(spectrum_of(e.op)), sigma_d_of(spectrum_of(p))))
        o.fail("(ii) sigma_d changed on " + e.label);
      ++edited;
    }
  }

  // (iii) orthogonal sums with a finite-spectrum summand.
  int sums = 0;
  for (const auto& e : diags) {
    if (sums == 10) break;
    if (!classify_element(e.op).ag_drazin || !e.op.diagonal()->overrides().empty()) continue;
    int k = uniform_int(rng, 1, 4);
    std::map<std::size_t, ComplexScalar> zeroed;
    std::map<std::size_t, ComplexScalar> support;
    for (int pos = 1; pos <= k; ++pos) {
      zeroed[static_cast<std::size_t>(pos)] = q(0);
      support[static_cast<std::size_t>(pos)] = ComplexScalar(random_rational(rng, 9, 4) + 10, random_rational(rng, 3, 4));
    }
    Eigen::Index n = uniform_int(rng, 1, 4);
    CMatrix m = CMatrix::Random(n, n);
    StructuredOperator a = build_operator(MatrixBlock::zero(n), DiagonalBlock(e.op.diagonal()->base(), zeroed));
    StructuredOperator b = build_operator(MatrixBlock(m), DiagonalBlock(PointFamily::constant(q(0)), support));
    ++sums;
    if (!classify_element(a).ag_drazin) o.fail("(iii) a not ag-Drazin: " + e.label);
    if (!spectrum_of(b).is_finite()) o.fail("(iii) b has infinite spectrum");
    if (!product_vanishes(a, b) || !product_vanishes(b, a)) o.fail("(iii) ab or ba nonzero: " + e.label);
    if (!classify_element(algebra(a, b, AlgebraKind::Add)).ag_drazin) o.fail("(iii) a+b not ag-Drazin: " + e.label);
  }
  if (sums < 10) o.fail("(iii) fewer than 10 orthogonal sums");
  if (o.pass) o.detail << "20 nilpotent additions, " << edited << " edited operators, " << sums << " orthogonal sums";
  return o;
}

// Operators paired with b such that ab and ba stay inside the representable class.
std::vector<std::pair<StructuredOperator, StructuredOperator>> product_pairs() {
  Rng rng(9);
  std::vector<std::pair<StructuredOperator, StructuredOperator>> out;
  auto rand_scalar = [&] { return ComplexScalar(random_rational(rng, 5, 4), random_rational(rng, 2, 3)); };
  auto rand_matrix = [&](Eigen::Index n) {
    CMatrix m = CMatrix::Random(n, n);
    if (uniform_int(rng, 0, 1) == 0) m.col(0).setZero();
    return m;
  };

  // Matrix pairs, generally non-commuting and often singular.
  for (int i = 0; i < 30; ++i) {
    Eigen::Index n = uniform_int(rng, 1, 6);
    out.emplace_back(matrix_op(rand_matrix(n)), matrix_op(rand_matrix(n)));
  }

  std::vector<StructuredOperator> bases;
  for (const auto& e : diagonal_entries()) bases.push_back(e.op);
  std::size_t i = 0;
  while (out.size() < 100) {
    const StructuredOperator& a0 = bases[i++ % bases.size()];
    int mode = uniform_int(rng, 0, 3);
    StructuredOperator b0 = a0;
    switch (mode) {
      case 0: b0 = scale_shift(a0, rand_scalar(), rand_scalar()); break;
      case 1: b0 = scale_shift(algebra(a0, a0, AlgebraKind::Multiply), rand_scalar(), rand_scalar()); break;
      case 2: b0 = build_operator(std::nullopt, DiagonalBlock(PointFamily::constant(rand_scalar()))); break;
      default: {
        std::vector<Rational> cuts = candidate_cuts(a0);
        b0 = cuts.empty() ? scale_shift(a0, rand_scalar(), q(0)) : construct_agdrazin(a0, cuts.back()).x;
      }
    }
    if (uniform_int(rng, 0, 1) == 0) {
      out.emplace_back(a0, b0);
    } else {
      Eigen::Index n = uniform_int(rng, 1, 4);
      out.emplace_back(build_operator(MatrixBlock(rand_matrix(n)), *a0.diagonal()),
                       build_operator(MatrixBlock(rand_matrix(n)), *b0.diagonal()));
    }
  }
  return out;
}

Outcome criterion9() {
  Outcome o;
  std::size_t count = 0;
  std::size_t nonempty = 0;
  for (const auto& [a, b] : product_pairs()) {
    ++count;
    try {
      ProductCheck pc = sigma_ad_product_check(a, b);
      SpectralSet ab = sigma_ad_of(spectrum_of(algebra(a, b, AlgebraKind::Multiply)));
      SpectralSet ba = sigma_ad_of(spectrum_of(algebra(b, a, AlgebraKind::Multiply)));
      if (!pc.equal || !set_equal(ab, ba)) o.fail("pair " + std::to_string(count) + " differs");
      if (!ab.is_empty()) ++nonempty;
    } catch (const Error& e) {
      o.fail("pair " + std::to_string(count) + ": " + e.what());
    }
  }
  if (o.pass) o.detail << count << " pairs equal (" << nonempty << " with nonempty sigma_ad)";
  return o;
}

Outcome criterion10() {
  Outcome o;
  StructuredOperator t = harmonic();
  for (long k = 2; k <= 10; ++k) {
    Rational cut(2, 2 * k + 1);  // strictly between 1/(k+1) and 1/k
    InverseCertificate c = agdrazin_inverse(t, cut);
    MatrixBlock tk = truncate(*t.diagonal(), static_cast<std::size_t>(k));
    CMatrix d = drazin_inverse(tk).entries();
    for (long i = 1; i <= k + 50; ++i) {
      ComplexScalar e = c.x.diagonal()->entry(static_cast<std::size_t>(i));
      ComplexScalar expect = i <= k ? ComplexScalar(Rational(i)) : ComplexScalar(0);
      if (!exactly(e, expect)) o.fail("certificate entry " + std::to_string(i) + " not exact for k=" + std::to_string(k));
    }
    CMatrix lead(k, k);
    lead.setZero();
    for (long i = 1; i <= k; ++i) lead(i - 1, i - 1) = c.x.diagonal()->entry(static_cast<std::size_t>(i)).value();
    double err = spectral_norm(d - lead) / spectral_norm(lead);
    if (err > 1e-10) o.fail("truncation mismatch for k=" + std::to_string(k));
  }
  if (o.pass) o.detail << "k = 2..10 agree";
  return o;
}

}  // namespace

int main() {
  std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                 criterion6, criterion7, criterion8, criterion9, criterion10};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    auto t0 = Clock::now();
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o.fail(std::string("uncaught: ") + e.what());
    }
    if (!o.pass) ++failures;
    std::cout << "criterion " << (i + 1) << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail.str() << " ["
              << seconds_since(t0) << " s]" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
