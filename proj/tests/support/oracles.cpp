#include "oracles.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "agd/error.hpp"

namespace agd::testing {

namespace {

using C = std::complex<double>;

ComplexScalar q(long num, long den = 1) { return ComplexScalar(Rational(num, den)); }
ComplexScalar qc(long re_num, long re_den, long im_num, long im_den) {
  return ComplexScalar(Rational(re_num, re_den), Rational(im_num, im_den));
}

StructuredOperator diag_op(const PointFamily& f, std::map<std::size_t, ComplexScalar> overrides = {}) {
  return build_operator(std::nullopt, DiagonalBlock(f, std::move(overrides)));
}

StructuredOperator mixed_op(const CMatrix& m, const PointFamily& f) {
  return build_operator(MatrixBlock(m), DiagonalBlock(f));
}

StructuredOperator matrix_op(const CMatrix& m) { return build_operator(MatrixBlock(m), std::nullopt); }

CMatrix from_rows(std::initializer_list<std::initializer_list<C>> rows) {
  CMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (const auto& v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

}  // namespace

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

double uniform_real(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

Rational random_rational(Rng& rng, long max_num, long max_den) {
  long num = std::uniform_int_distribution<long>(-max_num, max_num)(rng);
  long den = std::uniform_int_distribution<long>(1, max_den)(rng);
  Rational r(num, den);
  r.canonicalize();
  return r;
}

CMatrix random_unitary(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> g;
  CMatrix z(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) z(i, j) = C(g(rng), g(rng));
  Eigen::HouseholderQR<CMatrix> qr(z);
  return qr.householderQ() * CMatrix::Identity(n, n);
}

CMatrix conditioned_matrix(Eigen::Index n, double cond, Rng& rng) {
  CMatrix u = random_unitary(n, rng);
  CMatrix v = random_unitary(n, rng);
  Eigen::VectorXcd s(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double t = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
    s(i) = std::pow(cond, t);
  }
  return u * s.asDiagonal() * v.adjoint();
}

double condition_number(const CMatrix& s) {
  Eigen::JacobiSVD<CMatrix> svd(s);
  const auto& sv = svd.singularValues();
  return sv(0) / sv(sv.size() - 1);
}

CMatrix triangular_with_diagonal(const std::vector<C>& diag, double coupling, Rng& rng) {
  auto n = static_cast<Eigen::Index>(diag.size());
  CMatrix t = CMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    t(i, i) = diag[static_cast<std::size_t>(i)];
    for (Eigen::Index j = i + 1; j < n; ++j)
      t(i, j) = C(uniform_real(rng, -coupling, coupling), uniform_real(rng, -coupling, coupling));
  }
  return t;
}

CMatrix jordan_nilpotent(const std::vector<int>& sizes) {
  Eigen::Index n = 0;
  for (int s : sizes) n += s;
  CMatrix m = CMatrix::Zero(n, n);
  Eigen::Index at = 0;
  for (int s : sizes) {
    for (int k = 0; k + 1 < s; ++k) m(at + k, at + k + 1) = 1.0;
    at += s;
  }
  return m;
}

CMatrix direct_sum(const CMatrix& a, const CMatrix& b) {
  CMatrix m = CMatrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  m.topLeftCorner(a.rows(), a.cols()) = a;
  m.bottomRightCorner(b.rows(), b.cols()) = b;
  return m;
}

DrazinCase random_drazin_case(Eigen::Index max_dim, double max_cond, Rng& rng) {
  int n = uniform_int(rng, 1, static_cast<int>(max_dim));
  int nil_dim = uniform_int(rng, 0, n);
  int core_dim = n - nil_dim;

  std::vector<int> blocks;
  int left = nil_dim;
  while (left > 0) {
    int s = uniform_int(rng, 1, left);
    blocks.push_back(s);
    left -= s;
  }
  int index = 0;
  for (int s : blocks) index = std::max(index, s);

  std::vector<C> eig;
  for (int i = 0; i < core_dim; ++i)
    eig.push_back(std::polar(uniform_real(rng, 0.5, 3.0), uniform_real(rng, -M_PI, M_PI)));
  CMatrix core = triangular_with_diagonal(eig, 0.5, rng);
  CMatrix nil = jordan_nilpotent(blocks);

  CMatrix block = direct_sum(core, nil);
  CMatrix core_inv = core_dim > 0 ? CMatrix(core.inverse()) : CMatrix(0, 0);
  CMatrix block_d = direct_sum(core_inv, CMatrix::Zero(nil_dim, nil_dim));

  double cond = std::exp(uniform_real(rng, 0.0, std::log(max_cond)));
  CMatrix s = conditioned_matrix(n, cond, rng);
  CMatrix s_inv = s.inverse();
  return DrazinCase{s * block * s_inv, s * block_d * s_inv, index, condition_number(s)};
}

std::vector<CorpusEntry> classification_corpus() {
  std::vector<CorpusEntry> out;
  auto add = [&](std::string label, StructuredOperator op, bool zero_centers = false) {
    out.push_back({std::move(label), std::move(op), zero_centers});
  };

  // Finite spectra.
  add("finite {2,5}", diag_op(PointFamily::finite({q(2), q(5)})));
  add("finite {0,1/2,3}", diag_op(PointFamily::finite({q(0), q(1, 2), q(3)})));
  add("finite {0}", diag_op(PointFamily::finite({q(0)})));
  add("finite {1/3,-2/7,1+i}", diag_op(PointFamily::finite({q(1, 3), q(-2, 7), qc(1, 1, 1, 1)})));
  add("finite {0,0,1}", diag_op(PointFamily::finite({q(0), q(0), q(1)})));
  add("finite {-1,1/4} with overrides", diag_op(PointFamily::finite({q(-1), q(1, 4)}), {{3, q(0)}, {6, q(7)}}));

  // Power families.
  add("harmonic", diag_op(PointFamily::power(q(1), Rational(1))));
  add("power -2/3 n^-1/2", diag_op(PointFamily::power(q(-2, 3), Rational(1, 2))));
  add("power (1+i)/2 n^-2", diag_op(PointFamily::power(qc(1, 2, 1, 2), Rational(2))));
  add("power 1/2 + 1/n", diag_op(PointFamily::power(q(1), Rational(1), q(1, 2))));
  add("power -1 + n^-3/5", diag_op(PointFamily::power(q(1, 5), Rational(3), q(-1))));
  add("power i + 3 n^-1/3", diag_op(PointFamily::power(q(3), Rational(1, 3), qc(0, 1, 1, 1))));
  add("harmonic with overrides", diag_op(PointFamily::power(q(1), Rational(1)), {{1, q(0)}, {2, q(7)}}));

  // Geometric families.
  add("geometric 2^-n", diag_op(PointFamily::geometric(q(1), q(1, 2))));
  add("geometric 2 (i/2)^n", diag_op(PointFamily::geometric(q(2), qc(0, 1, 1, 2))));
  add("geometric 1 - (2/3)^n/3", diag_op(PointFamily::geometric(q(-1, 3), q(2, 3), q(1))));
  add("geometric (1+i)/2 + (-1/2)^n", diag_op(PointFamily::geometric(q(1), q(-1, 2), qc(1, 2, 1, 2))));
  add("geometric 5 10^-n", diag_op(PointFamily::geometric(q(5), q(1, 10))));
  add("geometric 2^-n with zero override", diag_op(PointFamily::geometric(q(1), q(1, 2)), {{3, q(0)}}));
  add("geometric -3/4 + 3^-n/2", diag_op(PointFamily::geometric(q(1, 2), q(1, 3), q(-3, 4))));

  // Clusters.
  add("relative cluster at 1/m", diag_op(PointFamily::cluster(PointFamily::power(q(1), Rational(1)),
                                                              PointFamily::geometric(q(1, 4), q(1, 2)),
                                                              SpreadMode::Relative)), true);
  add("additive cluster at 1/m", diag_op(PointFamily::cluster(PointFamily::power(q(1), Rational(1)),
                                                              PointFamily::power(q(1, 10), Rational(1)))), true);
  add("cluster at {1,2}", diag_op(PointFamily::cluster(PointFamily::finite({q(1), q(2)}),
                                                       PointFamily::geometric(q(1, 8), q(1, 2)))));
  add("cluster at {0,1}", diag_op(PointFamily::cluster(PointFamily::finite({q(0), q(1)}),
                                                       PointFamily::power(q(1, 4), Rational(1)))));
  add("cluster at 1 + 2^-m", diag_op(PointFamily::cluster(PointFamily::geometric(q(1, 2), q(1, 2), q(1)),
                                                          PointFamily::geometric(q(1, 100), q(1, 2)))));
  add("relative cluster at 2 + 1/m", diag_op(PointFamily::cluster(PointFamily::power(q(1), Rational(1), q(2)),
                                                                  PointFamily::geometric(q(1, 10), q(1, 3)),
                                                                  SpreadMode::Relative, q(2))));
  add("relative cluster at 1/m^2", diag_op(PointFamily::cluster(PointFamily::power(q(1), Rational(2)),
                                                                PointFamily::power(q(1, 100), Rational(1)),
                                                                SpreadMode::Relative)), true);
  add("relative cluster at i^m/2^m", diag_op(PointFamily::cluster(PointFamily::geometric(qc(0, 1, 1, 2), q(1, 2)),
                                                                  PointFamily::geometric(q(1, 10), q(1, 2)),
                                                                  SpreadMode::Relative)), true);
  add("relative cluster at +-1/2", diag_op(PointFamily::cluster(PointFamily::finite({q(1, 2), q(-1, 2)}),
                                                                PointFamily::geometric(q(1, 16), q(1, 2)),
                                                                SpreadMode::Relative)));
  add("additive cluster at 3^-m with finite spread",
      diag_op(PointFamily::cluster(PointFamily::geometric(q(1), q(1, 3)), PointFamily::finite({q(0), q(1, 100)}))));

  // Matrix blocks next to diagonal families.
  add("jordan(2) + harmonic", mixed_op(jordan_nilpotent({2}), PointFamily::power(q(1), Rational(1))));
  add("diag(3,0) + geometric", mixed_op(from_rows({{3.0, 0.0}, {0.0, 0.0}}), PointFamily::geometric(q(1), q(1, 2))));
  add("[[2]] + geometric", mixed_op(from_rows({{2.0}}), PointFamily::geometric(q(1), q(1, 2))));
  add("[[1,1],[0,0]] + relative cluster",
      mixed_op(from_rows({{1.0, 1.0}, {0.0, 0.0}}),
               PointFamily::cluster(PointFamily::power(q(1), Rational(1)), PointFamily::geometric(q(1, 4), q(1, 2)),
                                    SpreadMode::Relative)), true);
  add("rotation + finite", mixed_op(from_rows({{0.0, -1.0}, {1.0, 0.0}}), PointFamily::finite({q(0), q(2)})));
  add("jordan(3) + power offset 1", mixed_op(jordan_nilpotent({3}), PointFamily::power(q(1), Rational(1), q(1))));
  add("[[1/2, 1],[0, 1/4]] + harmonic",
      mixed_op(from_rows({{0.5, 1.0}, {0.0, 0.25}}), PointFamily::power(q(1), Rational(1))));
  add("[[4, 1],[0, 0]] + cluster at {1,2}",
      mixed_op(from_rows({{4.0, 1.0}, {0.0, 0.0}}),
               PointFamily::cluster(PointFamily::finite({q(1), q(2)}), PointFamily::geometric(q(1, 8), q(1, 2)))));
  add("[[0.3]] + power 1/2 + 1/n", mixed_op(from_rows({{0.3}}), PointFamily::power(q(1), Rational(1), q(1, 2))));
  add("[[i, 0],[0, 0]] + geometric 5 10^-n",
      mixed_op(from_rows({{C(0, 1), 0.0}, {0.0, 0.0}}), PointFamily::geometric(q(5), q(1, 10))));
  add("jordan(2,1) + additive cluster at 1/m",
      mixed_op(jordan_nilpotent({2, 1}), PointFamily::cluster(PointFamily::power(q(1), Rational(1)),
                                                              PointFamily::power(q(1, 10), Rational(1)))), true);
  add("[[2, 1],[0, 3]] + cluster at {0,1}",
      mixed_op(from_rows({{2.0, 1.0}, {0.0, 3.0}}),
               PointFamily::cluster(PointFamily::finite({q(0), q(1)}), PointFamily::power(q(1, 4), Rational(1)))));
  add("[[0.05]] + harmonic", mixed_op(from_rows({{0.05}}), PointFamily::power(q(1), Rational(1))));
  add("[[1.5, 0],[0, -0.7]] + geometric 1 - (2/3)^n/3",
      mixed_op(from_rows({{1.5, 0.0}, {0.0, -0.7}}), PointFamily::geometric(q(-1, 3), q(2, 3), q(1))));

  // Matrix blocks alone, conjugated core-nilpotent forms.
  Rng rng(20241016);
  for (int i = 0; i < 8; ++i) {
    DrazinCase c = random_drazin_case(5, 50.0, rng);
    add("matrix case " + std::to_string(i), matrix_op(c.a));
  }
  add("matrix zero", matrix_op(CMatrix::Zero(3, 3)));
  add("matrix jordan(4)", matrix_op(jordan_nilpotent({4})));
  return out;
}

std::vector<double> sampled_moduli(const StructuredOperator& op, std::size_t depth) {
  std::vector<double> out;
  if (op.has_diagonal()) {
    for (std::size_t k = 1; k <= depth; ++k) out.push_back(op.diagonal()->entry(k).abs());
  }
  if (op.has_matrix()) {
    Eigen::ComplexEigenSolver<CMatrix> es(op.matrix().entries());
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      double m = std::abs(es.eigenvalues()(i));
      // Eigenvalues of a nilpotent part come out at roughly eps^(1/index).
      out.push_back(m < 1e-4 * std::max(1.0, op.matrix().norm()) ? 0.0 : m);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Rational> gap_scan_cuts(const StructuredOperator& op, std::size_t depth, std::size_t max_cuts) {
  std::vector<double> m = sampled_moduli(op, depth);
  std::vector<double> nonzero;
  for (double v : m)
    if (v > 0) nonzero.push_back(v);

  struct Gap {
    double ratio;
    double cut;
  };
  std::vector<Gap> gaps;
  for (std::size_t i = 0; i + 1 < nonzero.size(); ++i) {
    double lo = nonzero[i];
    double hi = nonzero[i + 1];
    if (hi > lo * (1 + 1e-6)) gaps.push_back({hi / lo, std::sqrt(lo * hi)});
  }
  std::sort(gaps.begin(), gaps.end(), [](const Gap& a, const Gap& b) { return a.ratio > b.ratio; });

  std::vector<Rational> cuts;
  if (!nonzero.empty()) {
    // Off simple fractions so the circle does not land on a family term.
    cuts.emplace_back(nonzero.front() * 0.4871);
    cuts.emplace_back(nonzero.back() * 2.0713);
  } else {
    cuts.emplace_back(1);
  }
  for (std::size_t i = 0; i < gaps.size() && cuts.size() < max_cuts; ++i) cuts.emplace_back(gaps[i].cut);
  return cuts;
}

ConstructiveSearch constructive_search(const StructuredOperator& op, std::size_t depth, std::size_t max_cuts) {
  ConstructiveSearch out;
  for (const Rational& cut : gap_scan_cuts(op, depth, max_cuts)) {
    try {
      InverseCertificate c = construct_agdrazin(op, cut);
      VerifyResult v = verify_certificate(op, c.x);
      if (!v.ok) continue;
      out.found = true;
      out.verified_cuts.push_back(cut);
      if (v.card.finite) out.found_finite_card = true;
    } catch (const Error& e) {
      out.errors.emplace_back(code_name(e.code()));
    }
  }
  return out;
}

}  // namespace agd::testing
