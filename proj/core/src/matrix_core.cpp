#include "agd/matrix_core.hpp"

#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "agd/error.hpp"

namespace agd {

using cd = std::complex<double>;

double spectral_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

MatrixBlock::MatrixBlock(CMatrix entries, double reference_scale) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols()) throw Error(ErrorCode::ShapeMismatch, "matrix block must be square");
  if (!entries_.allFinite()) throw Error(ErrorCode::ParseError, "matrix block has non-finite entries");
  norm_ = spectral_norm(entries_);
  scale_ = std::max(norm_, reference_scale);
}

MatrixBlock MatrixBlock::identity(Eigen::Index n) { return MatrixBlock(CMatrix::Identity(n, n)); }

MatrixBlock MatrixBlock::zero(Eigen::Index n) { return MatrixBlock(CMatrix::Zero(n, n)); }

namespace {

void require_same_dim(const MatrixBlock& a, const MatrixBlock& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::ShapeMismatch, "matrix blocks differ in dimension");
}

}  // namespace

MatrixBlock operator+(const MatrixBlock& a, const MatrixBlock& b) {
  require_same_dim(a, b);
  return MatrixBlock(a.entries_ + b.entries_, std::max(a.scale_, b.scale_));
}

MatrixBlock operator-(const MatrixBlock& a, const MatrixBlock& b) {
  require_same_dim(a, b);
  return MatrixBlock(a.entries_ - b.entries_, std::max(a.scale_, b.scale_));
}

MatrixBlock operator*(const MatrixBlock& a, const MatrixBlock& b) {
  require_same_dim(a, b);
  // First-order error bound: errors already present in one factor are amplified by the other.
  return MatrixBlock(a.entries_ * b.entries_, std::max(a.scale_ * b.norm_, a.norm_ * b.scale_));
}

MatrixBlock MatrixBlock::scale_shift(cd alpha, cd beta) const {
  CMatrix m = alpha * entries_;
  m.diagonal().array() += beta;
  return MatrixBlock(std::move(m), std::abs(alpha) * scale_ + std::abs(beta));
}

namespace {

// Swaps the adjacent diagonal entries k and k+1 of the upper triangular T,
// updating the unitary Q so that Q T Q* is preserved.
void swap_schur(CMatrix& t, CMatrix& q, Eigen::Index k) {
  cd t11 = t(k, k);
  cd t22 = t(k + 1, k + 1);
  Eigen::JacobiRotation<cd> g;
  g.makeGivens(t(k, k + 1), t22 - t11);
  t.applyOnTheLeft(k, k + 1, g.adjoint());
  t.applyOnTheRight(k, k + 1, g);
  q.applyOnTheRight(k, k + 1, g);
  t(k + 1, k) = 0.0;
  t(k, k) = t22;
  t(k + 1, k + 1) = t11;
}

// Solves A Y - Y B = C for upper triangular A and B with disjoint spectra.
CMatrix triangular_sylvester(const CMatrix& a, const CMatrix& b, const CMatrix& c) {
  CMatrix y(a.rows(), b.rows());
  for (Eigen::Index j = 0; j < b.rows(); ++j) {
    Eigen::VectorXcd rhs = c.col(j);
    for (Eigen::Index i = 0; i < j; ++i) rhs += y.col(i) * b(i, j);
    CMatrix shifted = a;
    shifted.diagonal().array() -= b(j, j);
    y.col(j) = shifted.triangularView<Eigen::Upper>().solve(rhs);
  }
  return y;
}

}  // namespace

ProjectionPair riesz_projection(const MatrixBlock& a, const Rational& radius, const Tolerances& tol) {
  if (radius <= 0) throw Error(ErrorCode::CutInvalid, "cut radius must be positive");
  const Eigen::Index n = a.dim();
  ProjectionPair out;
  if (n == 0) {
    out.p = MatrixBlock(CMatrix(0, 0));
    out.complement = out.p;
    return out;
  }
  double eps = radius.get_d();
  Eigen::ComplexSchur<CMatrix> schur(a.entries());
  CMatrix t = schur.matrixT();
  CMatrix q = schur.matrixU();
  std::vector<bool> inside(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double m = std::abs(t(i, i));
    if (std::fabs(m - eps) < tol.gap * eps) {
      throw Error(ErrorCode::CircleHitsSpectrum, "an eigenvalue lies on the cut circle");
    }
    inside[i] = m < eps;
  }
  double min_sep = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (inside[i] && !inside[j]) min_sep = std::min(min_sep, std::abs(t(i, i) - t(j, j)));
    }
  }
  if (min_sep < tol.separation * std::max(1.0, a.norm())) {
    throw Error(ErrorCode::IllConditionedSplit, "spectral parts on either side of the cut are too close");
  }
  // Bubble the inside eigenvalues to the leading positions.
  Eigen::Index next = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!inside[i]) continue;
    for (Eigen::Index k = i; k > next; --k) {
      swap_schur(t, q, k - 1);
      std::swap(inside[k - 1], inside[k]);
    }
    ++next;
  }
  const Eigen::Index k = next;
  CMatrix pt = CMatrix::Zero(n, n);
  if (k > 0) {
    pt.topLeftCorner(k, k).setIdentity();
    if (k < n) {
      CMatrix y = triangular_sylvester(t.topLeftCorner(k, k), t.bottomRightCorner(n - k, n - k),
                                       -t.topRightCorner(k, n - k));
      pt.topRightCorner(k, n - k) = -y;
    }
  }
  CMatrix p = q * pt * q.adjoint();
  out.p = MatrixBlock(p);
  out.complement = MatrixBlock(CMatrix::Identity(n, n) - p);
  out.inside_dim = static_cast<int>(k);
  out.outside_dim = static_cast<int>(n - k);
  return out;
}

double rank_threshold(const MatrixBlock& a, const Tolerances& tol) {
  return std::max(tol.rank * a.norm(), 64.0 * std::numeric_limits<double>::epsilon() * a.scale());
}

NilpotentSplit nilpotent_split(const MatrixBlock& a, const Tolerances& tol) {
  const Eigen::Index n = a.dim();
  NilpotentSplit out;
  out.u = CMatrix::Identity(n, n);
  CMatrix work = a.entries();
  double threshold = rank_threshold(a, tol);
  Eigen::Index offset = 0;
  while (offset < n) {
    const Eigen::Index m = n - offset;
    CMatrix trailing = work.bottomRightCorner(m, m);
    Eigen::JacobiSVD<CMatrix> svd(trailing, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    Eigen::Index rank = 0;
    while (rank < m && s(rank) > threshold) ++rank;
    const Eigen::Index nullity = m - rank;
    if (nullity == 0) break;
    ++out.index;
    CMatrix w(m, m);
    w.leftCols(nullity) = svd.matrixV().rightCols(nullity);
    w.rightCols(rank) = svd.matrixV().leftCols(rank);
    out.u.rightCols(m) = out.u.rightCols(m) * w;
    work = out.u.adjoint() * a.entries() * out.u;
    work.block(offset, offset, m, nullity).setZero();
    offset += nullity;
  }
  // Entries below the staircase are rounding noise by construction.
  work.bottomLeftCorner(n - offset, offset).setZero();
  out.nilpotent_dim = offset;
  out.nilpotent = work.topLeftCorner(offset, offset);
  out.coupling = work.topRightCorner(offset, n - offset);
  out.core = work.bottomRightCorner(n - offset, n - offset);
  return out;
}

int drazin_index(const MatrixBlock& a, const Tolerances& tol) { return nilpotent_split(a, tol).index; }

namespace {

// Y with N Y - Y C = -A12, so that [[I, Y], [0, I]] decouples the staircase form.
CMatrix decoupling(const NilpotentSplit& sp, const CMatrix& core_inv) {
  CMatrix y = CMatrix::Zero(sp.coupling.rows(), sp.coupling.cols());
  CMatrix term = sp.coupling * core_inv;
  for (int j = 0; j < sp.index; ++j) {
    y += term;
    term = sp.nilpotent * term * core_inv;
  }
  return y;
}

}  // namespace

MatrixBlock drazin_inverse(const MatrixBlock& a, const Tolerances& tol) {
  const Eigen::Index n = a.dim();
  NilpotentSplit sp = nilpotent_split(a, tol);
  const Eigen::Index k = sp.nilpotent_dim;
  if (k == n) return MatrixBlock(CMatrix::Zero(n, n));
  CMatrix core_inv = sp.core.partialPivLu().inverse();
  CMatrix y = decoupling(sp, core_inv);
  CMatrix d = CMatrix::Zero(n, n);
  d.topRightCorner(k, n - k) = y * core_inv;
  d.bottomRightCorner(n - k, n - k) = core_inv;
  return MatrixBlock(sp.u * d * sp.u.adjoint());
}

MatrixBlock group_inverse(const MatrixBlock& a, const Tolerances& tol) {
  int index = drazin_index(a, tol);
  if (index >= 2) throw Error(ErrorCode::IndexTooLarge, "group inverse needs index <= 1, found " + std::to_string(index));
  MatrixBlock x = drazin_inverse(a, tol);
  double res = (a.entries() * x.entries() * a.entries() - a.entries()).norm();
  double denom = std::max(a.scale() * a.scale() * x.norm() + a.scale(), 1e-300);
  if (res / denom > std::max(tol.residual, 1e-8)) {
    throw Error(ErrorCode::IllConditionedSplit, "group inverse residual too large");
  }
  return x;
}

MatrixBlock nilpotent_projection(const MatrixBlock& a, const Tolerances& tol) {
  const Eigen::Index n = a.dim();
  NilpotentSplit sp = nilpotent_split(a, tol);
  const Eigen::Index k = sp.nilpotent_dim;
  CMatrix p = CMatrix::Zero(n, n);
  if (k == 0) return MatrixBlock(p);
  p.topLeftCorner(k, k).setIdentity();
  if (k < n) {
    CMatrix core_inv = sp.core.partialPivLu().inverse();
    p.topRightCorner(k, n - k) = -decoupling(sp, core_inv);
  }
  return MatrixBlock(sp.u * p * sp.u.adjoint());
}

CoreNilpotent core_nilpotent(const MatrixBlock& a, const Tolerances& tol) {
  MatrixBlock p0 = nilpotent_projection(a, tol);
  CMatrix nil = a.entries() * p0.entries();
  CMatrix core = a.entries() - nil;
  return {MatrixBlock(core, a.scale()), MatrixBlock(nil, a.scale())};
}

std::vector<ComplexScalar> eigenvalues(const MatrixBlock& a, const Tolerances& tol) {
  std::vector<ComplexScalar> out;
  if (a.dim() == 0) return out;
  NilpotentSplit sp = nilpotent_split(a, tol);
  if (sp.nilpotent_dim > 0) out.emplace_back(0);
  if (sp.core.rows() == 0) return out;
  Eigen::ComplexEigenSolver<CMatrix> solver(sp.core, false);
  std::vector<cd> values(solver.eigenvalues().data(), solver.eigenvalues().data() + sp.core.rows());
  std::sort(values.begin(), values.end(), [](cd x, cd y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  });
  double radius = tol.cluster * std::max(a.scale(), 1e-300);
  std::vector<bool> used(values.size(), false);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (used[i]) continue;
    cd sum = values[i];
    int count = 1;
    used[i] = true;
    for (std::size_t j = i + 1; j < values.size(); ++j) {
      if (!used[j] && std::abs(values[j] - values[i]) <= radius) {
        sum += values[j];
        ++count;
        used[j] = true;
      }
    }
    out.push_back(ComplexScalar::approximate(sum / static_cast<double>(count)));
  }
  return out;
}

}  // namespace agd
