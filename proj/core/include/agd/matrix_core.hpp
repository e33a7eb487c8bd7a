#pragma once

#include <Eigen/Dense>
#include <vector>

#include "agd/scalar.hpp"
#include "agd/tolerances.hpp"

namespace agd {

using CMatrix = Eigen::MatrixXcd;

// Dense complex square matrix. `scale` is the magnitude that rounding errors in
// this block are measured against; it is at least the spectral norm and is
// inherited through arithmetic so that a block computed as a difference of large
// terms is not mistaken for an exactly small one.
class MatrixBlock {
 public:
  MatrixBlock() = default;
  explicit MatrixBlock(CMatrix entries, double reference_scale = 0.0);
  static MatrixBlock identity(Eigen::Index n);
  static MatrixBlock zero(Eigen::Index n);

  Eigen::Index dim() const { return entries_.rows(); }
  const CMatrix& entries() const { return entries_; }
  double norm() const { return norm_; }
  double scale() const { return scale_; }

  friend MatrixBlock operator+(const MatrixBlock& a, const MatrixBlock& b);
  friend MatrixBlock operator-(const MatrixBlock& a, const MatrixBlock& b);
  friend MatrixBlock operator*(const MatrixBlock& a, const MatrixBlock& b);
  // alpha * a + beta * I
  MatrixBlock scale_shift(std::complex<double> alpha, std::complex<double> beta) const;

 private:
  CMatrix entries_;
  double norm_ = 0.0;
  double scale_ = 0.0;
};

double spectral_norm(const CMatrix& m);

// Singular values at or below this are treated as zero: tol.rank relative to the
// norm, but never below the rounding noise carried by the block's scale.
double rank_threshold(const MatrixBlock& a, const Tolerances& tol = {});

struct ProjectionPair {
  MatrixBlock p;
  MatrixBlock complement;
  int inside_dim = 0;
  int outside_dim = 0;
};

// Spectral idempotent for the eigenvalues with |lambda| < radius.
ProjectionPair riesz_projection(const MatrixBlock& a, const Rational& radius, const Tolerances& tol = {});

// Unitary staircase form U* A U = [[N, A12], [0, C]] with N nilpotent and C nonsingular.
struct NilpotentSplit {
  CMatrix u;
  Eigen::Index nilpotent_dim = 0;
  int index = 0;
  CMatrix nilpotent;
  CMatrix coupling;
  CMatrix core;
};

NilpotentSplit nilpotent_split(const MatrixBlock& a, const Tolerances& tol = {});
int drazin_index(const MatrixBlock& a, const Tolerances& tol = {});
MatrixBlock drazin_inverse(const MatrixBlock& a, const Tolerances& tol = {});
MatrixBlock group_inverse(const MatrixBlock& a, const Tolerances& tol = {});
// Spectral idempotent onto the generalized null space (eigenvalue 0).
MatrixBlock nilpotent_projection(const MatrixBlock& a, const Tolerances& tol = {});

struct CoreNilpotent {
  MatrixBlock core;
  MatrixBlock nilpotent;
};
CoreNilpotent core_nilpotent(const MatrixBlock& a, const Tolerances& tol = {});

// Distinct eigenvalues; the zero eigenvalue of the nilpotent part is reported
// as an exact 0 and the remaining ones are clustered within tol.cluster * scale.
std::vector<ComplexScalar> eigenvalues(const MatrixBlock& a, const Tolerances& tol = {});

}  // namespace agd
