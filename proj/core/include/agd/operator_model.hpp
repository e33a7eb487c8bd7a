#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "agd/matrix_core.hpp"
#include "agd/point_family.hpp"
#include "agd/rational_map.hpp"
#include "agd/spectral_set.hpp"

namespace agd {

// diag(d_1, d_2, ...) on l^2. Position n (1-based) holds map_r(f_{n-1}) where f
// is the base family and r the modulus region of f_{n-1} cut out by `cuts`;
// overridden positions hold their own values. A block with no cuts and the
// identity map is "pure": its entries are the family terms themselves.
class DiagonalBlock {
 public:
  explicit DiagonalBlock(PointFamily base, std::map<std::size_t, ComplexScalar> overrides = {});
  DiagonalBlock(PointFamily base, std::vector<Rational> cuts, std::vector<RationalMap> maps,
                std::map<std::size_t, ComplexScalar> overrides = {});

  const PointFamily& base() const { return base_; }
  const std::vector<Rational>& cuts() const { return cuts_; }
  const std::vector<RationalMap>& maps() const { return maps_; }
  const std::map<std::size_t, ComplexScalar>& overrides() const { return overrides_; }
  bool pure() const { return cuts_.empty() && maps_.front().is_identity(); }
  bool exact() const;

  ComplexScalar entry(std::size_t position) const;
  ModulusWindow region(std::size_t r) const;
  const RationalMap& map_for(const ComplexScalar& base_value) const;
  SpectralSet spectrum() const;
  // Every entry is zero.
  bool is_zero() const;
  std::string describe() const;

 private:
  void normalize();

  PointFamily base_;
  std::vector<Rational> cuts_;
  std::vector<RationalMap> maps_;
  std::map<std::size_t, ComplexScalar> overrides_;
};

enum class AlgebraKind { Add, Subtract, Multiply };

DiagonalBlock combine(const DiagonalBlock& a, const DiagonalBlock& b, AlgebraKind kind);
DiagonalBlock reciprocal(const DiagonalBlock& d);
DiagonalBlock scale_shift(const DiagonalBlock& d, const ComplexScalar& alpha, const ComplexScalar& beta);
// diag(1 if |d_n| < radius else 0) for a pure block.
DiagonalBlock indicator_below(const DiagonalBlock& d, const Rational& radius);
// Leading k x k section as a dense matrix.
MatrixBlock truncate(const DiagonalBlock& d, std::size_t k);

// M (+) D on C^n (+) l^2. Either block may be missing, not both.
class StructuredOperator {
 public:
  StructuredOperator(MatrixBlock m, std::optional<DiagonalBlock> d);

  const MatrixBlock& matrix() const { return m_; }
  const std::optional<DiagonalBlock>& diagonal() const { return d_; }
  bool has_matrix() const { return m_.dim() > 0; }
  bool has_diagonal() const { return d_.has_value(); }
  // Exact mode: no matrix block and exact diagonal data.
  bool exact() const { return !has_matrix() && d_ && d_->exact(); }
  std::string describe() const;

 private:
  MatrixBlock m_;
  std::optional<DiagonalBlock> d_;
};

StructuredOperator build_operator(std::optional<MatrixBlock> m, std::optional<DiagonalBlock> d);
SpectralSet spectrum_of(const StructuredOperator& op, const Tolerances& tol = {});
StructuredOperator algebra(const StructuredOperator& a, const StructuredOperator& b, AlgebraKind kind);
StructuredOperator scale_shift(const StructuredOperator& op, const ComplexScalar& alpha, const ComplexScalar& beta);
// The identity (alpha = 0, beta = 1) of the same shape.
StructuredOperator unit_like(const StructuredOperator& op);
StructuredOperator zero_like(const StructuredOperator& op);
// Throws NotInvertible when 0 lies in the spectrum.
StructuredOperator inverse(const StructuredOperator& op, const Tolerances& tol = {});

struct StructureReport {
  bool commutes = false;
  bool idempotent = false;
  double commute_residual = 0.0;
  double idempotent_residual = 0.0;
};

// Commutation of op1 with op2 (when given) and idempotence of op1 (and op2).
StructureReport structure_checks(const StructuredOperator& op1, const std::optional<StructuredOperator>& op2,
                                 const Tolerances& tol = {});

StructuredOperator finite_rank_perturb(const StructuredOperator& op, const std::map<std::size_t, ComplexScalar>& edits,
                                       const std::optional<MatrixBlock>& matrix_delta);

// Matrix blocks agree within tol.residual relative to their scale, diagonal blocks agree entrywise.
bool operators_equal(const StructuredOperator& a, const StructuredOperator& b, const Tolerances& tol = {});

// ||r|| / denominator with 0/0 read as 0.
double relative_residual(const CMatrix& r, double denominator);

}  // namespace agd
