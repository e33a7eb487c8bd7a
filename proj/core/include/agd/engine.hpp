#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "agd/operator_model.hpp"

namespace agd {

// Cardinality of the spectrum of a - a^2 x.
struct CardClass {
  bool finite = false;
  std::size_t count = 0;
  bool operator==(const CardClass& other) const = default;
  std::string to_string() const;
};

using ResidualTable = std::vector<std::pair<std::string, double>>;

// The splitting induced by a cut: the invertible summand lives on the range of
// 1 - p and carries the spectrum outside the cut, the other summand carries the rest.
struct ReducedPair {
  SpectralSet core_spectrum;
  SpectralSet small_spectrum;
  bool core_invertible = false;
  bool small_acc = false;
  int matrix_core_dim = 0;
  int matrix_small_dim = 0;
  std::string describe() const;
};

struct InverseCertificate {
  StructuredOperator x;
  StructuredOperator p;
  std::optional<Rational> cut;
  // "(a+p)^-1(1-p)", "a(1-p)+p fallback", "inverse" or "drazin".
  std::string formula;
  ResidualTable residuals;
  CardClass card;
  SpectralSet residual_spectrum;
  std::optional<ReducedPair> reduced;
  bool verified = false;
};

struct VerifyResult {
  bool ok = false;
  bool commutes = false;
  bool xax_equals_x = false;
  bool residual_acc = false;
  ResidualTable residuals;
  CardClass card;
  SpectralSet residual_spectrum;
};

struct QuasipolarWitness {
  StructuredOperator q;
  bool idempotent = false;
  bool commutes = false;
  // q = a x = x a exhibits q in aA and Aa.
  bool in_both_ideals = false;
  bool complement_acc = false;
  bool core_invertible = false;
  ResidualTable residuals;
};

struct CoreAccDecomposition {
  StructuredOperator x_part;
  StructuredOperator y_part;
  bool sums_to_a = false;
  bool annihilate = false;
  bool x_group_invertible = false;
  bool y_acc = false;
  ResidualTable residuals;
  bool ok() const { return sums_to_a && annihilate && x_group_invertible && y_acc; }
};

struct FamilyPair {
  std::size_t first = 0;
  std::size_t second = 0;
  bool same_split = false;
  bool same_inverse = false;
};

struct InverseFamily {
  std::vector<InverseCertificate> certificates;
  std::vector<FamilyPair> pairs;
};

struct ProductCheck {
  SpectralSet ab;
  SpectralSet ba;
  bool equal = false;
};

ClassFlags classify_element(const StructuredOperator& a, const Tolerances& tol = {});

// Checks that the circle |z| = cut separates a part with acc in {0} from the rest.
// Throws CutInvalid otherwise.
void validate_cut(const StructuredOperator& a, const Rational& cut, const Tolerances& tol = {});

// The spectral idempotent of a for the part inside |z| < cut.
StructuredOperator cut_projection(const StructuredOperator& a, const Rational& cut, const Tolerances& tol = {});

// x = (a+p)^-1 (1-p) from a validated cut, without checking the classification
// flag or verifying the result.
InverseCertificate construct_agdrazin(const StructuredOperator& a, const Rational& cut, const Tolerances& tol = {});

InverseCertificate gdrazin_inverse(const StructuredOperator& a, const Tolerances& tol = {});
// For this operator class the Drazin inverse coincides with the g-Drazin inverse
// whenever it exists; the matrix block always has one.
InverseCertificate drazin_certificate(const StructuredOperator& a, const Tolerances& tol = {});
InverseCertificate agdrazin_inverse(const StructuredOperator& a, const Rational& cut, const Tolerances& tol = {});

VerifyResult verify_certificate(const StructuredOperator& a, const StructuredOperator& x, const Tolerances& tol = {});
QuasipolarWitness quasipolar_witness(const StructuredOperator& a, const StructuredOperator& x,
                                     const Tolerances& tol = {});
CoreAccDecomposition core_acc_decompose(const StructuredOperator& a, const Rational& cut, const Tolerances& tol = {});
InverseFamily nonuniqueness_family(const StructuredOperator& a, const std::vector<Rational>& cuts,
                                   const Tolerances& tol = {});
ProductCheck sigma_ad_product_check(const StructuredOperator& a, const StructuredOperator& b,
                                    const Tolerances& tol = {});

// Parts of a spectrum inside |z| < radius and outside |z| > radius.
SpectralSet spectrum_inside(const SpectralSet& s, const Rational& radius);
SpectralSet spectrum_outside(const SpectralSet& s, const Rational& radius);

// Valid cuts, one per modulus gap below the smallest nonzero accumulation
// modulus, in increasing order. When the spectrum accumulates at 0 only the
// gaps among the largest 513 moduli are scanned.
std::vector<Rational> candidate_cuts(const StructuredOperator& a, const Tolerances& tol = {});
// The geometric midpoint of the widest relative gap between nonzero moduli; a cut
// in the gap around 0 or above the whole spectrum only when no such gap exists.
std::optional<Rational> auto_cut(const StructuredOperator& a, const Tolerances& tol = {});

}  // namespace agd
