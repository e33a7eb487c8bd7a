#pragma once

#include <complex>
#include <random>
#include <string>
#include <vector>

#include "agd/engine.hpp"

namespace agd::testing {

using Rng = std::mt19937_64;

// Random unitary from the QR factorization of a complex Gaussian matrix.
CMatrix random_unitary(Eigen::Index n, Rng& rng);
// U diag(s) V* with singular values log-spaced in [1, cond].
CMatrix conditioned_matrix(Eigen::Index n, double cond, Rng& rng);
// 2-norm condition number computed from singular values.
double condition_number(const CMatrix& s);

// Upper triangular matrix with the given diagonal and a random strictly upper part.
CMatrix triangular_with_diagonal(const std::vector<std::complex<double>>& diag, double coupling, Rng& rng);
// Block diagonal of shift matrices (ones on the superdiagonal) with the given block sizes.
CMatrix jordan_nilpotent(const std::vector<int>& sizes);
CMatrix direct_sum(const CMatrix& a, const CMatrix& b);

// A conjugated core-nilpotent form A = S (C (+) N) S^-1 together with the
// Drazin inverse S (C^-1 (+) 0) S^-1 and the nilpotency index of N.
struct DrazinCase {
  CMatrix a;
  CMatrix drazin;
  int index = 0;
  double cond = 0.0;
};
DrazinCase random_drazin_case(Eigen::Index max_dim, double max_cond, Rng& rng);

// Random rational p/q with |p| <= max_num, 1 <= q <= max_den.
Rational random_rational(Rng& rng, long max_num, long max_den);
int uniform_int(Rng& rng, int lo, int hi);
double uniform_real(Rng& rng, double lo, double hi);

// One operator of the classification corpus and how it was produced.
struct CorpusEntry {
  std::string label;
  StructuredOperator op;
  // Cluster whose centers accumulate at 0, so 0 is an accumulation point of sigma_d.
  bool zero_centers = false;
};
// Deterministic corpus mixing every family kind, matrix blocks and overrides.
std::vector<CorpusEntry> classification_corpus();

// Moduli of the first `depth` diagonal entries and of the matrix eigenvalues,
// computed with Eigen directly.
std::vector<double> sampled_moduli(const StructuredOperator& op, std::size_t depth);
// Exact rational cuts at the geometric midpoints of the widest gaps between
// sampled moduli, plus one below the smallest nonzero modulus and one above the largest.
std::vector<Rational> gap_scan_cuts(const StructuredOperator& op, std::size_t depth, std::size_t max_cuts);

// Outcome of searching for a verified certificate over the scanned cuts.
struct ConstructiveSearch {
  bool found = false;
  bool found_finite_card = false;
  std::vector<Rational> verified_cuts;
  std::vector<std::string> errors;
};
ConstructiveSearch constructive_search(const StructuredOperator& op, std::size_t depth = 400, std::size_t max_cuts = 12);

}  // namespace agd::testing
