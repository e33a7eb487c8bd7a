#pragma once

#include <cstddef>

namespace agd {

// Numerical thresholds shared by every module. Matrix thresholds are relative
// to the operator norm of the block under test unless stated otherwise.
struct Tolerances {
  double residual = 1e-10;    // identity residuals (commutation, xax = x, ...)
  double idempotent = 1e-10;  // p^2 = p residual
  double cluster = 1e-8;      // eigenvalue clustering, relative to |A|
  double rank = 1e-10;        // singular value cut-off, relative to |A|
  double separation = 1e-6;   // minimum distance between split spectral parts
  double gap = 1e-8;          // minimum distance of a spectrum to a cut circle, relative to the radius
  double equality = 1e-12;    // absolute equality of approximate scalars
  std::size_t sampling_depth = 1000;  // diagonal entries checked numerically
};

}  // namespace agd
