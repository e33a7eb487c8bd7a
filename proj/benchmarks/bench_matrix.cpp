#include <benchmark/benchmark.h>

#include <complex>
#include <random>

#include "agd/matrix_core.hpp"

namespace {

using agd::CMatrix;

// S diag(d) S^-1 with half the eigenvalues of modulus in [2, 3], a quarter in [0.1, 0.5]
// and the rest on a single nilpotent Jordan chain, so every split has work to do.
CMatrix split_matrix(Eigen::Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss;
  CMatrix block = CMatrix::Zero(n, n);
  Eigen::Index big = n / 2;
  Eigen::Index small = n / 4;
  for (Eigen::Index i = 0; i < n; ++i) {
    double phase = 2.0 * M_PI * unit(rng);
    if (i < big) block(i, i) = std::polar(2.0 + unit(rng), phase);
    else if (i < big + small) block(i, i) = std::polar(0.1 + 0.4 * unit(rng), phase);
    else if (i + 1 < n) block(i, i + 1) = 1.0;
  }
  CMatrix s(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) s(r, c) = {gauss(rng), gauss(rng)};
  s += 2.0 * std::sqrt(static_cast<double>(n)) * CMatrix::Identity(n, n);
  return s * block * s.inverse();
}

void BM_RieszProjection(benchmark::State& state) {
  std::mt19937_64 rng(1);
  agd::MatrixBlock a(split_matrix(state.range(0), rng));
  for (auto _ : state) {
    auto pp = agd::riesz_projection(a, agd::Rational(1));
    benchmark::DoNotOptimize(pp);
  }
}
BENCHMARK(BM_RieszProjection)->RangeMultiplier(2)->Range(4, 64);

void BM_DrazinInverse(benchmark::State& state) {
  std::mt19937_64 rng(2);
  agd::MatrixBlock a(split_matrix(state.range(0), rng));
  for (auto _ : state) {
    auto x = agd::drazin_inverse(a);
    benchmark::DoNotOptimize(x);
  }
}
BENCHMARK(BM_DrazinInverse)->RangeMultiplier(2)->Range(4, 64);

void BM_DrazinIndex(benchmark::State& state) {
  std::mt19937_64 rng(3);
  agd::MatrixBlock a(split_matrix(state.range(0), rng));
  for (auto _ : state) benchmark::DoNotOptimize(agd::drazin_index(a));
}
BENCHMARK(BM_DrazinIndex)->RangeMultiplier(2)->Range(4, 64);

}  // namespace

BENCHMARK_MAIN();
