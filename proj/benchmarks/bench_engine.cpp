#include <benchmark/benchmark.h>

#include "agd/engine.hpp"

namespace {

using agd::ComplexScalar;
using agd::PointFamily;
using agd::Rational;

ComplexScalar q(long num, long den = 1) { return ComplexScalar(Rational(num, den)); }

agd::StructuredOperator harmonic() {
  return agd::build_operator(std::nullopt, agd::DiagonalBlock(PointFamily::power(q(1), Rational(1))));
}

PointFamily relative_cluster() {
  return PointFamily::cluster(PointFamily::power(q(1), Rational(1)), PointFamily::geometric(q(1, 4), q(1, 2)),
                              agd::SpreadMode::Relative);
}

void BM_ClassifyHarmonic(benchmark::State& state) {
  auto t = harmonic();
  for (auto _ : state) benchmark::DoNotOptimize(agd::classify_element(t));
}
BENCHMARK(BM_ClassifyHarmonic);

void BM_ValidateCutHarmonic(benchmark::State& state) {
  auto t = harmonic();
  // Cut between 1/(k+1) and 1/k.
  Rational cut(2, 2 * state.range(0) + 1);
  for (auto _ : state) agd::validate_cut(t, cut);
}
BENCHMARK(BM_ValidateCutHarmonic)->RangeMultiplier(4)->Range(2, 512);

void BM_AgDrazinHarmonic(benchmark::State& state) {
  auto t = harmonic();
  Rational cut(2, 2 * state.range(0) + 1);
  for (auto _ : state) {
    auto cert = agd::agdrazin_inverse(t, cut);
    benchmark::DoNotOptimize(cert);
  }
}
BENCHMARK(BM_AgDrazinHarmonic)->RangeMultiplier(4)->Range(2, 512);

void BM_CandidateCutsHarmonic(benchmark::State& state) {
  auto t = harmonic();
  for (auto _ : state) {
    auto cuts = agd::candidate_cuts(t);
    benchmark::DoNotOptimize(cuts);
  }
}
BENCHMARK(BM_CandidateCutsHarmonic)->Unit(benchmark::kMillisecond);

void BM_ClusterDistanceToCircle(benchmark::State& state) {
  PointFamily c = relative_cluster();
  // Radius just off the center 1/m, where the nearest terms sit deep in the m-th sub-cluster.
  Rational r = Rational(1, state.range(0)) + Rational(1, 1000 * state.range(0) * state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(c.distance_to_circle(r));
}
BENCHMARK(BM_ClusterDistanceToCircle)->RangeMultiplier(4)->Range(2, 128);

void BM_ClusterMembership(benchmark::State& state) {
  PointFamily c = relative_cluster();
  auto s = agd::SpectralSet::of(c);
  ComplexScalar z = c.term(static_cast<agd::TermIndex>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(agd::contains(s, z));
}
BENCHMARK(BM_ClusterMembership)->RangeMultiplier(8)->Range(8, 4096);

}  // namespace

BENCHMARK_MAIN();
