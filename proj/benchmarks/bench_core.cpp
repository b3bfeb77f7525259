#include <benchmark/benchmark.h>

#include "qdslab/qdslab.hpp"

using namespace qdslab;

static void BM_LyapunovSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ModelSpec s = build_bounded_lindblad(n, 3);
  const ShiftedLyapunovSolver solver(s.G(), 1.0);
  const Matrix c = Matrix::Identity(n, n);
  for (auto _ : state) benchmark::DoNotOptimize(solver.solve(c));
  state.SetComplexityN(n);
}
BENCHMARK(BM_LyapunovSolve)->RangeMultiplier(2)->Range(8, 128)->Complexity();

static void BM_LyapunovSolveDiagonal(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ModelSpec s = build_pure_birth(RateSequence::quadratic(), n - 1);
  const ShiftedLyapunovSolver solver(s.G(), 1.0);
  const Matrix c = Matrix::Identity(n, n);
  for (auto _ : state) benchmark::DoNotOptimize(solver.solve(c));
}
BENCHMARK(BM_LyapunovSolveDiagonal)->RangeMultiplier(2)->Range(8, 128);

static void BM_Expm(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ModelSpec s = build_bounded_lindblad(n, 3);
  const Matrix a = -s.G();
  for (auto _ : state) benchmark::DoNotOptimize(linalg::expm(a));
}
BENCHMARK(BM_Expm)->RangeMultiplier(2)->Range(8, 64);

static void BM_ExplosionTransformBirth(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const LaplaceContext ctx(build_pure_birth(RateSequence::quadratic(), n), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(conservativity_verdict(ctx));
}
BENCHMARK(BM_ExplosionTransformBirth)->Arg(16)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_ExplosionTransformLindblad(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const LaplaceContext ctx(build_bounded_lindblad(n, 7), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(conservativity_verdict(ctx));
}
BENCHMARK(BM_ExplosionTransformLindblad)->Arg(4)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_EvolveObservable(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ModelSpec s = build_bounded_lindblad(n, 7);
  const HermitianForm id = HermitianForm::identity(n);
  for (auto _ : state) benchmark::DoNotOptimize(evolve_observable(s, id, 2.0, 4));
}
BENCHMARK(BM_EvolveObservable)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_Annihilator(benchmark::State& state) {
  const LaplaceContext ctx(CatalogEntry::parse("tau-f:alpha=0.5").build(), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(predual_annihilator_check(ctx));
}
BENCHMARK(BM_Annihilator)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
