#include <benchmark/benchmark.h>

#include <random>

#include "hopinf/matkit.hpp"
#include "hopinf/models.hpp"
#include "hopinf/reduce.hpp"

using namespace hopinf;

namespace {

Matrix random_matrix(Index r, Index c, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  Matrix m(r, c);
  for (Index j = 0; j < c; ++j)
    for (Index i = 0; i < r; ++i) m(i, j) = d(rng);
  return m;
}

void BM_ConstrainedLstsq(benchmark::State& state) {
  const Index n = state.range(0), ns = state.range(1);
  const Matrix A = Matrix::Identity(n, n);
  const Matrix B = random_matrix(n, ns, 1);
  const Matrix C = random_matrix(n, ns, 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(constrained_lstsq(A, B, C, SymmetryKind::Skew, 1e-8));
}
BENCHMARK(BM_ConstrainedLstsq)->Args({8, 200})->Args({16, 400})->Args({32, 1000});

void BM_Svd(benchmark::State& state) {
  const Matrix X = random_matrix(state.range(0), state.range(1), 3);
  for (auto _ : state) benchmark::DoNotOptimize(svd(X));
}
BENCHMARK(BM_Svd)->Args({1000, 200})->Args({500, 500});

void BM_KdvStep(benchmark::State& state) {
  KdvParams p;
  p.points = state.range(0);
  const auto inst = build_kdv_v1(p);
  const FomStepper st = fom_stepper(inst.model, 0.01);
  NewtonSettings s;
  for (auto _ : state)
    benchmark::DoNotOptimize(avf_newton(st.residual, st.jacobian, inst.x0, 0.01, 1, s));
}
BENCHMARK(BM_KdvStep)->Arg(256)->Arg(500);

}  // namespace
BENCHMARK_MAIN();
