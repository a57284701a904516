#include <benchmark/benchmark.h>

#include "adaptrack/linalg.hpp"
#include "adaptrack/ode.hpp"

using namespace adaptrack;

namespace {

Mat reference_matrix() {
  Mat a(2, 2);
  a << -1, 1, 0, -2;
  return a;
}

void BM_Rk4Step(benchmark::State& state) {
  const Mat a = reference_matrix();
  VectorField f = [&](double, const Vec& x) { return Vec(a * x); };
  Vec x(2);
  x << 1.0, 1.0;
  for (auto _ : state) {
    x = rk4_step(f, 0.0, x, 1e-3);
    benchmark::DoNotOptimize(x);
    x(0) = 1.0;  // keep the state from decaying to denormals
  }
}
BENCHMARK(BM_Rk4Step);

void BM_IntegrateBackward(benchmark::State& state) {
  const Mat a = reference_matrix();
  VectorField f = [&](double, const Vec& x) { return Vec(a * x); };
  const TimeGrid grid(0.0, 1.0, 1e-3);
  Vec terminal(2);
  terminal << 1.0, -1.0;
  for (auto _ : state) {
    auto table = integrate_backward(f, grid, terminal);
    benchmark::DoNotOptimize(table);
  }
}
BENCHMARK(BM_IntegrateBackward);

void BM_SolveLyapunov(benchmark::State& state) {
  const auto n = state.range(0);
  Mat a = -Mat::Identity(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    a(i, i + 1) = 0.5;
  }
  const Mat q = 2.0 * Mat::Identity(n, n);
  for (auto _ : state) {
    Mat p = solve_lyapunov(a, q);
    benchmark::DoNotOptimize(p);
  }
}
BENCHMARK(BM_SolveLyapunov)->Arg(2)->Arg(4)->Arg(8);

void BM_MinEigSym(benchmark::State& state) {
  const auto n = state.range(0);
  Mat m = Mat::Identity(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    m(i, i + 1) = m(i + 1, i) = 0.25;
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(min_eig_sym(m));
  }
}
BENCHMARK(BM_MinEigSym)->Arg(2)->Arg(6);

}  // namespace

BENCHMARK_MAIN();
