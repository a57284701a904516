#include <benchmark/benchmark.h>

#include <numbers>

#include "adaptrack/linalg.hpp"
#include "adaptrack/lqt.hpp"
#include "adaptrack/mpc.hpp"
#include "adaptrack/msac_sim.hpp"
#include "adaptrack/pe.hpp"

using namespace adaptrack;

namespace {

struct Fixture {
  PlantSpec plant;
  ReferenceModel reference;
  ExoSignal exo;
  LQTWeights weights;
  IdealGains oracle;
  Mat p;

  Fixture()
      : plant((Mat(2, 2) << 1, 1, 0, 1).finished(), Mat::Identity(2, 2), Vec::Ones(2), 8.0,
              Vec::Zero(2)),
        reference((Mat(2, 2) << -1, 1, 0, -2).finished(), Mat::Identity(2, 2), Vec::Zero(2)),
        exo({{{1, 1, 0}, {1, 3, 0}, {1, 5, 0}, {1, 7, 0}}, {{1, 2, 0}, {1, 4, 0}, {1, 6, 0}}}),
        weights(20.0 * Mat::Identity(2, 2), Mat::Identity(2, 2), 20.0 * Mat::Identity(2, 2)),
        oracle(ideal_gains(plant, reference)),
        p(solve_lyapunov(reference.A_m, Mat::Identity(2, 2))) {}

  TunerState tuner(double gamma = 2.0, double beta = 1.0) const {
    const Mat theta0 = 0.8 * oracle.theta_a();
    return TunerState(theta0, theta0, Vec::Zero(2), gamma, beta,
                      TunerState::mu_lower_bound(gamma, beta, p, plant.B_p), p, plant.B_p);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_AdaptivePhaseSecond(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) {
    auto run = run_msac_phase(f.plant, f.reference, f.exo, f.tuner(), f.oracle,
                              TimeGrid(0.0, 1.0, 1e-3));
    benchmark::DoNotOptimize(run.log.rows());
  }
}
BENCHMARK(BM_AdaptivePhaseSecond)->Unit(benchmark::kMillisecond);

void BM_WindowSolve(benchmark::State& state) {
  const Fixture& f = fixture();
  const double horizon = static_cast<double>(state.range(0));
  const TimeGrid window(0.0, horizon, 1e-3);
  for (auto _ : state) {
    auto sol = solve_unconstrained_lqt(f.plant.A_p, f.plant.B_p, f.weights, f.exo, window);
    benchmark::DoNotOptimize(sol.cost.s0(0));
  }
}
BENCHMARK(BM_WindowSolve)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_RecedingHorizonSecond(benchmark::State& state) {
  const Fixture& f = fixture();
  const MpcConfig cfg(1.0, 0.1, f.weights, 8.0, 1e-3);
  const ModelEstimate truth{f.plant.A_p, f.plant.Lambda(), f.plant.B_p};
  for (auto _ : state) {
    auto log = run_receding_horizon(truth, cfg, f.plant, f.reference, 0.0, 1.0, f.exo,
                                    Vec::Zero(2), Vec::Zero(2), RhLogDiagnostics{});
    benchmark::DoNotOptimize(log.rows());
  }
}
BENCHMARK(BM_RecedingHorizonSecond)->Unit(benchmark::kMillisecond);

void BM_PeCheck(benchmark::State& state) {
  const Fixture& f = fixture();
  auto run = run_msac_phase(f.plant, f.reference, f.exo, f.tuner(), f.oracle,
                            TimeGrid(0.0, 8.0 * std::numbers::pi, 1e-3));
  for (auto _ : state) {
    auto report = pe_check(run.regressor, 1e-3, 2.0 * std::numbers::pi, 0.1);
    benchmark::DoNotOptimize(report.min_eig());
  }
}
BENCHMARK(BM_PeCheck)->Unit(benchmark::kMillisecond);

}  // namespace
