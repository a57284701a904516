#pragma once

#include <optional>
#include <string>
#include <vector>

#include "adaptrack/config.hpp"
#include "adaptrack/mpc.hpp"
#include "adaptrack/msac_sim.hpp"
#include "adaptrack/pe.hpp"

namespace adaptrack {

struct RunReport {
  double theta_err_initial = 0.0;
  double theta_err_at_switch = 0.0;
  std::optional<bool> pe_verdict;  // empty when the log is too short to judge
  double pe_min_eig = 0.0;
  double v_mpc = 0.0;
  double v_star = 0.0;
  double gap = 0.0;
  double wall_seconds = 0.0;
  std::vector<std::string> artifacts;
};

// Domain objects assembled from a validated config.
struct Experiment {
  PlantSpec plant;
  ReferenceModel reference;
  ExoSignal exo;
  LQTWeights weights;
  IdealGains oracle;
  Mat P;
  double mu;
  Mat theta0;

  static Experiment build(const ExperimentConfig& cfg);
};

// Adaptive phase only (also used by the pe-check command). Requires
// t_adap > 0.
MsacRunResult run_msac_only(const ExperimentConfig& cfg);

// Full two-phase pipeline: adapt over [0, t_adap], extract parameters,
// then receding-horizon control over [t_adap, t_adap + t_mpc] next to the
// true-parameter oracle. Writes CSV artifacts (and plots when enabled).
RunReport run_pipeline(const ExperimentConfig& cfg);

struct SweepRow {
  double delta = 0.0;
  double v_mpc = 0.0;
  double v_star = 0.0;
  double gap = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double slope = 0.0;  // log-log slope of gap vs delta over positive entries
  std::string csv_path;
};

// Injected-error sweep: for each delta the true gains are scaled so that
// ||theta_err|| = delta, the post-switch phase is re-run, and the cost gap
// against the shared oracle run is recorded. Rows are computed on up to
// max_threads workers (0 = hardware concurrency, capped by ADAPTRACK_THREADS).
SweepResult run_delta_sweep(const ExperimentConfig& cfg, const std::vector<double>& deltas,
                            int max_threads = 0);

}  // namespace adaptrack
