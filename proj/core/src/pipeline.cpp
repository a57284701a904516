#include "adaptrack/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>

#include "adaptrack/csv.hpp"
#include "adaptrack/errors.hpp"
#include "adaptrack/linalg.hpp"
#include "adaptrack/plots.hpp"

namespace adaptrack {

namespace {

std::string artifact_path(const ExperimentConfig& cfg, const std::string& name) {
  return (std::filesystem::path(cfg.out_dir) / (cfg.prefix + name)).string();
}

MpcConfig make_mpc_config(const ExperimentConfig& cfg) {
  return MpcConfig(cfg.horizon, cfg.delta_s, LQTWeights(cfg.Q, cfg.R, cfg.Q_f), cfg.u_max,
                   cfg.step_h);
}

int sweep_thread_cap(int requested) {
  int cap = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  if (cap <= 0) {
    cap = 1;
  }
  if (const char* env = std::getenv("ADAPTRACK_THREADS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) {
      cap = std::min(cap, parsed);
    }
  }
  return cap;
}

void write_gap_csv(const std::string& path, double v_mpc, double v_star, double gap) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("run_pipeline: cannot open " + path);
  }
  out << "v_mpc,v_star,gap\n";
  out << g17(v_mpc) << ',' << g17(v_star) << ',' << g17(gap) << '\n';
}

}  // namespace

Experiment Experiment::build(const ExperimentConfig& cfg) {
  PlantSpec plant(cfg.A_p, cfg.B_p, cfg.lambda, cfg.u_max, cfg.x0);
  // x_m(0) = x_p(0): starting the reference at the plant state zeroes the
  // initial tracking error.
  ReferenceModel reference(cfg.A_m, cfg.B_m, cfg.x0);
  ExoSignal exo(cfg.exo_channels);
  if (exo.dim() != cfg.n_x) {
    throw ConfigError("exo channels must match plant.nx");
  }
  LQTWeights weights(cfg.Q, cfg.R, cfg.Q_f);
  IdealGains oracle = ideal_gains(plant, reference);
  const Mat P = solve_lyapunov(cfg.A_m, cfg.Q_lyap);
  const double mu = TunerState::mu_lower_bound(cfg.gamma, cfg.beta, P, cfg.B_p);
  const double span = std::max(cfg.t_adap + cfg.t_mpc, 2.0 * std::numbers::pi);
  reference.r_max = estimate_r_max(reference, exo, span);

  Mat theta0 = cfg.theta0 ? *cfg.theta0 : Mat(cfg.init_scale * oracle.theta_a());
  return Experiment{std::move(plant), std::move(reference), std::move(exo), std::move(weights),
                    std::move(oracle), P, mu, std::move(theta0)};
}

MsacRunResult run_msac_only(const ExperimentConfig& cfg) {
  if (!(cfg.t_adap > 0.0)) {
    throw ConfigError("schedule.t_adap must be positive for an adaptive phase");
  }
  const Experiment exp = Experiment::build(cfg);
  TunerState tuner(exp.theta0, exp.theta0, Vec::Zero(exp.plant.n_x()), cfg.gamma, cfg.beta,
                   exp.mu, exp.P, exp.plant.B_p);
  const TimeGrid grid(0.0, cfg.t_adap, cfg.step_h);
  return run_msac_phase(exp.plant, exp.reference, exp.exo, std::move(tuner), exp.oracle, grid);
}

RunReport run_pipeline(const ExperimentConfig& cfg) {
  const auto wall_start = std::chrono::steady_clock::now();
  const Experiment exp = Experiment::build(cfg);
  std::filesystem::create_directories(cfg.out_dir);

  RunReport report;
  report.theta_err_initial = (exp.theta0 - exp.oracle.theta_a()).norm();

  TunerState tuner(exp.theta0, exp.theta0, Vec::Zero(exp.plant.n_x()), cfg.gamma, cfg.beta,
                   exp.mu, exp.P, exp.plant.B_p);

  double t_switch = 0.0;
  Vec x_p_switch = exp.plant.x0;
  Vec x_m_switch = exp.reference.x_m0;
  RhLogDiagnostics mpc_diag{report.theta_err_initial, 0.0};
  std::optional<SimLog> msac_log;

  // Phase 1: adapt.
  if (cfg.t_adap > 0.0) {
    const TimeGrid grid(0.0, cfg.t_adap, cfg.step_h);
    MsacRunResult msac = run_msac_phase(exp.plant, exp.reference, exp.exo, std::move(tuner),
                                        exp.oracle, grid);
    t_switch = grid.t_end();
    const std::size_t last = msac.log.rows() - 1;
    x_p_switch = msac.log.x_p(last);
    x_m_switch = msac.log.x_m(last);
    report.theta_err_at_switch = msac.theta_err_at_switch;
    mpc_diag = RhLogDiagnostics{msac.theta_err_at_switch, msac.lyapunov_at_switch};

    const std::string msac_csv = artifact_path(cfg, "msac.csv");
    msac.log.write_csv(msac_csv);
    report.artifacts.push_back(msac_csv);

    try {
      const PEReport pe = pe_check(msac.regressor, cfg.step_h, 2.0 * std::numbers::pi, 0.1);
      report.pe_verdict = pe.verdict();
      report.pe_min_eig = pe.min_eig();
      const std::string pe_csv = artifact_path(cfg, "pe.csv");
      pe.write_csv(pe_csv);
      report.artifacts.push_back(pe_csv);
    } catch (const InsufficientData&) {
      report.pe_verdict.reset();  // too short to judge; the run still completes
    }

    tuner = std::move(msac.tuner);
    msac_log = std::move(msac.log);
  } else {
    report.theta_err_at_switch = report.theta_err_initial;
  }

  // Switch: extract the learned plant. A non-positive lambda estimate aborts
  // here, after the phase-1 artifacts are on disk.
  auto [A_p_hat, Lambda_hat] = extract_parameters(tuner, exp.reference, exp.plant.B_p);

  // Phase 2: receding-horizon control next to the true-parameter oracle.
  std::optional<SimLog> mpc_log;
  std::optional<SimLog> oracle_log;
  if (cfg.t_mpc > 0.0) {
    const MpcConfig mpc_cfg = make_mpc_config(cfg);
    const ModelEstimate learned{A_p_hat, Lambda_hat, exp.plant.B_p};
    const ModelEstimate truth{exp.plant.A_p, exp.plant.Lambda(), exp.plant.B_p};

    mpc_log = run_receding_horizon(learned, mpc_cfg, exp.plant, exp.reference, t_switch,
                                   cfg.t_mpc, exp.exo, x_p_switch, x_m_switch, mpc_diag);
    oracle_log = run_receding_horizon(truth, mpc_cfg, exp.plant, exp.reference, t_switch,
                                      cfg.t_mpc, exp.exo, x_p_switch, x_m_switch,
                                      RhLogDiagnostics{0.0, 0.0});

    report.v_mpc = quadrature_cost(*mpc_log, exp.weights, exp.exo);
    report.v_star = quadrature_cost(*oracle_log, exp.weights, exp.exo);
    report.gap = optimality_gap(*mpc_log, *oracle_log, exp.weights, exp.exo);

    const std::string mpc_csv = artifact_path(cfg, "mpc.csv");
    mpc_log->write_csv(mpc_csv);
    report.artifacts.push_back(mpc_csv);
    const std::string oracle_csv = artifact_path(cfg, "oracle.csv");
    oracle_log->write_csv(oracle_csv);
    report.artifacts.push_back(oracle_csv);
    const std::string gap_csv = artifact_path(cfg, "gap.csv");
    write_gap_csv(gap_csv, report.v_mpc, report.v_star, report.gap);
    report.artifacts.push_back(gap_csv);
  }

  if (cfg.plots && msac_log) {
    const auto files = emit_plots(*msac_log, mpc_log ? &*mpc_log : nullptr,
                                  oracle_log ? &*oracle_log : nullptr, cfg.u_max, cfg.out_dir,
                                  cfg.prefix);
    report.artifacts.insert(report.artifacts.end(), files.begin(), files.end());
  }

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  return report;
}

SweepResult run_delta_sweep(const ExperimentConfig& cfg, const std::vector<double>& deltas,
                            int max_threads) {
  const Experiment exp = Experiment::build(cfg);
  std::filesystem::create_directories(cfg.out_dir);
  const MpcConfig mpc_cfg = make_mpc_config(cfg);

  // The sweep isolates the post-switch phase: it starts on the tracked
  // signal at the nominal switch time, independent of any adaptation run.
  const TimeGrid adapt_grid(0.0, cfg.t_adap, cfg.step_h);
  const double t_switch = cfg.t_adap > 0.0 ? adapt_grid.t_end() : 0.0;
  const Vec x_start = exp.exo.value(t_switch);

  const ModelEstimate truth{exp.plant.A_p, exp.plant.Lambda(), exp.plant.B_p};
  const SimLog oracle_log =
      run_receding_horizon(truth, mpc_cfg, exp.plant, exp.reference, t_switch, cfg.t_mpc,
                           exp.exo, x_start, x_start, RhLogDiagnostics{0.0, 0.0});
  const double v_star = quadrature_cost(oracle_log, exp.weights, exp.exo);

  const Mat theta_a = exp.oracle.theta_a();
  const double theta_norm = theta_a.norm();

  SweepResult result;
  result.rows.resize(deltas.size());

  auto run_one = [&](std::size_t i) {
    const double delta = deltas[i];
    // theta_hat = (1 - delta') theta_a calibrated so ||theta_err|| = delta.
    const double scale = 1.0 - delta / theta_norm;
    TunerState probe(scale * theta_a, scale * theta_a, Vec::Zero(exp.plant.n_x()), cfg.gamma,
                     cfg.beta, exp.mu, exp.P, exp.plant.B_p);
    auto [A_p_hat, Lambda_hat] = extract_parameters(probe, exp.reference, exp.plant.B_p);
    const ModelEstimate learned{A_p_hat, Lambda_hat, exp.plant.B_p};
    const SimLog mpc_log = run_receding_horizon(
        learned, mpc_cfg, exp.plant, exp.reference, t_switch, cfg.t_mpc, exp.exo, x_start,
        x_start, RhLogDiagnostics{delta, 0.0});
    const double v_mpc = quadrature_cost(mpc_log, exp.weights, exp.exo);
    result.rows[i] = SweepRow{delta, v_mpc, v_star,
                              optimality_gap(mpc_log, oracle_log, exp.weights, exp.exo)};
  };

  const int workers = std::min<int>(sweep_thread_cap(max_threads),
                                    static_cast<int>(deltas.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < deltas.size(); ++i) {
      run_one(i);
    }
  } else {
    std::vector<std::thread> pool;
    std::mutex next_mutex;
    std::size_t next = 0;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        while (true) {
          std::size_t i;
          {
            std::lock_guard<std::mutex> lock(next_mutex);
            if (next >= deltas.size()) {
              return;
            }
            i = next++;
          }
          run_one(i);
        }
      });
    }
    for (auto& t : pool) {
      t.join();
    }
  }

  // Log-log slope over positive-gap rows.
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int count = 0;
  for (const auto& row : result.rows) {
    if (row.delta > 0.0 && row.gap > 0.0) {
      const double lx = std::log(row.delta);
      const double ly = std::log(row.gap);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      ++count;
    }
  }
  result.slope = count >= 2 ? (count * sxy - sx * sy) / (count * sxx - sx * sx)
                            : std::numeric_limits<double>::quiet_NaN();

  result.csv_path = artifact_path(cfg, "sweep.csv");
  std::ofstream out(result.csv_path, std::ios::binary);
  if (!out) {
    throw Error("run_delta_sweep: cannot open " + result.csv_path);
  }
  out << "delta,v_mpc,v_star,gap\n";
  for (const auto& row : result.rows) {
    out << g17(row.delta) << ',' << g17(row.v_mpc) << ',' << g17(row.v_star) << ','
        << g17(row.gap) << '\n';
  }
  return result;
}

}  // namespace adaptrack
