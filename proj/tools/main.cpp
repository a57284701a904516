#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "adaptrack/csv.hpp"
#include "adaptrack/errors.hpp"
#include "adaptrack/pipeline.hpp"
#include "adaptrack/plots.hpp"

namespace {

using namespace adaptrack;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;

void print_report(const RunReport& report) {
  std::printf("theta_err initial        %.6g\n", report.theta_err_initial);
  std::printf("theta_err at switch      %.6g\n", report.theta_err_at_switch);
  if (report.pe_verdict.has_value()) {
    std::printf("PE verdict               %s (min windowed Gram eig %.6g)\n",
                *report.pe_verdict ? "satisfied" : "NOT satisfied", report.pe_min_eig);
    if (!*report.pe_verdict) {
      std::printf("warning: regressor not persistently exciting; parameter learning is not "
                  "guaranteed\n");
    }
  } else {
    std::printf("PE verdict               n/a (adaptive phase too short)\n");
  }
  std::printf("V_mpc                    %.9g\n", report.v_mpc);
  std::printf("V_star                   %.9g\n", report.v_star);
  std::printf("gap                      %.9g\n", report.gap);
  std::printf("wall seconds             %.3f\n", report.wall_seconds);
  for (const auto& path : report.artifacts) {
    std::printf("artifact                 %s\n", path.c_str());
  }
}

int cmd_run(const std::string& config_path) {
  const ExperimentConfig cfg = parse_config(config_path);
  const RunReport report = run_pipeline(cfg);
  print_report(report);
  return kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::string& deltas_arg, int threads) {
  const ExperimentConfig cfg = parse_config(config_path);
  std::vector<double> deltas;
  std::stringstream ss(deltas_arg);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) {
      continue;
    }
    try {
      deltas.push_back(std::stod(token));
    } catch (const std::exception&) {
      throw ConfigError("sweep-delta: bad delta value '" + token + "'");
    }
  }
  if (deltas.empty()) {
    throw ConfigError("sweep-delta: no delta values given");
  }
  const SweepResult sweep = run_delta_sweep(cfg, deltas, threads);
  std::printf("delta        v_mpc            v_star           gap\n");
  for (const auto& row : sweep.rows) {
    std::printf("%-12.6g %-16.9g %-16.9g %.9g\n", row.delta, row.v_mpc, row.v_star, row.gap);
  }
  std::printf("log-log slope of gap vs delta: %.4f\n", sweep.slope);
  std::printf("artifact %s\n", sweep.csv_path.c_str());
  return kExitOk;
}

int cmd_riccati(const std::string& config_path) {
  const ExperimentConfig cfg = parse_config(config_path);
  const Experiment exp = Experiment::build(cfg);

  // Cost tables for the true plant over the first post-switch window.
  const TimeGrid adapt_grid(0.0, cfg.t_adap, cfg.step_h);
  const double t0 = cfg.t_adap > 0.0 ? adapt_grid.t_end() : 0.0;
  const TimeGrid window(t0, t0 + cfg.horizon, cfg.step_h);
  const LqtSolution sol = solve_unconstrained_lqt(
      exp.plant.A_p, exp.plant.B_p * exp.plant.Lambda(), exp.weights, exp.exo, window);

  std::filesystem::create_directories(cfg.out_dir);
  const std::string path =
      (std::filesystem::path(cfg.out_dir) / (cfg.prefix + "riccati.csv")).string();
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("riccati: cannot open " + path);
  }
  const int n = exp.plant.n_x();
  std::string header = "t";
  for (int r = 0; r < n; ++r) {
    for (int c = r; c < n; ++c) {
      header += ",S2_" + std::to_string(r) + std::to_string(c);
    }
  }
  for (int r = 0; r < n; ++r) {
    header += ",S1_" + std::to_string(r);
  }
  header += ",S0\n";
  out << header;
  for (std::size_t k = 0; k < window.count(); ++k) {
    const std::size_t j = sol.cost.node_index(k);
    std::string line = g17(window.node(k));
    for (int r = 0; r < n; ++r) {
      for (int c = r; c < n; ++c) {
        line += ',' + g17(sol.cost.s2(j)(r, c));
      }
    }
    for (int r = 0; r < n; ++r) {
      line += ',' + g17(sol.cost.s1(j)(r));
    }
    line += ',' + g17(sol.cost.s0(j));
    line += '\n';
    out << line;
  }
  std::printf("artifact %s\n", path.c_str());
  return kExitOk;
}

int cmd_pe_check(const std::string& config_path, double window, double alpha, double stride) {
  const ExperimentConfig cfg = parse_config(config_path);
  const MsacRunResult msac = run_msac_only(cfg);
  const PEReport report = pe_check(msac.regressor, cfg.step_h, window, alpha, stride);

  std::filesystem::create_directories(cfg.out_dir);
  const std::string path =
      (std::filesystem::path(cfg.out_dir) / (cfg.prefix + "pe.csv")).string();
  report.write_csv(path);

  std::printf("windows      %zu (length %.6g s)\n", report.windows.size(), report.window);
  std::printf("min Gram eig %.6g\n", report.min_eig());
  std::printf("PE verdict   %s (alpha = %.6g)\n",
              report.verdict() ? "satisfied" : "NOT satisfied", alpha);
  std::printf("artifact     %s\n", path.c_str());
  return kExitOk;
}

int cmd_plot(const std::string& log_path, const std::string& out_dir,
             std::optional<double> u_max) {
  const SimLog log = SimLog::read_csv(log_path);
  const std::string stem = std::filesystem::path(log_path).stem().string();
  const auto files = emit_single_log_plots(log, u_max, out_dir, stem + "_");
  for (const auto& f : files) {
    std::printf("artifact %s\n", f.c_str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaptrack: saturated adaptive tracking control with a post-learning "
               "receding-horizon optimizer"};
  app.require_subcommand(1);

  std::string config_path;
  std::string deltas = "0.2,0.1,0.05,0.025";
  int threads = 0;
  std::string log_path;
  std::string out_dir;
  double pe_window = 2.0 * std::numbers::pi;
  double pe_alpha = 0.1;
  double pe_stride = 0.0;
  double plot_u_max = 0.0;

  auto* run = app.add_subcommand("run", "Run the full adapt-then-optimize pipeline");
  run->add_option("config", config_path, "experiment config file")->required();

  auto* sweep = app.add_subcommand("sweep-delta", "Optimality-gap sweep over injected "
                                                  "parameter errors");
  sweep->add_option("config", config_path, "experiment config file")->required();
  sweep->add_option("--deltas", deltas, "comma-separated parameter error norms");
  sweep->add_option("--threads", threads, "worker cap (0 = hardware, bounded by "
                                          "ADAPTRACK_THREADS)");

  auto* riccati = app.add_subcommand("riccati", "Dump the backward value tables to CSV");
  riccati->add_option("config", config_path, "experiment config file")->required();

  auto* pe = app.add_subcommand("pe-check", "Run the adaptive phase and test persistent "
                                            "excitation of the regressor");
  pe->add_option("config", config_path, "experiment config file")->required();
  pe->add_option("--window", pe_window, "window length in seconds");
  pe->add_option("--alpha", pe_alpha, "excitation level");
  pe->add_option("--stride", pe_stride, "window stride in seconds (0 = window/4)");

  auto* plot = app.add_subcommand("plot", "Render SVG figures from a log CSV");
  plot->add_option("log", log_path, "SimLog CSV file")->required();
  plot->add_option("out_dir", out_dir, "output directory")->required();
  auto* u_max_opt = plot->add_option("--u-max", plot_u_max, "input ball radius for the "
                                                            "saturation lines");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return cmd_run(config_path);
    }
    if (sweep->parsed()) {
      return cmd_sweep(config_path, deltas, threads);
    }
    if (riccati->parsed()) {
      return cmd_riccati(config_path);
    }
    if (pe->parsed()) {
      return cmd_pe_check(config_path, pe_window, pe_alpha, pe_stride);
    }
    if (plot->parsed()) {
      std::optional<double> radius;
      if (u_max_opt->count() > 0) {
        radius = plot_u_max;
      }
      return cmd_plot(log_path, out_dir, radius);
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  }
  return kExitOk;
}
