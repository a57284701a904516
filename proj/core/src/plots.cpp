#include "adaptrack/plots.hpp"

#include <algorithm>
#include <filesystem>

#include "adaptrack/errors.hpp"
#include "adaptrack/svg.hpp"

namespace adaptrack {

namespace {

std::vector<double> times(const SimLog& log) {
  std::vector<double> t(log.rows());
  for (std::size_t i = 0; i < log.rows(); ++i) {
    t[i] = log.t(i);
  }
  return t;
}

std::vector<double> component(const SimLog& log, const Vec& (SimLog::*column)(std::size_t) const,
                              int index) {
  std::vector<double> out(log.rows());
  for (std::size_t i = 0; i < log.rows(); ++i) {
    out[i] = (log.*column)(i)(index);
  }
  return out;
}

std::vector<double> norms(const SimLog& log, const Vec& (SimLog::*column)(std::size_t) const) {
  std::vector<double> out(log.rows());
  for (std::size_t i = 0; i < log.rows(); ++i) {
    out[i] = (log.*column)(i).norm();
  }
  return out;
}

void require_plottable(const SimLog& log) {
  if (log.rows() < 2) {
    throw EmptyOrDegenerateLog("emit_plots: log needs at least two rows");
  }
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

}  // namespace

std::vector<std::string> emit_single_log_plots(const SimLog& log, std::optional<double> u_max,
                                               const std::string& out_dir,
                                               const std::string& prefix) {
  require_plottable(log);
  std::filesystem::create_directories(out_dir);
  std::vector<std::string> files;
  const auto t = times(log);

  {
    LineChart chart("State trajectories", "t [s]", "state");
    for (int i = 0; i < log.n_x(); ++i) {
      chart.add_series("xp" + std::to_string(i), t, component(log, &SimLog::x_p, i));
      chart.add_series("xm" + std::to_string(i), t, component(log, &SimLog::x_m, i));
      chart.add_series("xd" + std::to_string(i), t, component(log, &SimLog::x_d, i));
    }
    const std::string path = join(out_dir, prefix + "states.svg");
    chart.write(path);
    files.push_back(path);
  }
  {
    LineChart chart("Commanded vs applied input", "t [s]", "input");
    for (int i = 0; i < log.n_u(); ++i) {
      chart.add_series("u" + std::to_string(i), t, component(log, &SimLog::u, i));
      chart.add_series("sat(u)" + std::to_string(i), t, component(log, &SimLog::u_sat, i));
    }
    double radius;
    if (u_max) {
      radius = *u_max;
    } else {
      radius = 0.0;
      for (std::size_t i = 0; i < log.rows(); ++i) {
        radius = std::max(radius, log.u_sat(i).norm());
      }
    }
    chart.add_hline(radius);
    chart.add_hline(-radius);
    const std::string path = join(out_dir, prefix + "inputs.svg");
    chart.write(path);
    files.push_back(path);
  }
  {
    LineChart chart("Parameter estimation error", "t [s]", "||theta_err||");
    std::vector<double> err(log.rows());
    for (std::size_t i = 0; i < log.rows(); ++i) {
      err[i] = log.theta_err(i);
    }
    chart.add_series("||theta_err||", t, err);
    chart.set_log_y(true);
    const std::string path = join(out_dir, prefix + "theta_error.svg");
    chart.write(path);
    files.push_back(path);
  }
  return files;
}

std::vector<std::string> emit_plots(const SimLog& msac_log, const SimLog* mpc_log,
                                    const SimLog* oracle_log, double u_max,
                                    const std::string& out_dir, const std::string& prefix) {
  std::vector<std::string> files = emit_single_log_plots(msac_log, u_max, out_dir, prefix);
  if (mpc_log == nullptr || oracle_log == nullptr || mpc_log->rows() < 2 ||
      oracle_log->rows() < 2) {
    return files;  // adaptive-phase plots only
  }
  const auto t = times(*mpc_log);
  {
    LineChart chart("Controller vs oracle states", "t [s]", "state");
    for (int i = 0; i < mpc_log->n_x(); ++i) {
      chart.add_series("xp" + std::to_string(i), t, component(*mpc_log, &SimLog::x_p, i));
      chart.add_series("xp*" + std::to_string(i), times(*oracle_log),
                       component(*oracle_log, &SimLog::x_p, i));
    }
    const std::string path = join(out_dir, prefix + "mpc_states.svg");
    chart.write(path);
    files.push_back(path);
  }
  {
    LineChart chart("Controller vs oracle inputs", "t [s]", "||applied input||");
    chart.add_series("||u_mpc||", t, norms(*mpc_log, &SimLog::u_sat));
    chart.add_series("||u*||", times(*oracle_log), norms(*oracle_log, &SimLog::u_sat));
    chart.add_hline(u_max);
    const std::string path = join(out_dir, prefix + "mpc_inputs.svg");
    chart.write(path);
    files.push_back(path);
  }
  return files;
}

}  // namespace adaptrack
