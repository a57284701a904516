#include "adaptrack/mpc.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "adaptrack/errors.hpp"
#include "adaptrack/ode.hpp"

namespace adaptrack {

namespace {

bool on_lattice(double value, double step) {
  const double ratio = value / step;
  return std::abs(ratio - std::llround(ratio)) < 1e-9 * std::max(1.0, std::abs(ratio));
}

}  // namespace

MpcConfig::MpcConfig(double horizon_in, double delta_s_in, LQTWeights weights_in, double u_max_in,
                     double step_in)
    : horizon(horizon_in),
      delta_s(delta_s_in),
      weights(std::move(weights_in)),
      u_max(u_max_in),
      step(step_in) {
  if (!(step > 0.0)) {
    throw Error("MpcConfig: step must be positive");
  }
  if (!(delta_s > 0.0) || delta_s > horizon) {
    throw Error("MpcConfig: need 0 < delta_s <= horizon");
  }
  if (!(u_max > 0.0)) {
    throw Error("MpcConfig: u_max must be positive");
  }
  if (!on_lattice(delta_s, step) || !on_lattice(horizon, step)) {
    throw Error("MpcConfig: delta_s and horizon must be multiples of the step");
  }
}

FeedbackLaw mpc_step(const ModelEstimate& model, const MpcConfig& cfg, const Vec& x_now,
                     double t_i, const ExoSignal& x_d) {
  if (!x_now.allFinite()) {
    throw NumericalBlowup("mpc_step: non-finite state", t_i);
  }
  if (!cfg.weights.identity_weighted()) {
    throw UnsupportedWeight("mpc_step: ball-constrained MPC requires R = R_u I");
  }
  const TimeGrid window(t_i, t_i + cfg.horizon, cfg.step);
  LqtSolution sol = solve_unconstrained_lqt(model.A_p_hat, model.input_map(), cfg.weights, x_d,
                                            window);
  sol.law.set_projection(cfg.u_max);
  return std::move(sol.law);
}

SimLog run_receding_horizon(const ModelEstimate& model, const MpcConfig& cfg,
                            const PlantSpec& plant, const ReferenceModel& ref, double t_start,
                            double span, const ExoSignal& x_d, const Vec& x_p_start,
                            const Vec& x_m_start, const RhLogDiagnostics& diag) {
  if (span < 0.0) {
    throw Error("run_receding_horizon: span must be non-negative");
  }
  const int n_x = plant.n_x();
  const int n_u = plant.n_u();
  SimLog log(n_x, n_u);

  const TimeGrid grid(t_start, t_start + span, cfg.step);
  const std::size_t steps_per_sample =
      static_cast<std::size_t>(std::llround(cfg.delta_s / cfg.step));

  Vec x_p = x_p_start;
  Vec x_m = x_m_start;

  auto log_node = [&](double t, const FeedbackLaw& law) {
    const Vec u = law.unconstrained(x_p, t);
    const Vec u_sat = saturate(u, cfg.u_max);
    log.append(t, x_p, x_m, x_d.value(t), u, u_sat, u_sat - u, diag.theta_err, diag.lyapunov,
               Phase::Mpc);
  };

  std::optional<FeedbackLaw> law;
  // Coupled integration state [x_p; x_m]; the law of the current sampling
  // interval closes the loop.
  VectorField field = [&](double t, const Vec& y) {
    const Vec xp = y.head(n_x);
    const Vec xm = y.tail(n_x);
    const Vec r = reference_input(ref, x_d.value(t), x_d.derivative(t));
    Vec dy(2 * n_x);
    dy.head(n_x) = plant_deriv(plant, xp, (*law)(xp, t));
    dy.tail(n_x) = reference_deriv(ref, xm, r);
    return dy;
  };

  for (std::size_t k = 0;; ++k) {
    if (!law || (k % steps_per_sample == 0 && k + 1 < grid.count())) {
      // Every window ends at the phase end: the re-solve at t_i covers the
      // remaining cost, so the true-parameter controller is the dynamic-
      // programming optimum of the measured objective.
      const double remaining = grid.t_end() - grid.node(k);
      const double window = remaining > 0.0 ? remaining : cfg.delta_s;
      const MpcConfig window_cfg(window, std::min(cfg.delta_s, window), cfg.weights, cfg.u_max,
                                 cfg.step);
      law = mpc_step(model, window_cfg, x_p, grid.node(k), x_d);
    }
    log_node(grid.node(k), *law);
    if (k + 1 == grid.count()) {
      break;
    }
    Vec y(2 * n_x);
    y << x_p, x_m;
    y = rk4_step(field, grid.node(k), y, grid.step());
    x_p = y.head(n_x);
    x_m = y.tail(n_x);
  }
  return log;
}

double optimality_gap(const SimLog& mpc_log, const SimLog& oracle_log, const LQTWeights& w,
                      const ExoSignal& x_d) {
  if (mpc_log.rows() != oracle_log.rows() || mpc_log.rows() == 0) {
    throw GridMismatch("optimality_gap: logs have different lengths");
  }
  for (std::size_t i = 0; i < mpc_log.rows(); ++i) {
    if (mpc_log.t(i) != oracle_log.t(i)) {
      throw GridMismatch("optimality_gap: logs disagree on the time grid");
    }
  }
  if ((mpc_log.x_p(0) - oracle_log.x_p(0)).norm() > 1e-12) {
    throw GridMismatch("optimality_gap: logs start from different states");
  }
  return quadrature_cost(mpc_log, w, x_d) - quadrature_cost(oracle_log, w, x_d);
}

}  // namespace adaptrack
