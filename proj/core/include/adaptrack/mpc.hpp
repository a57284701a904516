#pragma once

#include "adaptrack/lqt.hpp"
#include "adaptrack/plant.hpp"
#include "adaptrack/sim_log.hpp"

namespace adaptrack {

// Receding-horizon configuration. The per-window grid uses the simulation
// step; delta_s must sit on that lattice and satisfy 0 < delta_s <= horizon.
struct MpcConfig {
  double horizon;   // per-window length T, seconds
  double delta_s;   // sampling interval, seconds
  LQTWeights weights;
  double u_max;
  double step;      // simulation/integration step

  MpcConfig(double horizon, double delta_s, LQTWeights weights, double u_max, double step);
};

// Plant estimate used by the controller; B_p is public knowledge.
struct ModelEstimate {
  Mat A_p_hat;
  Mat Lambda_hat;  // diagonal, positive
  Mat B_p;

  Mat input_map() const { return B_p * Lambda_hat; }
};

// Diagnostics columns stamped into receding-horizon logs (the tuner is
// inactive after the switch, so both values are constants).
struct RhLogDiagnostics {
  double theta_err = 0.0;
  double lyapunov = 0.0;
};

// One window: solves the unconstrained LQT on [t_i, t_i + T] for the
// estimated model and wraps the resulting law with the ball projection.
FeedbackLaw mpc_step(const ModelEstimate& model, const MpcConfig& cfg, const Vec& x_now,
                     double t_i, const ExoSignal& x_d);

// Receding-horizon closed loop on the true plant over [t_start, t_start +
// span]: re-solves at every sampling instant over the remaining window
// [t_i, t_start + span] and applies each law on its sampling interval only.
// The reference model is integrated alongside to fill the x_m columns.
SimLog run_receding_horizon(const ModelEstimate& model, const MpcConfig& cfg,
                            const PlantSpec& plant, const ReferenceModel& ref, double t_start,
                            double span, const ExoSignal& x_d, const Vec& x_p_start,
                            const Vec& x_m_start, const RhLogDiagnostics& diag);

// quadrature_cost(mpc_log) - quadrature_cost(oracle_log); throws GridMismatch
// when the two logs do not share grid and initial state.
double optimality_gap(const SimLog& mpc_log, const SimLog& oracle_log, const LQTWeights& w,
                      const ExoSignal& x_d);

}  // namespace adaptrack
