#pragma once

#include <vector>

#include "adaptrack/msac.hpp"
#include "adaptrack/sim_log.hpp"

namespace adaptrack {

struct MsacRunResult {
  SimLog log;
  TunerState tuner;            // adaptive state at the end of the phase
  std::vector<Vec> regressor;  // phi_a at every grid node, for PE analysis
  double theta_err_at_switch = 0.0;
  double lyapunov_at_switch = 0.0;
};

// Closed-loop adaptive phase: plant, reference model, auxiliary error and
// both tuner matrices are integrated as one coupled state vector with the
// shared RK4 step. The oracle gains feed the diagnostic columns only.
MsacRunResult run_msac_phase(const PlantSpec& plant, const ReferenceModel& model,
                             const ExoSignal& exo, TunerState tuner, const IdealGains& oracle,
                             const TimeGrid& grid);

}  // namespace adaptrack
