#pragma once

#include <optional>
#include <string>
#include <vector>

#include "adaptrack/sim_log.hpp"

namespace adaptrack {

// Static SVG renderings of a logged run: states overlay, commanded vs
// applied inputs, parameter-error norm (log scale). Throws
// EmptyOrDegenerateLog for logs with fewer than two rows.
std::vector<std::string> emit_single_log_plots(const SimLog& log, std::optional<double> u_max,
                                               const std::string& out_dir,
                                               const std::string& prefix);

// Full post-run figure set: the three single-log plots for the adaptive
// phase plus controller-vs-oracle state and input overlays when both
// post-switch logs are present.
std::vector<std::string> emit_plots(const SimLog& msac_log, const SimLog* mpc_log,
                                    const SimLog* oracle_log, double u_max,
                                    const std::string& out_dir, const std::string& prefix);

}  // namespace adaptrack
