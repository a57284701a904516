#pragma once

#include <string>
#include <vector>

#include "adaptrack/types.hpp"

namespace adaptrack {

struct PEWindow {
  double t_start = 0.0;
  double min_eig = 0.0;
};

// Persistent-excitation report: per-window smallest eigenvalue of the Gram
// integral of the regressor over sliding windows of length `window`.
struct PEReport {
  double window = 0.0;
  double alpha = 0.0;
  std::vector<PEWindow> windows;

  // Smallest windowed Gram eigenvalue over the whole log.
  double min_eig() const;
  bool verdict() const { return min_eig() >= alpha; }

  void write_csv(const std::string& path) const;
};

// Checks int_t^{t+T} phi phi^T dtau >= alpha I over sliding windows.
// `samples` are uniformly spaced with spacing dt; window starts advance by
// `stride` (pass 0 for the default T/4). Throws InsufficientData when the
// log is shorter than one window or a window spans fewer than 10 samples.
PEReport pe_check(const std::vector<Vec>& samples, double dt, double window, double alpha,
                  double stride = 0.0);

}  // namespace adaptrack
