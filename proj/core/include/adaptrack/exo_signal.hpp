#pragma once

#include <vector>

#include "adaptrack/types.hpp"

namespace adaptrack {

// One sinusoidal term amplitude * sin(omega * t + phase).
struct SinTerm {
  double amplitude = 0.0;
  double omega = 0.0;
  double phase = 0.0;
};

// Exogenous tracked signal: each channel is a sum of sinusoids, so the
// derivative is available in closed form. A channel with no terms is the
// constant zero. The constructor cross-checks the analytic derivative
// against central differences.
class ExoSignal {
 public:
  explicit ExoSignal(std::vector<std::vector<SinTerm>> channels);

  int dim() const { return static_cast<int>(channels_.size()); }
  Vec value(double t) const;
  Vec derivative(double t) const;

  const std::vector<std::vector<SinTerm>>& channels() const { return channels_; }

 private:
  std::vector<std::vector<SinTerm>> channels_;
};

}  // namespace adaptrack
