#include "adaptrack/exo_signal.hpp"

#include <cmath>

#include "adaptrack/errors.hpp"

namespace adaptrack {

ExoSignal::ExoSignal(std::vector<std::vector<SinTerm>> channels) : channels_(std::move(channels)) {
  if (channels_.empty()) {
    throw Error("ExoSignal: need at least one channel");
  }
  for (const auto& ch : channels_) {
    for (const auto& term : ch) {
      if (!std::isfinite(term.amplitude) || !std::isfinite(term.omega) ||
          !std::isfinite(term.phase)) {
        throw Error("ExoSignal: non-finite sinusoid parameter");
      }
    }
  }
  // Cross-check the analytic derivative against central differences.
  const double fd_step = 1e-5;
  for (double t : {0.13, 0.71, 1.37, 2.93}) {
    const Vec analytic = derivative(t);
    const Vec central = (value(t + fd_step) - value(t - fd_step)) / (2.0 * fd_step);
    if ((analytic - central).cwiseAbs().maxCoeff() > 1e-6) {
      throw Error("ExoSignal: analytic derivative disagrees with central differences");
    }
  }
}

Vec ExoSignal::value(double t) const {
  Vec out = Vec::Zero(dim());
  for (int i = 0; i < dim(); ++i) {
    for (const auto& term : channels_[i]) {
      out(i) += term.amplitude * std::sin(term.omega * t + term.phase);
    }
  }
  return out;
}

Vec ExoSignal::derivative(double t) const {
  Vec out = Vec::Zero(dim());
  for (int i = 0; i < dim(); ++i) {
    for (const auto& term : channels_[i]) {
      out(i) += term.amplitude * term.omega * std::cos(term.omega * t + term.phase);
    }
  }
  return out;
}

}  // namespace adaptrack
