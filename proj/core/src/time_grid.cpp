#include "adaptrack/types.hpp"

#include <cmath>
#include <string>

#include "adaptrack/errors.hpp"

namespace adaptrack {

TimeGrid::TimeGrid(double t_start, double t_end, double step) : t_start_(t_start), h_(step) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw Error("TimeGrid: step must be positive and finite");
  }
  if (!std::isfinite(t_start) || !std::isfinite(t_end) || t_end < t_start) {
    throw Error("TimeGrid: need finite t_start <= t_end");
  }
  count_ = static_cast<std::size_t>(std::llround((t_end - t_start) / step)) + 1;
}

std::size_t TimeGrid::index_of(double t) const {
  const long long k = std::llround((t - t_start_) / h_);
  if (k < 0 || static_cast<std::size_t>(k) >= count_) {
    throw GridMismatch("time " + std::to_string(t) + " outside grid");
  }
  const double tk = node(static_cast<std::size_t>(k));
  if (std::abs(tk - t) > 1e-9 * std::max(1.0, std::abs(t))) {
    throw GridMismatch("time " + std::to_string(t) + " is not a grid node");
  }
  return static_cast<std::size_t>(k);
}

bool TimeGrid::same_as(const TimeGrid& other) const {
  return t_start_ == other.t_start_ && h_ == other.h_ && count_ == other.count_;
}

}  // namespace adaptrack
