#pragma once

#include <Eigen/Dense>
#include <cstddef>

namespace adaptrack {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Uniform time grid over [t_start, t_end]. The node count follows the
// rounding rule N = round((t_end - t_start)/h) + 1, so t_end is snapped onto
// the step lattice and every node is exactly t_start + k*h.
class TimeGrid {
 public:
  TimeGrid(double t_start, double t_end, double step);

  double t_start() const { return t_start_; }
  double t_end() const { return node(count_ - 1); }
  double step() const { return h_; }
  std::size_t count() const { return count_; }

  double node(std::size_t k) const { return t_start_ + static_cast<double>(k) * h_; }

  // Index of the node nearest to t; throws GridMismatch if t is off-lattice.
  std::size_t index_of(double t) const;

  bool same_as(const TimeGrid& other) const;

 private:
  double t_start_;
  double h_;
  std::size_t count_;
};

}  // namespace adaptrack
