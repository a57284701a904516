#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "adaptrack/types.hpp"

namespace adaptrack {

enum class Phase { Msac, Mpc };

// Uniform-grid trajectory record. Column layout is fixed per experiment:
// t, x_p, x_m, x_d, u (commanded), B_sat(u) (applied), delta_u, ||theta_err||,
// V, phase. Rows are appended with strictly increasing t.
class SimLog {
 public:
  SimLog(int n_x, int n_u);

  void append(double t, const Vec& x_p, const Vec& x_m, const Vec& x_d, const Vec& u,
              const Vec& u_sat, const Vec& delta_u, double theta_err, double lyapunov,
              Phase phase);

  std::size_t rows() const { return t_.size(); }
  int n_x() const { return n_x_; }
  int n_u() const { return n_u_; }

  double t(std::size_t i) const { return t_[i]; }
  const Vec& x_p(std::size_t i) const { return x_p_[i]; }
  const Vec& x_m(std::size_t i) const { return x_m_[i]; }
  const Vec& x_d(std::size_t i) const { return x_d_[i]; }
  const Vec& u(std::size_t i) const { return u_[i]; }
  const Vec& u_sat(std::size_t i) const { return u_sat_[i]; }
  const Vec& delta_u(std::size_t i) const { return delta_u_[i]; }
  double theta_err(std::size_t i) const { return theta_err_[i]; }
  double lyapunov(std::size_t i) const { return lyapunov_[i]; }
  Phase phase(std::size_t i) const { return phase_[i]; }

  void write_csv(const std::string& path) const;
  static SimLog read_csv(const std::string& path);

 private:
  int n_x_;
  int n_u_;
  std::vector<double> t_;
  std::vector<Vec> x_p_, x_m_, x_d_, u_, u_sat_, delta_u_;
  std::vector<double> theta_err_, lyapunov_;
  std::vector<Phase> phase_;
};

}  // namespace adaptrack
