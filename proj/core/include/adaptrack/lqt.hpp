#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "adaptrack/exo_signal.hpp"
#include "adaptrack/sim_log.hpp"
#include "adaptrack/types.hpp"

namespace adaptrack {

// Tracking-cost weights. Q and Q_f must be symmetric PSD, R symmetric PD.
// The identity_weighted flag records whether R = R_u * I, which is what the
// closed-form ball projection requires.
class LQTWeights {
 public:
  LQTWeights(Mat Q, Mat R, Mat Q_f);

  const Mat& Q() const { return q_; }
  const Mat& R() const { return r_; }
  const Mat& Q_f() const { return q_f_; }
  bool identity_weighted() const { return identity_weighted_; }
  double r_u() const { return r_u_; }

 private:
  Mat q_, r_, q_f_;
  bool identity_weighted_;
  double r_u_;
};

// Time-indexed quadratic value V(x, t) = x^T S2(t) x + 2 x^T S1(t) + S0(t).
// Tables are stored at grid.step()/substeps spacing so integrator stages can
// read exact entries; queries between entries interpolate linearly.
class CostToGo {
 public:
  CostToGo(const TimeGrid& grid, int substeps);

  const TimeGrid& grid() const { return grid_; }
  int substeps() const { return substeps_; }
  std::size_t table_size() const { return table_count_; }
  double table_dt() const { return grid_.step() / substeps_; }
  double table_time(std::size_t j) const { return grid_.t_start() + j * table_dt(); }

  Mat& s2(std::size_t j) { return s2_[j]; }
  Vec& s1(std::size_t j) { return s1_[j]; }
  double& s0(std::size_t j) { return s0_[j]; }
  const Mat& s2(std::size_t j) const { return s2_[j]; }
  const Vec& s1(std::size_t j) const { return s1_[j]; }
  double s0(std::size_t j) const { return s0_[j]; }

  // Table index of grid node k.
  std::size_t node_index(std::size_t k) const { return k * substeps_; }

  double value(const Vec& x, double t) const;

 private:
  TimeGrid grid_;
  int substeps_;
  std::size_t table_count_;
  std::vector<Mat> s2_;
  std::vector<Vec> s1_;
  std::vector<double> s0_;
};

// Time-varying affine law u(x, t) = K1(t) x + K0(t), optionally wrapped with
// the radial ball projection. Same table layout as CostToGo.
class FeedbackLaw {
 public:
  FeedbackLaw(const TimeGrid& grid, int substeps);

  const TimeGrid& grid() const { return grid_; }
  int substeps() const { return substeps_; }
  std::size_t table_size() const { return table_count_; }
  double table_dt() const { return grid_.step() / substeps_; }
  double table_time(std::size_t j) const { return grid_.t_start() + j * table_dt(); }
  std::size_t node_index(std::size_t k) const { return k * substeps_; }

  Mat& k1(std::size_t j) { return k1_[j]; }
  Vec& k0(std::size_t j) { return k0_[j]; }
  const Mat& k1(std::size_t j) const { return k1_[j]; }
  const Vec& k0(std::size_t j) const { return k0_[j]; }

  void set_projection(double u_max) { projection_radius_ = u_max; }
  std::optional<double> projection_radius() const { return projection_radius_; }

  // Gains at time t, linearly interpolated between table entries.
  void gains_at(double t, Mat& K1, Vec& K0) const;

  // K1(t) x + K0(t), before any projection.
  Vec unconstrained(const Vec& x, double t) const;
  // Law output with the projection applied when configured.
  Vec operator()(const Vec& x, double t) const;

  // Constant-gain law over a grid, handy for tests and baselines.
  static FeedbackLaw constant(const TimeGrid& grid, const Mat& K1, const Vec& K0,
                              int substeps = 2);

 private:
  TimeGrid grid_;
  int substeps_;
  std::size_t table_count_;
  std::vector<Mat> k1_;
  std::vector<Vec> k0_;
  std::optional<double> projection_radius_;
};

struct LqtSolution {
  CostToGo cost;
  FeedbackLaw law;
};

// Backward integration of the quadratic value coefficients with the optimal
// gains K1 = -R^{-1}(B Lambda)^T S2, K0 = -R^{-1}(B Lambda)^T S1 substituted
// into the policy-evaluation equations. Terminal conditions: S2 = Q_f,
// S1 = -Q_f x_d(t1), S0 = x_d^T Q_f x_d.
LqtSolution solve_unconstrained_lqt(const Mat& A, const Mat& B_lambda, const LQTWeights& w,
                                    const ExoSignal& x_d, const TimeGrid& grid);

// Quadratic cost-to-go of a fixed affine law (policy evaluation).
CostToGo evaluate_policy(const FeedbackLaw& law, const Mat& A, const Mat& B_lambda,
                         const LQTWeights& w, const ExoSignal& x_d, const TimeGrid& grid);

// argmin over the ball ||u|| <= u_max of (u - u_uc)^T R (u - u_uc); requires
// R = R_u I (throws UnsupportedWeight otherwise). Shares the radial
// projection with the plant saturation.
Vec project_input(const Vec& u_uc, const LQTWeights& w, double u_max);

// Trapezoidal stage-cost integral plus terminal cost over a logged
// trajectory; the applied (saturated) input column enters the input penalty.
double quadrature_cost(const SimLog& traj, const LQTWeights& w, const ExoSignal& x_d);

// sup over a fixed probe set (origin and +/- unit basis points) of
// |V^{pi1}(x, t0) - V^{pi2}(x, t0)|.
double policy_gap(const FeedbackLaw& law1, const FeedbackLaw& law2, const Mat& A,
                  const Mat& B_lambda, const LQTWeights& w, const ExoSignal& x_d,
                  const TimeGrid& grid);

}  // namespace adaptrack
