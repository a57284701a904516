#pragma once

#include "adaptrack/exo_signal.hpp"
#include "adaptrack/types.hpp"

namespace adaptrack {

// True plant x_p' = A_p x_p + B_p Lambda sat(u). A_p and Lambda are ground
// truth owned by the simulator; controllers may read B_p, u_max and x0 only.
struct PlantSpec {
  Mat A_p;
  Mat B_p;
  Vec lambda;    // diagonal of Lambda, all entries > 0
  double u_max;  // radius of the input ball
  Vec x0;

  PlantSpec(Mat A_p, Mat B_p, Vec lambda, double u_max, Vec x0);

  int n_x() const { return static_cast<int>(A_p.rows()); }
  int n_u() const { return static_cast<int>(B_p.cols()); }
  Mat Lambda() const { return lambda.asDiagonal(); }
};

// Reference system x_m' = A_m x_m + B_m r with A_m Hurwitz and B_m full
// column rank (both checked at construction).
struct ReferenceModel {
  Mat A_m;
  Mat B_m;
  Vec x_m0;       // initial reference state
  double r_max;   // bound on ||r|| over the experiment, 0 until estimated

  ReferenceModel(Mat A_m, Mat B_m, Vec x_m0);

  int n_x() const { return static_cast<int>(A_m.rows()); }
  int n_u() const { return static_cast<int>(B_m.cols()); }
};

// Radial projection onto the ball of radius u_max: u is returned unchanged
// when ||u|| <= u_max, otherwise scaled by u_max/||u||.
Vec saturate(const Vec& u, double u_max);

// A_p x_p + B_p Lambda sat(u)
Vec plant_deriv(const PlantSpec& spec, const Vec& x_p, const Vec& u);

// Reference input making x_m track x_d: r = (B_m^T B_m)^{-1} B_m^T (-A_m x_d + x_d').
Vec reference_input(const ReferenceModel& model, const Vec& x_d, const Vec& xdot_d);

// A_m x_m + B_m r
Vec reference_deriv(const ReferenceModel& model, const Vec& x_m, const Vec& r);

// Coarse sampled estimate of sup ||r(t)|| over [0, t_end]; used to fill
// ReferenceModel::r_max.
double estimate_r_max(const ReferenceModel& model, const ExoSignal& exo, double t_end);

}  // namespace adaptrack
