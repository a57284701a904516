#pragma once

#include <utility>

#include "adaptrack/plant.hpp"
#include "adaptrack/types.hpp"

namespace adaptrack {

// Ideal gains satisfying the matching conditions
//   A_p + B_p Lambda K_x = A_m,   B_p Lambda K_r = B_m.
// Simulation-side oracle: used for diagnostics and for the scaled initial
// estimates, never fed to the controller as truth.
struct IdealGains {
  Mat K_x;     // n_u x n_x
  Mat K_r;     // n_u x n_u
  Vec lambda;  // true diagonal of Lambda

  // [K_x, K_r, diag(lambda)], the target of adaptation.
  Mat theta_a() const;
};

IdealGains ideal_gains(const PlantSpec& plant, const ReferenceModel& model);

// Regressor [x_p; r] augmented with the negated saturation deficit:
// phi_a = [x_p^T, r^T, -delta_u^T]^T.
struct AugmentedRegressor {
  Vec phi_a;
  int n_x = 0;
  int n_u = 0;

  static AugmentedRegressor build(const Vec& x_p, const Vec& r, const Vec& delta_u);
  Vec phi() const { return phi_a.head(n_x + n_u); }
};

// Adaptive estimates and the high-order tuner bookkeeping. theta_hat and xi
// are n_u x (n_x + 2 n_u), stacking [K_x_hat, K_r_hat, diag(lambda_hat)];
// the trailing block stays diagonal because the estimate is the vector
// lambda_hat, not a full matrix.
class TunerState {
 public:
  TunerState(Mat theta_hat0, Mat xi0, Vec e_delta0, double gamma, double beta, double mu,
             Mat P, Mat B_p);

  // mu must satisfy mu >= 2 gamma / beta * ||P B_p||_F^2.
  static double mu_lower_bound(double gamma, double beta, const Mat& P, const Mat& B_p);

  Mat theta_hat;
  Mat xi;
  Vec e_delta;
  double gamma;
  double beta;
  double mu;
  Mat P;    // Lyapunov solution for A_m
  Mat B_p;  // known input map

  int n_x() const { return static_cast<int>(B_p.rows()); }
  int n_u() const { return static_cast<int>(B_p.cols()); }

  Mat K_x_hat() const { return theta_hat.leftCols(n_x()); }
  Mat K_r_hat() const { return theta_hat.middleCols(n_x(), n_u()); }
  Vec lambda_hat() const { return theta_hat.rightCols(n_u()).diagonal(); }
};

// u = K_x_hat x_p + K_r_hat r (unsaturated; the plant applies saturation).
Vec msac_control(const TunerState& state, const Vec& x_p, const Vec& r);

// e_delta' = A_m e_delta + B_p diag(lambda_hat) delta_u
Vec aux_error_deriv(const TunerState& state, const ReferenceModel& model, const Vec& delta_u);

struct TunerDeriv {
  Mat d_xi;
  Mat d_theta_hat;
  double n_t = 0.0;  // normalization 1 + mu * phi_a^T phi_a
};

// High-order tuner laws:
//   xi'        = -gamma B_p^T P e_u phi_a^T
//   theta_hat' = -beta (theta_hat - xi) N_t
TunerDeriv tuner_deriv(const TunerState& state, const Vec& e_u, const AugmentedRegressor& reg);

// Lyapunov diagnostic
//   V = e_u^T P e_u + (1/gamma) tr[(Xi - Theta)^T L (Xi - Theta)]
//     + (1/gamma) tr[(That - Xi)^T L (That - Xi)]
// where the [K_x, K_r] column block is weighted by the true Lambda and the
// lambda block by the identity. Requires oracle access; diagnostics only.
double lyapunov_value(const TunerState& state, const Vec& e_u, const IdealGains& oracle);

// End-of-phase extraction: A_p_hat = A_m - B_p Lambda_hat K_x_hat,
// Lambda_hat = diag(lambda_hat). Throws NonPositiveLambdaEstimate when any
// lambda_hat entry is <= 0.
std::pair<Mat, Mat> extract_parameters(const TunerState& state, const ReferenceModel& model,
                                       const Mat& B_p);

}  // namespace adaptrack
