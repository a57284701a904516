#include "adaptrack/msac.hpp"

#include <cmath>

#include "adaptrack/errors.hpp"

namespace adaptrack {

Mat IdealGains::theta_a() const {
  const auto n_x = K_x.cols();
  const auto n_u = K_x.rows();
  Mat theta(n_u, n_x + 2 * n_u);
  theta.leftCols(n_x) = K_x;
  theta.middleCols(n_x, n_u) = K_r;
  theta.rightCols(n_u) = Mat(lambda.asDiagonal());
  return theta;
}

IdealGains ideal_gains(const PlantSpec& plant, const ReferenceModel& model) {
  if (plant.n_x() != model.n_x() || plant.n_u() != model.n_u()) {
    throw DimensionMismatch("ideal_gains: plant and reference dimensions differ");
  }
  const Mat b_lambda = plant.B_p * plant.Lambda();
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(b_lambda);

  const Mat K_x = cod.solve(model.A_m - plant.A_p);
  const Mat K_r = cod.solve(model.B_m);

  const double scale = std::max(1.0, std::max(model.A_m.norm(), model.B_m.norm()));
  const double residual = std::max((plant.A_p + b_lambda * K_x - model.A_m).norm(),
                                   (b_lambda * K_r - model.B_m).norm());
  if (residual > 1e-8 * scale) {
    throw NoMatchingSolution("ideal_gains: matching conditions unsolvable, residual " +
                             std::to_string(residual));
  }
  return IdealGains{K_x, K_r, plant.lambda};
}

AugmentedRegressor AugmentedRegressor::build(const Vec& x_p, const Vec& r, const Vec& delta_u) {
  if (r.size() != delta_u.size()) {
    throw DimensionMismatch("AugmentedRegressor: r and delta_u sizes differ");
  }
  AugmentedRegressor reg;
  reg.n_x = static_cast<int>(x_p.size());
  reg.n_u = static_cast<int>(r.size());
  reg.phi_a.resize(reg.n_x + 2 * reg.n_u);
  reg.phi_a << x_p, r, -delta_u;
  return reg;
}

TunerState::TunerState(Mat theta_hat0, Mat xi0, Vec e_delta0, double gamma_in, double beta_in,
                       double mu_in, Mat P_in, Mat B_p_in)
    : theta_hat(std::move(theta_hat0)),
      xi(std::move(xi0)),
      e_delta(std::move(e_delta0)),
      gamma(gamma_in),
      beta(beta_in),
      mu(mu_in),
      P(std::move(P_in)),
      B_p(std::move(B_p_in)) {
  const int nx = n_x();
  const int nu = n_u();
  if (theta_hat.rows() != nu || theta_hat.cols() != nx + 2 * nu) {
    throw DimensionMismatch("TunerState: theta_hat must be n_u x (n_x + 2 n_u)");
  }
  if (xi.rows() != theta_hat.rows() || xi.cols() != theta_hat.cols()) {
    throw DimensionMismatch("TunerState: xi must match theta_hat shape");
  }
  if (e_delta.size() != nx) {
    throw DimensionMismatch("TunerState: e_delta must have state dimension");
  }
  if (P.rows() != nx || P.cols() != nx) {
    throw DimensionMismatch("TunerState: P must be n_x x n_x");
  }
  if (!(gamma > 0.0) || !(beta > 0.0)) {
    throw Error("TunerState: gamma and beta must be positive");
  }
  const double bound = mu_lower_bound(gamma, beta, P, B_p);
  if (mu < bound * (1.0 - 1e-12)) {
    throw Error("TunerState: mu " + std::to_string(mu) + " below lower bound " +
                std::to_string(bound));
  }
}

double TunerState::mu_lower_bound(double gamma, double beta, const Mat& P, const Mat& B_p) {
  return 2.0 * gamma / beta * (P * B_p).squaredNorm();
}

Vec msac_control(const TunerState& state, const Vec& x_p, const Vec& r) {
  if (x_p.size() != state.n_x() || r.size() != state.n_u()) {
    throw DimensionMismatch("msac_control: state or reference input size mismatch");
  }
  return state.K_x_hat() * x_p + state.K_r_hat() * r;
}

Vec aux_error_deriv(const TunerState& state, const ReferenceModel& model, const Vec& delta_u) {
  if (delta_u.size() != state.n_u()) {
    throw DimensionMismatch("aux_error_deriv: delta_u size mismatch");
  }
  return model.A_m * state.e_delta + state.B_p * (state.lambda_hat().asDiagonal() * delta_u);
}

TunerDeriv tuner_deriv(const TunerState& state, const Vec& e_u, const AugmentedRegressor& reg) {
  const int nx = state.n_x();
  const int nu = state.n_u();
  if (e_u.size() != nx || reg.phi_a.size() != nx + 2 * nu) {
    throw DimensionMismatch("tuner_deriv: error or regressor size mismatch");
  }
  TunerDeriv out;
  const Vec gradient_seed = state.B_p.transpose() * state.P * e_u;  // n_u
  out.d_xi = -state.gamma * gradient_seed * reg.phi_a.transpose();
  // The lambda estimate is a vector; only the diagonal of its block moves.
  for (int row = 0; row < nu; ++row) {
    for (int col = 0; col < nu; ++col) {
      if (row != col) {
        out.d_xi(row, nx + nu + col) = 0.0;
      }
    }
  }
  out.n_t = 1.0 + state.mu * reg.phi_a.squaredNorm();
  out.d_theta_hat = -state.beta * (state.theta_hat - state.xi) * out.n_t;
  return out;
}

namespace {

// tr(M_theta^T Lambda M_theta) + tr(M_lambda^T M_lambda), the block-weighted
// trace appearing in the Lyapunov function.
double weighted_trace(const Mat& m, const Vec& lambda, int n_x, int n_u) {
  const Mat m_theta = m.leftCols(n_x + n_u);
  const Mat m_lambda = m.rightCols(n_u);
  return (m_theta.transpose() * lambda.asDiagonal() * m_theta).trace() + m_lambda.squaredNorm();
}

}  // namespace

double lyapunov_value(const TunerState& state, const Vec& e_u, const IdealGains& oracle) {
  const int nx = state.n_x();
  const int nu = state.n_u();
  const Mat theta_a = oracle.theta_a();
  if (theta_a.rows() != state.theta_hat.rows() || theta_a.cols() != state.theta_hat.cols()) {
    throw DimensionMismatch("lyapunov_value: oracle gain shape mismatch");
  }
  const double quad = e_u.dot(state.P * e_u);
  const double mid = weighted_trace(state.xi - theta_a, oracle.lambda, nx, nu);
  const double fast = weighted_trace(state.theta_hat - state.xi, oracle.lambda, nx, nu);
  return quad + (mid + fast) / state.gamma;
}

std::pair<Mat, Mat> extract_parameters(const TunerState& state, const ReferenceModel& model,
                                       const Mat& B_p) {
  const Vec lam = state.lambda_hat();
  if ((lam.array() <= 0.0).any()) {
    throw NonPositiveLambdaEstimate(
        "extract_parameters: lambda_hat has a non-positive entry; estimate violates the "
        "positivity structure of Lambda");
  }
  const Mat Lambda_hat = lam.asDiagonal();
  const Mat A_p_hat = model.A_m - B_p * Lambda_hat * state.K_x_hat();
  return {A_p_hat, Lambda_hat};
}

}  // namespace adaptrack
