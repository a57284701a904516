#include "adaptrack/lqt.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "adaptrack/errors.hpp"
#include "adaptrack/linalg.hpp"
#include "adaptrack/ode.hpp"
#include "adaptrack/plant.hpp"

namespace adaptrack {

namespace {

void require_symmetric(const Mat& m, const char* name) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw NotSymmetric(std::string("LQTWeights: ") + name + " asymmetric beyond tolerance");
  }
}

}  // namespace

LQTWeights::LQTWeights(Mat Q, Mat R, Mat Q_f)
    : q_(std::move(Q)), r_(std::move(R)), q_f_(std::move(Q_f)) {
  if (q_.rows() != q_.cols() || q_f_.rows() != q_f_.cols() || r_.rows() != r_.cols()) {
    throw DimensionMismatch("LQTWeights: weights must be square");
  }
  if (q_.rows() != q_f_.rows()) {
    throw DimensionMismatch("LQTWeights: Q and Q_f sizes differ");
  }
  require_symmetric(q_, "Q");
  require_symmetric(r_, "R");
  require_symmetric(q_f_, "Q_f");
  q_ = symmetrize(q_);
  r_ = symmetrize(r_);
  q_f_ = symmetrize(q_f_);
  if (min_eig_sym(q_) < -1e-10) {
    throw Error("LQTWeights: Q not PSD");
  }
  if (min_eig_sym(q_f_) < -1e-10) {
    throw Error("LQTWeights: Q_f not PSD");
  }
  if (!(min_eig_sym(r_) > 0.0)) {
    throw Error("LQTWeights: R not PD");
  }

  r_u_ = r_(0, 0);
  identity_weighted_ = true;
  for (Eigen::Index i = 0; i < r_.rows() && identity_weighted_; ++i) {
    for (Eigen::Index j = 0; j < r_.cols(); ++j) {
      const double expected = i == j ? r_u_ : 0.0;
      if (std::abs(r_(i, j) - expected) > 1e-12 * std::max(1.0, std::abs(r_u_))) {
        identity_weighted_ = false;
        break;
      }
    }
  }
}

CostToGo::CostToGo(const TimeGrid& grid, int substeps) : grid_(grid), substeps_(substeps) {
  if (substeps < 1) {
    throw Error("CostToGo: substeps must be >= 1");
  }
  table_count_ = (grid.count() - 1) * static_cast<std::size_t>(substeps) + 1;
  s2_.resize(table_count_);
  s1_.resize(table_count_);
  s0_.resize(table_count_, 0.0);
}

double CostToGo::value(const Vec& x, double t) const {
  const double dt = table_dt();
  double pos = (t - grid_.t_start()) / dt;
  pos = std::clamp(pos, 0.0, static_cast<double>(table_count_ - 1));
  const std::size_t lo = static_cast<std::size_t>(pos) == table_count_ - 1
                             ? table_count_ - 2
                             : static_cast<std::size_t>(pos);
  const double w = pos - static_cast<double>(lo);
  const Mat s2 = (1.0 - w) * s2_[lo] + w * s2_[lo + 1];
  const Vec s1 = (1.0 - w) * s1_[lo] + w * s1_[lo + 1];
  const double s0 = (1.0 - w) * s0_[lo] + w * s0_[lo + 1];
  return x.dot(s2 * x) + 2.0 * x.dot(s1) + s0;
}

FeedbackLaw::FeedbackLaw(const TimeGrid& grid, int substeps) : grid_(grid), substeps_(substeps) {
  if (substeps < 1) {
    throw Error("FeedbackLaw: substeps must be >= 1");
  }
  table_count_ = (grid.count() - 1) * static_cast<std::size_t>(substeps) + 1;
  k1_.resize(table_count_);
  k0_.resize(table_count_);
}

void FeedbackLaw::gains_at(double t, Mat& K1, Vec& K0) const {
  const double dt = table_dt();
  double pos = (t - grid_.t_start()) / dt;
  pos = std::clamp(pos, 0.0, static_cast<double>(table_count_ - 1));
  const std::size_t lo = static_cast<std::size_t>(pos) == table_count_ - 1
                             ? table_count_ - 2
                             : static_cast<std::size_t>(pos);
  const double w = pos - static_cast<double>(lo);
  K1 = (1.0 - w) * k1_[lo] + w * k1_[lo + 1];
  K0 = (1.0 - w) * k0_[lo] + w * k0_[lo + 1];
}

Vec FeedbackLaw::unconstrained(const Vec& x, double t) const {
  Mat K1;
  Vec K0;
  gains_at(t, K1, K0);
  return K1 * x + K0;
}

Vec FeedbackLaw::operator()(const Vec& x, double t) const {
  Vec u = unconstrained(x, t);
  if (projection_radius_) {
    u = saturate(u, *projection_radius_);
  }
  return u;
}

FeedbackLaw FeedbackLaw::constant(const TimeGrid& grid, const Mat& K1, const Vec& K0,
                                  int substeps) {
  FeedbackLaw law(grid, substeps);
  for (std::size_t j = 0; j < law.table_size(); ++j) {
    law.k1(j) = K1;
    law.k0(j) = K0;
  }
  return law;
}

namespace {

// Coefficient equations shared by the optimal solve and policy evaluation:
//   S2' = -Q - S2 Acl - Acl^T S2 - K1^T R K1
//   S1' = Q x_d - [S2 B K0 + Acl^T S1 + K1^T R K0]
//   S0' = -x_d^T Q x_d - 2 S1^T B K0 - K0^T R K0
// with Acl = A + B K1 and B standing for B_p Lambda.
struct ValueOde {
  const Mat& A;
  const Mat& B;
  const LQTWeights& w;
  const ExoSignal& x_d;
  int n;

  int packed_size() const { return n * n + n + 1; }

  Vec pack(const Mat& s2, const Vec& s1, double s0) const {
    Vec y(packed_size());
    for (int c = 0; c < n; ++c) {
      y.segment(c * n, n) = s2.col(c);
    }
    y.segment(n * n, n) = s1;
    y(n * n + n) = s0;
    return y;
  }
  void unpack(const Vec& y, Mat& s2, Vec& s1, double& s0) const {
    s2.resize(n, n);
    for (int c = 0; c < n; ++c) {
      s2.col(c) = y.segment(c * n, n);
    }
    s1 = y.segment(n * n, n);
    s0 = y(n * n + n);
  }

  Vec rhs(double t, const Mat& s2, const Vec& s1, double s0, const Mat& K1,
          const Vec& K0) const {
    (void)s0;
    const Vec d = x_d.value(t);
    const Mat a_cl = A + B * K1;
    const Mat rk1 = w.R() * K1;
    const Mat ds2 = -w.Q() - s2 * a_cl - a_cl.transpose() * s2 - K1.transpose() * rk1;
    const Vec bk0 = B * K0;
    const Vec ds1 = w.Q() * d - (s2 * bk0 + a_cl.transpose() * s1 + K1.transpose() * (w.R() * K0));
    const double ds0 = -d.dot(w.Q() * d) - 2.0 * s1.dot(bk0) - K0.dot(w.R() * K0);
    Vec out(packed_size());
    for (int c = 0; c < n; ++c) {
      out.segment(c * n, n) = ds2.col(c);
    }
    out.segment(n * n, n) = ds1;
    out(n * n + n) = ds0;
    return out;
  }

  Vec terminal(double t1) const {
    const Vec d = x_d.value(t1);
    return pack(w.Q_f(), -w.Q_f() * d, d.dot(w.Q_f() * d));
  }
};

using GainProvider = std::function<void(double, const Mat&, const Vec&, Mat&, Vec&)>;

// Backward sweep filling the cost tables (and, when laws is non-null, the
// gain tables) at the requested substep resolution.
void backward_sweep(const ValueOde& ode, const TimeGrid& grid, int substeps,
                    const GainProvider& gains, CostToGo& cost, FeedbackLaw* law) {
  const double dt = grid.step() / substeps;
  const std::size_t last = cost.table_size() - 1;

  VectorField field = [&](double t, const Vec& y) {
    Mat s2;
    Vec s1;
    double s0;
    ode.unpack(y, s2, s1, s0);
    Mat K1;
    Vec K0;
    gains(t, s2, s1, K1, K0);
    return ode.rhs(t, s2, s1, s0, K1, K0);
  };

  Vec y = ode.terminal(grid.t_end());
  for (std::size_t j = last;; --j) {
    Mat s2;
    Vec s1;
    double s0;
    ode.unpack(y, s2, s1, s0);
    s2 = symmetrize(s2);
    cost.s2(j) = s2;
    cost.s1(j) = s1;
    cost.s0(j) = s0;
    if (law != nullptr) {
      gains(cost.table_time(j), s2, s1, law->k1(j), law->k0(j));
    }
    if (j == 0) {
      break;
    }
    y = ode.pack(s2, s1, s0);
    y = rk4_step(field, cost.table_time(j), y, -dt);
  }
}

}  // namespace

LqtSolution solve_unconstrained_lqt(const Mat& A, const Mat& B_lambda, const LQTWeights& w,
                                    const ExoSignal& x_d, const TimeGrid& grid) {
  const int n = static_cast<int>(A.rows());
  if (A.cols() != n || B_lambda.rows() != n) {
    throw DimensionMismatch("solve_unconstrained_lqt: A or B dimensions inconsistent");
  }
  if (w.Q().rows() != n || w.R().rows() != B_lambda.cols() || x_d.dim() != n) {
    throw DimensionMismatch("solve_unconstrained_lqt: weight or signal dimensions inconsistent");
  }
  const int substeps = 2;
  const ValueOde ode{A, B_lambda, w, x_d, n};
  const Mat r_inv_bt = w.R().ldlt().solve(B_lambda.transpose());

  GainProvider optimal = [&](double, const Mat& s2, const Vec& s1, Mat& K1, Vec& K0) {
    K1 = -r_inv_bt * s2;
    K0 = -r_inv_bt * s1;
  };

  LqtSolution sol{CostToGo(grid, substeps), FeedbackLaw(grid, substeps)};
  backward_sweep(ode, grid, substeps, optimal, sol.cost, &sol.law);
  return sol;
}

CostToGo evaluate_policy(const FeedbackLaw& law, const Mat& A, const Mat& B_lambda,
                         const LQTWeights& w, const ExoSignal& x_d, const TimeGrid& grid) {
  if (!law.grid().same_as(grid)) {
    throw GridMismatch("evaluate_policy: law grid does not match the requested grid");
  }
  const int n = static_cast<int>(A.rows());
  const ValueOde ode{A, B_lambda, w, x_d, n};

  GainProvider from_law = [&](double t, const Mat&, const Vec&, Mat& K1, Vec& K0) {
    law.gains_at(t, K1, K0);
  };

  CostToGo cost(grid, 1);
  backward_sweep(ode, grid, 1, from_law, cost, nullptr);
  return cost;
}

Vec project_input(const Vec& u_uc, const LQTWeights& w, double u_max) {
  if (!w.identity_weighted()) {
    throw UnsupportedWeight(
        "project_input: R must be a positive multiple of the identity for the closed-form "
        "ball projection");
  }
  return saturate(u_uc, u_max);
}

double quadrature_cost(const SimLog& traj, const LQTWeights& w, const ExoSignal& x_d) {
  if (traj.rows() == 0) {
    throw EmptyOrDegenerateLog("quadrature_cost: empty log");
  }
  auto stage = [&](std::size_t i) {
    const Vec err = traj.x_p(i) - x_d.value(traj.t(i));
    const Vec& u = traj.u_sat(i);
    return err.dot(w.Q() * err) + u.dot(w.R() * u);
  };
  double integral = 0.0;
  for (std::size_t i = 0; i + 1 < traj.rows(); ++i) {
    integral += 0.5 * (traj.t(i + 1) - traj.t(i)) * (stage(i) + stage(i + 1));
  }
  const std::size_t end = traj.rows() - 1;
  const Vec err_end = traj.x_p(end) - x_d.value(traj.t(end));
  return integral + err_end.dot(w.Q_f() * err_end);
}

double policy_gap(const FeedbackLaw& law1, const FeedbackLaw& law2, const Mat& A,
                  const Mat& B_lambda, const LQTWeights& w, const ExoSignal& x_d,
                  const TimeGrid& grid) {
  const CostToGo v1 = evaluate_policy(law1, A, B_lambda, w, x_d, grid);
  const CostToGo v2 = evaluate_policy(law2, A, B_lambda, w, x_d, grid);
  const int n = static_cast<int>(A.rows());
  double gap = 0.0;
  const double t0 = grid.t_start();
  auto probe = [&](const Vec& x) {
    gap = std::max(gap, std::abs(v1.value(x, t0) - v2.value(x, t0)));
  };
  probe(Vec::Zero(n));
  for (int i = 0; i < n; ++i) {
    probe(Vec::Unit(n, i));
    probe(-Vec::Unit(n, i));
  }
  return gap;
}

}  // namespace adaptrack
