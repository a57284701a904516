#include "adaptrack/msac_sim.hpp"

#include "adaptrack/errors.hpp"
#include "adaptrack/ode.hpp"

namespace adaptrack {

namespace {

// Coupled state layout: [x_p, x_m, e_delta, vec(xi), vec(theta_hat)] with the
// matrices flattened row by row.
struct Packer {
  int n_x;
  int n_u;
  int mat_cols;

  int mat_size() const { return n_u * mat_cols; }
  int total() const { return 3 * n_x + 2 * mat_size(); }

  void pack_mat(const Mat& m, Vec& out, int offset) const {
    for (int r = 0; r < n_u; ++r) {
      out.segment(offset + r * mat_cols, mat_cols) = m.row(r);
    }
  }
  Mat unpack_mat(const Vec& in, int offset) const {
    Mat m(n_u, mat_cols);
    for (int r = 0; r < n_u; ++r) {
      m.row(r) = in.segment(offset + r * mat_cols, mat_cols);
    }
    return m;
  }

  Vec pack(const Vec& x_p, const Vec& x_m, const Vec& e_delta, const Mat& xi,
           const Mat& theta) const {
    Vec out(total());
    out.segment(0, n_x) = x_p;
    out.segment(n_x, n_x) = x_m;
    out.segment(2 * n_x, n_x) = e_delta;
    pack_mat(xi, out, 3 * n_x);
    pack_mat(theta, out, 3 * n_x + mat_size());
    return out;
  }
};

}  // namespace

MsacRunResult run_msac_phase(const PlantSpec& plant, const ReferenceModel& model,
                             const ExoSignal& exo, TunerState tuner, const IdealGains& oracle,
                             const TimeGrid& grid) {
  const int n_x = plant.n_x();
  const int n_u = plant.n_u();
  if (exo.dim() != n_x) {
    throw DimensionMismatch("run_msac_phase: exo signal dimension must match the state");
  }
  const Packer pk{n_x, n_u, n_x + 2 * n_u};
  const Mat theta_a = oracle.theta_a();

  // Everything the control loop derives from (t, coupled state).
  struct Instant {
    Vec x_p, x_m, e_delta, r, u, u_sat, delta_u, e_u;
    Mat xi, theta;
    AugmentedRegressor reg;
  };
  auto inspect = [&](double t, const Vec& y) {
    Instant s;
    s.x_p = y.segment(0, n_x);
    s.x_m = y.segment(n_x, n_x);
    s.e_delta = y.segment(2 * n_x, n_x);
    s.xi = pk.unpack_mat(y, 3 * n_x);
    s.theta = pk.unpack_mat(y, 3 * n_x + pk.mat_size());
    s.r = reference_input(model, exo.value(t), exo.derivative(t));
    s.u = s.theta.leftCols(n_x) * s.x_p + s.theta.middleCols(n_x, n_u) * s.r;
    s.u_sat = saturate(s.u, plant.u_max);
    s.delta_u = s.u_sat - s.u;
    s.e_u = (s.x_p - s.x_m) - s.e_delta;
    s.reg = AugmentedRegressor::build(s.x_p, s.r, s.delta_u);
    return s;
  };

  VectorField field = [&](double t, const Vec& y) {
    const Instant s = inspect(t, y);
    TunerState snap = tuner;
    snap.theta_hat = s.theta;
    snap.xi = s.xi;
    snap.e_delta = s.e_delta;
    const TunerDeriv dt_tuner = tuner_deriv(snap, s.e_u, s.reg);
    return pk.pack(plant_deriv(plant, s.x_p, s.u), reference_deriv(model, s.x_m, s.r),
                   aux_error_deriv(snap, model, s.delta_u), dt_tuner.d_xi, dt_tuner.d_theta_hat);
  };

  MsacRunResult result{SimLog(n_x, n_u), tuner, {}, 0.0, 0.0};
  result.regressor.reserve(grid.count());

  Vec y = pk.pack(plant.x0, model.x_m0, tuner.e_delta, tuner.xi, tuner.theta_hat);
  for (std::size_t k = 0; k < grid.count(); ++k) {
    const double t = grid.node(k);
    const Instant s = inspect(t, y);

    TunerState snap = tuner;
    snap.theta_hat = s.theta;
    snap.xi = s.xi;
    snap.e_delta = s.e_delta;
    const double theta_err = (s.theta - theta_a).norm();
    const double v = lyapunov_value(snap, s.e_u, oracle);

    result.log.append(t, s.x_p, s.x_m, exo.value(t), s.u, s.u_sat, s.delta_u, theta_err, v,
                      Phase::Msac);
    result.regressor.push_back(s.reg.phi_a);

    if (k + 1 == grid.count()) {
      result.tuner = snap;
      result.theta_err_at_switch = theta_err;
      result.lyapunov_at_switch = v;
    } else {
      y = rk4_step(field, t, y, grid.step());
    }
  }
  return result;
}

}  // namespace adaptrack
