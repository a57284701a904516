#include "adaptrack/plant.hpp"

#include <algorithm>
#include <cmath>

#include "adaptrack/errors.hpp"
#include "adaptrack/linalg.hpp"

namespace adaptrack {

PlantSpec::PlantSpec(Mat A_p_in, Mat B_p_in, Vec lambda_in, double u_max_in, Vec x0_in)
    : A_p(std::move(A_p_in)),
      B_p(std::move(B_p_in)),
      lambda(std::move(lambda_in)),
      u_max(u_max_in),
      x0(std::move(x0_in)) {
  if (A_p.rows() != A_p.cols()) {
    throw DimensionMismatch("PlantSpec: A_p must be square");
  }
  if (B_p.rows() != A_p.rows()) {
    throw DimensionMismatch("PlantSpec: B_p row count must match A_p");
  }
  if (lambda.size() != B_p.cols()) {
    throw DimensionMismatch("PlantSpec: lambda size must match input count");
  }
  if ((lambda.array() <= 0.0).any()) {
    throw Error("PlantSpec: Lambda diagonal entries must be positive");
  }
  if (!(u_max > 0.0) || !std::isfinite(u_max)) {
    throw Error("PlantSpec: u_max must be positive");
  }
  if (x0.size() != A_p.rows()) {
    throw DimensionMismatch("PlantSpec: x0 size must match state dimension");
  }
}

ReferenceModel::ReferenceModel(Mat A_m_in, Mat B_m_in, Vec x_m0_in)
    : A_m(std::move(A_m_in)), B_m(std::move(B_m_in)), x_m0(std::move(x_m0_in)), r_max(0.0) {
  if (A_m.rows() != A_m.cols()) {
    throw DimensionMismatch("ReferenceModel: A_m must be square");
  }
  if (B_m.rows() != A_m.rows()) {
    throw DimensionMismatch("ReferenceModel: B_m row count must match A_m");
  }
  if (x_m0.size() != A_m.rows()) {
    throw DimensionMismatch("ReferenceModel: x_m0 size must match state dimension");
  }
  if (!is_hurwitz(A_m)) {
    throw NotHurwitz("ReferenceModel: A_m is not Hurwitz");
  }
  Eigen::ColPivHouseholderQR<Mat> qr(B_m);
  if (qr.rank() != B_m.cols()) {
    throw Error("ReferenceModel: B_m must have full column rank");
  }
}

Vec saturate(const Vec& u, double u_max) {
  const double norm = u.norm();
  if (norm <= u_max) {
    return u;
  }
  return u * (u_max / norm);
}

Vec plant_deriv(const PlantSpec& spec, const Vec& x_p, const Vec& u) {
  if (x_p.size() != spec.n_x() || u.size() != spec.n_u()) {
    throw DimensionMismatch("plant_deriv: state or input size mismatch");
  }
  return spec.A_p * x_p + spec.B_p * (spec.lambda.asDiagonal() * saturate(u, spec.u_max));
}

Vec reference_input(const ReferenceModel& model, const Vec& x_d, const Vec& xdot_d) {
  if (x_d.size() != model.n_x() || xdot_d.size() != model.n_x()) {
    throw DimensionMismatch("reference_input: signal size mismatch");
  }
  const Vec rhs = model.B_m.transpose() * (-model.A_m * x_d + xdot_d);
  return (model.B_m.transpose() * model.B_m).ldlt().solve(rhs);
}

Vec reference_deriv(const ReferenceModel& model, const Vec& x_m, const Vec& r) {
  if (x_m.size() != model.n_x() || r.size() != model.n_u()) {
    throw DimensionMismatch("reference_deriv: state or input size mismatch");
  }
  return model.A_m * x_m + model.B_m * r;
}

double estimate_r_max(const ReferenceModel& model, const ExoSignal& exo, double t_end) {
  double best = 0.0;
  const int samples = 4096;
  for (int k = 0; k <= samples; ++k) {
    const double t = t_end * static_cast<double>(k) / samples;
    best = std::max(best, reference_input(model, exo.value(t), exo.derivative(t)).norm());
  }
  return best;
}

}  // namespace adaptrack
