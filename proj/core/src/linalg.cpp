#include "adaptrack/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "adaptrack/errors.hpp"

namespace adaptrack {

Mat symmetrize(const Mat& m) { return 0.5 * (m + m.transpose()); }

bool is_hurwitz(const Mat& a) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw DimensionMismatch("is_hurwitz: matrix must be square and non-empty");
  }
  const auto n = a.rows();
  if (n == 1) {
    return a(0, 0) < 0.0;
  }
  if (n == 2) {
    // Both roots of s^2 - tr s + det lie in the open left half plane iff
    // tr < 0 and det > 0.
    return a.trace() < 0.0 && a.determinant() > 0.0;
  }
  Eigen::EigenSolver<Mat> es(a, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) {
    throw SolveFailed("is_hurwitz: eigenvalue iteration did not converge");
  }
  return (es.eigenvalues().real().array() < 0.0).all();
}

Mat solve_lyapunov(const Mat& a, const Mat& q) {
  if (a.rows() != a.cols() || q.rows() != q.cols() || a.rows() != q.rows()) {
    throw DimensionMismatch("solve_lyapunov: A and Q must be square with equal size");
  }
  if (!is_hurwitz(a)) {
    throw NotHurwitz("solve_lyapunov: A is not Hurwitz");
  }
  const auto n = a.rows();
  const Mat at = a.transpose();

  // vec(A^T P + P A) = (I (x) A^T + A^T (x) I) vec(P), column-major vec.
  Mat big = Mat::Zero(n * n, n * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    big.block(j * n, j * n, n, n) += at;            // I (x) A^T
    for (Eigen::Index i = 0; i < n; ++i) {
      big.block(j * n, i * n, n, n) += at(j, i) * Mat::Identity(n, n);  // A^T (x) I
    }
  }

  Vec rhs(n * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    rhs.segment(j * n, n) = -q.col(j);
  }

  Eigen::FullPivLU<Mat> lu(big);
  if (!lu.isInvertible()) {
    throw SolveFailed("solve_lyapunov: vectorized system is singular");
  }
  const Vec p_vec = lu.solve(rhs);

  Mat p(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    p.col(j) = p_vec.segment(j * n, n);
  }
  p = symmetrize(p);

  const double residual = (at * p + p * a + q).norm();
  if (!(residual <= 1e-8 * std::max(1.0, q.norm()))) {
    throw SolveFailed("solve_lyapunov: residual " + std::to_string(residual) + " too large");
  }
  return p;
}

double min_eig_sym(const Mat& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DimensionMismatch("min_eig_sym: matrix must be square and non-empty");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-9 * scale) {
    throw NotSymmetric("min_eig_sym: input asymmetric beyond tolerance");
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(m), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw SolveFailed("min_eig_sym: eigen decomposition failed");
  }
  return es.eigenvalues()(0);
}

}  // namespace adaptrack
