#pragma once

#include "adaptrack/types.hpp"

namespace adaptrack {

// (M + M^T)/2
Mat symmetrize(const Mat& m);

// All eigenvalues strictly in the open left half plane. Uses the closed-form
// trace/determinant test for 2x2; QR-iteration eigenvalues otherwise.
bool is_hurwitz(const Mat& a);

// Solves A^T P + P A = -Q for symmetric P by vectorizing to an n^2 linear
// system. Requires A Hurwitz; Q is expected symmetric positive definite.
Mat solve_lyapunov(const Mat& a, const Mat& q);

// Smallest eigenvalue of a symmetric matrix; throws NotSymmetric when the
// input is asymmetric beyond tolerance.
double min_eig_sym(const Mat& m);

}  // namespace adaptrack
