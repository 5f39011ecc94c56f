#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "ampd/error.hpp"
#include "ampd/rng.hpp"

namespace ampd {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Spectral norm ||A||_2 by power iteration on A^T A.
///
/// The start vector is a fixed pseudo-random unit vector, so results are
/// reproducible run to run. Stops when the Rayleigh residual
/// ||A^T A v - rho v|| <= tol * rho. Returns 0 for an empty or zero matrix.
inline double operator_norm(const Matrix& a, double tol = 1e-12, int max_iter = 100000) {
  if (!(tol > 0.0)) throw PreconditionError("operator_norm: tol must be positive");
  detail::require_finite(a, "operator_norm input");
  if (a.size() == 0 || a.cwiseAbs().maxCoeff() == 0.0) return 0.0;

  Rng rng(0x5EED5EED5EEDULL);
  Vector v(a.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.uniform(0.5, 1.5);
  v.normalize();

  for (int it = 0; it < max_iter; ++it) {
    Vector w = a.transpose() * (a * v);
    const double rho = v.dot(w);
    const double wn = w.norm();
    if (wn == 0.0) return 0.0;
    if ((w - rho * v).norm() <= tol * rho) return std::sqrt(rho);
    v = w / wn;
  }
  throw ConvergenceError("operator_norm: power iteration did not converge", v);
}

/// Rank-detection threshold for singular values: max(r, n) * ||A|| * eps.
inline double rank_threshold(Eigen::Index rows, Eigen::Index cols, double norm) {
  return static_cast<double>(std::max(rows, cols)) * norm * std::numeric_limits<double>::epsilon();
}

/// Smallest singular value of A above the rank-detection threshold.
inline double min_positive_singular(const Matrix& a) {
  detail::require_finite(a, "min_positive_singular input");
  if (a.size() == 0 || a.cwiseAbs().maxCoeff() == 0.0)
    throw PreconditionError("min_positive_singular: A = 0, smallest positive singular value undefined");
  Eigen::JacobiSVD<Matrix> svd(a);
  const Vector& s = svd.singularValues();  // descending
  const double thr = rank_threshold(a.rows(), a.cols(), s[0]);
  double out = s[0];
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > thr) out = s[i];
  return out;
}

/// Least-norm correction of x onto {z : A z = b}: z = x - A^+ (A x - b).
inline Vector project_affine(const Matrix& a, const Vector& b, const Vector& x) {
  if (a.rows() == 0) return x;
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(a);
  return x - cod.solve(Vector(a * x - b));
}

}  // namespace ampd
