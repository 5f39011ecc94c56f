#pragma once

#include <cmath>
#include <vector>

#include "ampd/ampd.hpp"

namespace ampd::testing {

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

inline Matrix mat(Eigen::Index rows, Eigen::Index cols, std::initializer_list<double> v) {
  Matrix out(rows, cols);
  auto it = v.begin();
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = *it++;
  return out;
}

// f(x) = 1/2 ||x||^2 on R^n with constraint (a, b).
inline Problem half_norm_problem(Matrix a, Vector b) {
  const Eigen::Index n = a.cols();
  QuadraticModel qm;
  qm.q.push_back(Matrix::Identity(n, n));
  qm.c.push_back(Vector::Zero(n));
  qm.d.push_back(0.0);
  return make_quadratic_problem("half_norm", qm, {1.0}, {1.0}, std::move(a), std::move(b));
}

// Matrix with prescribed singular values (rows x cols, sv.size() <= min).
inline Matrix with_singular_values(Eigen::Index rows, Eigen::Index cols, const Vector& sv, Rng& rng) {
  Eigen::HouseholderQR<Matrix> qu(rng.normal_matrix(rows, rows));
  Eigen::HouseholderQR<Matrix> qv(rng.normal_matrix(cols, cols));
  const Matrix u = qu.householderQ();
  const Matrix v = qv.householderQ();
  Matrix s = Matrix::Zero(rows, cols);
  for (Eigen::Index i = 0; i < sv.size(); ++i) s(i, i) = sv[i];
  return u * s * v.transpose();
}

}  // namespace ampd::testing
