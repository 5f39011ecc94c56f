#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <vector>

#include "ampd/error.hpp"
#include "ampd/linalg.hpp"

namespace ampd {

/// lambda in the unit simplex Delta_m.
struct SimplexWeights {
  Vector lambda;
};

/// Euclidean projection of w onto conv{rows of G} with a witnessing lambda.
struct HullProjection {
  Vector point;             ///< p = G^T lambda
  SimplexWeights weights;
  double objective = 0.0;   ///< 1/2 ||p - w||^2
};

struct HullQpOptions {
  /// Stop when the Frank-Wolfe gap max_j <w - p, g_j - p> falls below
  /// gap_tol * (1 + ||w||) * (1 + max_j ||g_j||).
  double gap_tol = 1e-12;
  int max_iter = 100000;
  /// Solve the KKT system on candidate faces (supports of at most 12 vertices).
  bool polish = true;
};

/// argmin over Delta_m of ||lambda - y||^2 (sort-and-threshold).
inline SimplexWeights simplex_project(const Vector& y) {
  if (y.size() < 1) throw DimensionError("simplex_project: empty input");
  detail::require_finite(y, "simplex_project input");
  std::vector<double> u(y.data(), y.data() + y.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0;
  double tau = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    cumsum += u[i];
    const double t = (cumsum - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) tau = t;
  }
  return SimplexWeights{(y.array() - tau).cwiseMax(0.0).matrix()};
}

/// max_j <w - p, g_j - p>; nonpositive exactly when p is the projection.
inline double hull_vi_residual(const Matrix& g, const Vector& w, const Vector& p) {
  return ((g.rowwise() - p.transpose()) * (w - p)).maxCoeff();
}

namespace detail {

inline HullProjection finish_projection(const Matrix& g, const Vector& w, Vector lambda) {
  HullProjection out;
  out.point = g.transpose() * lambda;
  out.objective = 0.5 * (out.point - w).squaredNorm();
  out.weights.lambda = std::move(lambda);
  return out;
}

// Exact minimizer of the QP restricted to the face spanned by `idx`, from
// the equality-constrained KKT system. Empty when it leaves the simplex.
inline std::optional<Vector> simplex_face_solve(const Matrix& h, const Vector& c, const std::vector<Eigen::Index>& idx) {
  const auto k = static_cast<Eigen::Index>(idx.size());
  Matrix kkt = Matrix::Zero(k + 1, k + 1);
  Vector rhs(k + 1);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = 0; b < k; ++b) kkt(a, b) = h(idx[a], idx[b]);
    kkt(a, k) = kkt(k, a) = 1.0;
    rhs[a] = c[idx[a]];
  }
  rhs[k] = 1.0;
  const Vector sol = Eigen::CompleteOrthogonalDecomposition<Matrix>(kkt).solve(rhs);
  Vector lam = Vector::Zero(h.rows());
  for (Eigen::Index a = 0; a < k; ++a) {
    if (!std::isfinite(sol[a]) || sol[a] < -1e-12) return std::nullopt;
    lam[idx[a]] = std::max(sol[a], 0.0);
  }
  const double sum = lam.sum();
  if (!(sum > 0.0)) return std::nullopt;
  return Vector(lam / sum);
}

// Tries every subset of `support` (largest first) as the optimal face.
inline std::optional<Vector> simplex_face_polish(const Matrix& h, const Vector& c, const std::vector<Eigen::Index>& support,
                                                 const std::function<bool(const Vector&)>& accept) {
  const auto k = support.size();
  if (k == 0 || k > 12) return std::nullopt;
  std::vector<unsigned> masks((1u << k) - 1);
  std::iota(masks.begin(), masks.end(), 1u);
  std::stable_sort(masks.begin(), masks.end(),
                   [](unsigned a, unsigned b) { return __builtin_popcount(a) > __builtin_popcount(b); });
  std::vector<Eigen::Index> idx;
  for (unsigned mask : masks) {
    idx.clear();
    for (std::size_t i = 0; i < k; ++i)
      if (mask & (1u << i)) idx.push_back(support[i]);
    if (auto lam = simplex_face_solve(h, c, idx); lam && accept(*lam)) return lam;
  }
  return std::nullopt;
}

// Accelerated projected gradient on 1/2 l^T H l - c^T l over Delta_m,
// H = G G^T, c = G w, step 1/||H||, with monotone restart.
inline Vector simplex_qp_apg(const Matrix& g, const Vector& w, const HullQpOptions& opt) {
  const Eigen::Index m = g.rows();
  const Matrix h = g * g.transpose();
  const Vector c = g * w;
  const double hnorm = Eigen::SelfAdjointEigenSolver<Matrix>(h, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
  const double scale = opt.gap_tol * (1.0 + w.norm()) * (1.0 + g.rowwise().norm().maxCoeff());

  auto value = [&](const Vector& l) { return 0.5 * l.dot(h * l) - c.dot(l); };
  auto gap_of = [&](const Vector& l, const Vector& grad) { return l.dot(grad) - grad.minCoeff(); };

  Vector lam = Vector::Constant(m, 1.0 / static_cast<double>(m));
  if (!(hnorm > 0.0)) return lam;  // all vertices are the origin
  const double step = 1.0 / hnorm;

  auto accept = [&](const Vector& l) { return gap_of(l, h * l - c) <= scale; };
  auto support_of = [&](const Vector& l) {
    std::vector<Eigen::Index> s;
    for (Eigen::Index j = 0; j < m; ++j)
      if (l[j] > 0.0) s.push_back(j);
    return s;
  };

  Vector prev = lam;
  double t = 1.0;
  double f_lam = value(lam);
  int next_polish = 10;
  for (int it = 0; it < opt.max_iter; ++it) {
    const Vector grad = h * lam - c;
    if (const double gap = gap_of(lam, grad); gap <= scale) {
      // the gap only bounds the squared error; finish exactly on the support
      if (!opt.polish) return lam;
      auto exact = simplex_face_polish(h, c, support_of(lam), [&](const Vector& l) {
        return gap_of(l, h * l - c) <= gap;
      });
      return exact ? *exact : lam;
    }
    if (opt.polish && it == next_polish) {
      next_polish *= 2;
      if (auto polished = simplex_face_polish(h, c, support_of(lam), accept)) return *polished;
    }

    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const Vector y = lam + ((t - 1.0) / t_next) * (lam - prev);
    Vector cand = simplex_project(y - step * (h * y - c)).lambda;
    double f_cand = value(cand);
    if (f_cand > f_lam) {
      // restart from a plain projected-gradient step
      cand = simplex_project(lam - step * grad).lambda;
      f_cand = value(cand);
      t = 1.0;
    } else {
      t = t_next;
    }
    prev = lam;
    lam = std::move(cand);
    f_lam = f_cand;
  }
  const Vector grad = h * lam - c;
  if (gap_of(lam, grad) <= scale) return lam;
  std::vector<Eigen::Index> all(static_cast<std::size_t>(m));
  std::iota(all.begin(), all.end(), Eigen::Index{0});
  if (opt.polish)
    if (auto polished = simplex_face_polish(h, c, all, accept)) return *polished;
  throw ConvergenceError("project_hull: simplex QP iteration cap reached", g.transpose() * lam);
}

}  // namespace detail

/// Projection of w onto conv{g_1, ..., g_m} (rows of G), solved in lambda-space.
///
/// m = 1 returns the single row, m = 2 a clipped 1-D least squares, and
/// m >= 3 an accelerated projected-gradient loop over Delta_m, periodically
/// polished by solving the KKT system on the current support. Only `point`
/// is unique; `weights` is the witness produced by this deterministic path.
inline HullProjection project_hull(const Matrix& g, const Vector& w, const HullQpOptions& opt = {}) {
  if (g.rows() < 1) throw DimensionError("project_hull: G has no rows");
  detail::require_dim(w.size(), g.cols(), "project_hull w");
  detail::require_finite(g, "project_hull G");
  detail::require_finite(w, "project_hull w");

  if (g.rows() == 1) return detail::finish_projection(g, w, Vector::Ones(1));

  if (g.rows() == 2) {
    const Vector d = (g.row(1) - g.row(0)).transpose();
    const double dd = d.squaredNorm();
    double t = 0.0;
    if (dd > 0.0) t = std::clamp((w - g.row(0).transpose()).dot(d) / dd, 0.0, 1.0);
    Vector lam(2);
    lam << 1.0 - t, t;
    return detail::finish_projection(g, w, std::move(lam));
  }

  return detail::finish_projection(g, w, detail::simplex_qp_apg(g, w, opt));
}

/// Minimum-norm element of conv{rows of G}.
inline HullProjection min_norm_element(const Matrix& g, const HullQpOptions& opt = {}) {
  return project_hull(g, Vector::Zero(g.cols()), opt);
}

}  // namespace ampd
