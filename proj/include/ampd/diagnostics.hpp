#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ampd/error.hpp"
#include "ampd/linalg.hpp"
#include "ampd/problem.hpp"
#include "ampd/simplex_qp.hpp"
#include "ampd/trace.hpp"

namespace ampd {

/// ||A x - b||.
inline double feasibility(const Problem& p, const Vector& x) {
  detail::require_dim(x.size(), p.n(), "feasibility x");
  if (p.r() == 0) return 0.0;
  return p.constraint().residual(x).norm();
}

/// sqrt(||Ax - b||^2 + ||A^T xi + proj_{C(x)}(-A^T xi)||^2).
inline double kkt_residual(const Problem& p, const Vector& x, const Vector& xi) {
  detail::require_dim(xi.size(), p.r(), "kkt_residual xi");
  const double feas = feasibility(p, x);
  const Vector at_xi = p.constraint().matrix().transpose() * xi;
  const HullProjection proj = project_hull(eval_jacobian(p, x), Vector(-at_xi));
  return std::sqrt(feas * feas + (at_xi + proj.point).squaredNorm());
}

/// Finite stand-in for the feasible set in the objective-gap sup.
struct ParetoReference {
  enum class Source { analytic, sampled, solver_generated };

  std::vector<Vector> points;
  std::vector<Vector> values;
  Source source = Source::sampled;

  /// Builds values from the problem and checks ||A z - b|| <= feas_tol.
  static ParetoReference from_points(const Problem& p, std::vector<Vector> pts, Source src,
                                     double feas_tol = 1e-8) {
    ParetoReference ref;
    ref.source = src;
    for (auto& z : pts) {
      if (feasibility(p, z) > feas_tol * (1.0 + p.constraint().rhs().norm()))
        throw PreconditionError("ParetoReference: reference point is not feasible");
      ref.values.push_back(eval_objectives(p, z));
      ref.points.push_back(std::move(z));
    }
    return ref;
  }
};

inline const char* to_string(ParetoReference::Source s) {
  switch (s) {
    case ParetoReference::Source::analytic: return "analytic";
    case ParetoReference::Source::sampled: return "sampled";
    case ParetoReference::Source::solver_generated: return "solver-generated";
  }
  return "?";
}

struct GapEstimate {
  double value = 0.0;
  double lower_bound = -std::numeric_limits<double>::infinity();
  std::size_t n_refs = 0;
};

/// max over reference points z of min_j [f_j(x) - f_j(z)].
///
/// The sup over the whole feasible set is replaced by a finite set, so this
/// under-estimates U(x). `lower_bound` is left at -inf; see gap_lower_bound.
inline GapEstimate objective_gap(const Problem& p, const Vector& x, const ParetoReference& refs) {
  if (refs.values.empty()) throw PreconditionError("objective_gap: empty reference set");
  const Vector fx = eval_objectives(p, x);
  GapEstimate out;
  out.value = -std::numeric_limits<double>::infinity();
  for (const auto& fz : refs.values) out.value = std::max(out.value, (fx - fz).minCoeff());
  out.n_refs = refs.values.size();
  return out;
}

/// U(x) >= -E1 ||Ax - b|| / sigma_min^+(A) for x in a ball of radius
/// `region_diam`, where E2 = (1 + ||A||/sigma) diam + ||b||/sigma and
/// E1 = E2 max_j L_j + max_j ||grad f_j(0)||.
inline double gap_lower_bound(const Problem& p, const Vector& x, double region_diam) {
  if (!(region_diam >= 0.0)) throw PreconditionError("gap_lower_bound: region_diam must be >= 0");
  const LinearConstraint& c = p.constraint();
  const double sigma = c.sigma_min_plus();
  const double e2 = (1.0 + c.norm() / sigma) * region_diam + c.rhs().norm() / sigma;
  const Matrix g0 = eval_jacobian(p, Vector::Zero(p.n()));
  const double e1 = e2 * p.lip() + g0.rowwise().norm().maxCoeff();
  return -e1 * feasibility(p, x) / sigma;
}

/// Q_j(x, zeta) = f_j(x) + <zeta, A x - b>.
inline double lagrangian(const Problem& p, std::size_t j, const Vector& x, const Vector& zeta) {
  double out = p.objectives()[j].eval(x);
  if (p.r() > 0) out += zeta.dot(p.constraint().residual(x));
  return out;
}

/// E = min_j [Q_j(x, xi_hat) - Q_j(x_hat, xi)] + gamma/2 ||v - x_hat||^2 + theta/2 ||xi - xi_hat||^2.
///
/// The anchor x_hat must be feasible (to 1e-10, scaled by 1 + ||b||). E can be
/// negative for anchors that are not Pareto points.
inline double lyapunov(const Problem& p, const Vector& x, const Vector& v, const Vector& xi, double theta,
                       double gamma, const Vector& anchor_x, const Vector& anchor_xi) {
  detail::require_dim(x.size(), p.n(), "lyapunov x");
  detail::require_dim(v.size(), p.n(), "lyapunov v");
  detail::require_dim(xi.size(), p.r(), "lyapunov xi");
  detail::require_dim(anchor_x.size(), p.n(), "lyapunov anchor_x");
  detail::require_dim(anchor_xi.size(), p.r(), "lyapunov anchor_xi");
  if (feasibility(p, anchor_x) > 1e-10 * (1.0 + p.constraint().rhs().norm()))
    throw PreconditionError("lyapunov: anchor is not feasible");
  double min_pi = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < p.objectives().size(); ++j)
    min_pi = std::min(min_pi, lagrangian(p, j, x, anchor_xi) - lagrangian(p, j, anchor_x, xi));
  return min_pi + 0.5 * gamma * (v - anchor_x).squaredNorm() + 0.5 * theta * (xi - anchor_xi).squaredNorm();
}

/// Initial data entering the continuous-time bounds.
struct InitialData {
  Vector x0, v0, xi0;
  double theta0 = 1.0;
  double gamma0 = 1.0;
};

/// C0(s, t) bounding E(0) for anchors with ||x_hat|| <= s, ||xi_hat|| <= t.
inline double c0_bound(const Problem& p, const InitialData& init, double s, double t) {
  if (!(s >= 0.0 && t >= 0.0)) throw PreconditionError("c0_bound: s, t must be >= 0");
  const double g0 = eval_jacobian(p, Vector::Zero(p.n())).rowwise().norm().maxCoeff();
  const double lip = p.lip();
  const double nx0 = init.x0.norm();
  return (g0 + lip * s) * (nx0 + s) + lip * (nx0 * nx0 + s * s) + t * feasibility(p, init.x0) +
         init.gamma0 * (init.v0.squaredNorm() + s * s) + init.theta0 * (init.xi0.squaredNorm() + t * t);
}

/// C1(s) = (max_j ||grad f_j(0)|| + L ||x0||)(||x0|| + s) + L(||x0||^2 + s^2).
inline double c1_bound(const Problem& p, const Vector& x0, double s) {
  if (!(s >= 0.0)) throw PreconditionError("c1_bound: s must be >= 0");
  const double g0 = eval_jacobian(p, Vector::Zero(p.n())).rowwise().norm().maxCoeff();
  const double nx0 = x0.norm();
  return (g0 + p.lip() * nx0) * (nx0 + s) + p.lip() * (nx0 * nx0 + s * s);
}

/// Upper bound on theta_k / theta_0 under the equality step rule:
/// min of the O(1/k) + O(1/k^2) branch and, when mu > 0, the
/// O(1/k^2) + geometric branch.
inline double theta_bound(long k, double theta0, double gamma0, double mu, double lip, double norm_a) {
  if (k < 1) throw PreconditionError("theta_bound: k must be >= 1");
  if (!(theta0 > 0.0 && gamma0 > 0.0 && mu >= 0.0 && lip >= 0.0 && norm_a >= 0.0))
    throw PreconditionError("theta_bound: invalid parameters");
  if (lip + norm_a * norm_a == 0.0) throw PreconditionError("theta_bound: L = ||A|| = 0");
  const double kd = static_cast<double>(k);
  const double g_min = std::min(mu, gamma0);
  const double g_max = std::max(mu, gamma0);
  const double a_max = std::sqrt(g_max) / std::sqrt(lip + norm_a * norm_a);
  const double beta0 = 2.0 + std::sqrt(a_max);

  const double first =
      2.0 * norm_a / (std::sqrt(gamma0 * theta0) * kd) + 4.0 * lip * beta0 * beta0 / (gamma0 * kd * kd);
  if (g_min <= 0.0) return first;
  double geometric = 0.0;
  if (lip > 0.0) geometric = std::exp(-kd * std::log1p(a_max) / (2.0 * a_max * std::sqrt(lip / g_min)));
  const double second = 4.0 * beta0 * beta0 * norm_a * norm_a / (g_min * theta0 * kd * kd) + geometric;
  return std::min(first, second);
}

/// Least-squares slope of log(value) against log(k).
inline double loglog_slope(std::span<const double> ks, std::span<const double> values) {
  if (ks.size() != values.size() || ks.size() < 2) throw PreconditionError("loglog_slope: need >= 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (!(values[i] > 0.0) || !(ks[i] > 0.0))
      throw PreconditionError("loglog_slope: nonpositive value in window");
    const double lx = std::log(ks[i]);
    const double ly = std::log(values[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double nn = static_cast<double>(ks.size());
  const double den = nn * sxx - sx * sx;
  if (den <= 0.0) throw PreconditionError("loglog_slope: degenerate abscissae");
  return (nn * sxy - sx * sy) / den;
}

enum class RateMetric { feas, gap, kkt };

/// Log-log slope of a trace metric over records with k_lo <= k <= k_hi.
inline double rate_slope(const Trace& trace, RateMetric metric, long k_lo, long k_hi) {
  if (!(k_lo < k_hi)) throw PreconditionError("rate_slope: need k_lo < k_hi");
  if (k_hi > static_cast<long>(trace.size())) throw PreconditionError("rate_slope: k_hi beyond trace length");
  std::vector<double> ks, vals;
  for (const auto& rec : trace) {
    if (rec.k < k_lo || rec.k > k_hi) continue;
    ks.push_back(static_cast<double>(rec.k));
    switch (metric) {
      case RateMetric::feas: vals.push_back(rec.feas); break;
      case RateMetric::gap: vals.push_back(rec.gap_est); break;
      case RateMetric::kkt: vals.push_back(rec.kkt); break;
    }
  }
  return loglog_slope(ks, vals);
}

/// Pareto-critical pair of a quadratic problem for fixed weights lambda:
/// solves [sum_j l_j Q_j, A^T; A, 0] [x; xi] = [-sum_j l_j c_j; b].
struct KktPair {
  Vector x;
  Vector xi;
};

inline KktPair quadratic_kkt_pair(const Problem& p, const Vector& lambda) {
  if (!p.quadratic()) throw PreconditionError("quadratic_kkt_pair: problem is not quadratic");
  detail::require_dim(lambda.size(), p.m(), "quadratic_kkt_pair lambda");
  const QuadraticModel& qm = *p.quadratic();
  const Eigen::Index n = p.n(), r = p.r();
  Matrix h = Matrix::Zero(n, n);
  Vector c = Vector::Zero(n);
  for (Eigen::Index j = 0; j < p.m(); ++j) {
    h += lambda[j] * qm.q[static_cast<std::size_t>(j)];
    c += lambda[j] * qm.c[static_cast<std::size_t>(j)];
  }
  Matrix kkt = Matrix::Zero(n + r, n + r);
  kkt.topLeftCorner(n, n) = h;
  kkt.topRightCorner(n, r) = p.constraint().matrix().transpose();
  kkt.bottomLeftCorner(r, n) = p.constraint().matrix();
  Vector rhs(n + r);
  rhs << -c, p.constraint().rhs();
  const Vector sol = Eigen::CompleteOrthogonalDecomposition<Matrix>(kkt).solve(rhs);
  return KktPair{sol.head(n), sol.tail(r)};
}

}  // namespace ampd
