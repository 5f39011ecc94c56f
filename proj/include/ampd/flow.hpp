#pragma once

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "ampd/diagnostics.hpp"
#include "ampd/error.hpp"
#include "ampd/problem.hpp"
#include "ampd/simplex_qp.hpp"

namespace ampd {

// Forward-Euler reference integrator for the first-order inclusion
//
//   theta xi' = A v - b
//   x'        = v - x
//   gamma v'  in mu (x - v) - A^T xi - argmin_{z in C(x)} <x - v, z>
//
// with theta(t) = theta0 e^{-t}, gamma(t) = mu + (gamma0 - mu) e^{-t} taken in
// closed form. Time rescalings of this flow are not implemented.

struct FlowState {
  Vector x, v, xi;
  double theta = 1.0;
  double gamma = 1.0;
  double t = 0.0;
};

enum class SelectionRule {
  /// vertex g_j minimizing <x - v, g_j>, smallest j on ties
  lowest_index,
  /// point of the minimizing face closest to mu (x - v) - A^T xi, i.e. the
  /// minimal-norm right-hand side for gamma v'
  projection_consistent,
};

struct FlowConfig {
  double h = 1e-3;
  double T = 20.0;
  SelectionRule selection = SelectionRule::lowest_index;
  /// Damping parameter of the second-order form. It drops out of the
  /// inclusion and is only checked against beta + gamma(t) + mu > 0.
  double beta = 0.0;
  double theta0 = 1.0;
  double gamma0 = 1.0;

  void validate(double mu) const {
    if (!(h >= 0.0) || !(T > 0.0)) throw PreconditionError("FlowConfig: need h >= 0, T > 0");
    if (!(theta0 > 0.0 && gamma0 > 0.0)) throw PreconditionError("FlowConfig: theta0, gamma0 must be > 0");
    // gamma(t) is monotone between gamma0 and mu, so its minimum on [0, T] is at an end
    const double g_min = std::min(gamma0, mu + (gamma0 - mu) * std::exp(-T));
    if (!(beta + g_min + mu > 0.0))
      throw PreconditionError("FlowConfig: beta + gamma + mu > 0 violated");
  }
};

inline double flow_theta(double theta0, double t) { return theta0 * std::exp(-t); }
inline double flow_gamma(double gamma0, double mu, double t) { return mu + (gamma0 - mu) * std::exp(-t); }

struct VertexSelection {
  Eigen::Index index = 0;  ///< 0-based; for projection_consistent the lowest tied index
  Vector point;
};

/// Element of conv{rows of G} minimizing <d, z>.
///
/// lowest_index returns the first minimizing vertex. projection_consistent
/// projects `target` onto the hull of all tied vertices (ties within
/// 1e-12 relative).
inline VertexSelection vertex_select(const Matrix& g, const Vector& d, SelectionRule rule,
                                     const Vector* target = nullptr) {
  if (g.rows() < 1) throw DimensionError("vertex_select: G has no rows");
  detail::require_dim(d.size(), g.cols(), "vertex_select d");
  const Vector scores = g * d;
  Eigen::Index best = 0;
  for (Eigen::Index j = 1; j < scores.size(); ++j)
    if (scores[j] < scores[best]) best = j;
  if (rule == SelectionRule::lowest_index || target == nullptr) return {best, g.row(best).transpose()};

  const double tie = 1e-12 * (1.0 + std::abs(scores[best]));
  std::vector<Eigen::Index> tied;
  for (Eigen::Index j = 0; j < scores.size(); ++j)
    if (scores[j] <= scores[best] + tie) tied.push_back(j);
  if (tied.size() == 1) return {best, g.row(best).transpose()};
  Matrix face(static_cast<Eigen::Index>(tied.size()), g.cols());
  for (std::size_t i = 0; i < tied.size(); ++i) face.row(static_cast<Eigen::Index>(i)) = g.row(tied[i]);
  return {tied.front(), project_hull(face, *target).point};
}

/// One explicit Euler step of size config.h; theta and gamma are refreshed
/// from their closed forms at the new time.
inline FlowState euler_step(const Problem& p, const FlowState& s, const FlowConfig& cfg) {
  detail::require_dim(s.x.size(), p.n(), "euler_step x");
  detail::require_dim(s.v.size(), p.n(), "euler_step v");
  detail::require_dim(s.xi.size(), p.r(), "euler_step xi");
  if (cfg.h == 0.0) return s;

  const Matrix& a = p.constraint().matrix();
  const Vector& b = p.constraint().rhs();
  const double mu = p.mu();
  const double h = cfg.h;

  const Vector d = s.x - s.v;
  const Vector drift_v = mu * (s.x - s.v) - a.transpose() * s.xi;
  const VertexSelection z = vertex_select(eval_jacobian(p, s.x), d, cfg.selection, &drift_v);

  FlowState next;
  next.xi = s.xi + (h / s.theta) * (a * s.v - b);
  next.x = s.x + h * (s.v - s.x);
  next.v = s.v + (h / s.gamma) * (drift_v - z.point);
  next.t = s.t + h;
  next.theta = flow_theta(cfg.theta0, next.t);
  next.gamma = flow_gamma(cfg.gamma0, mu, next.t);
  detail::require_finite(next.x, "euler_step: x");
  detail::require_finite(next.v, "euler_step: v");
  detail::require_finite(next.xi, "euler_step: xi");
  return next;
}

inline FlowState initial_flow_state(const Problem& p, Vector x0, Vector v0, Vector xi0, const FlowConfig& cfg) {
  return FlowState{std::move(x0), std::move(v0), std::move(xi0), cfg.theta0, flow_gamma(cfg.gamma0, p.mu(), 0.0),
                   0.0};
}

struct FlowSample {
  double t = 0.0;
  FlowState state;
  double lyapunov = 0.0;
  double feas = 0.0;
};

/// Integrates to T, recording a sample every ceil(0.1 / h) steps plus the
/// initial state. The anchor x_hat must satisfy A x_hat = b (to 1e-10).
inline std::vector<FlowSample> integrate(const Problem& p, const FlowState& init, const FlowConfig& cfg,
                                         const Vector& anchor_x, const Vector& anchor_xi) {
  cfg.validate(p.mu());
  if (!(cfg.h > 0.0)) throw PreconditionError("integrate: h must be > 0");
  auto sample = [&](const FlowState& s) {
    FlowSample out{s.t, s, lyapunov(p, s.x, s.v, s.xi, s.theta, s.gamma, anchor_x, anchor_xi), feasibility(p, s.x)};
    detail::require_finite(out.lyapunov, "integrate: lyapunov");
    detail::require_finite(out.feas, "integrate: feasibility");
    return out;
  };
  std::vector<FlowSample> out;
  out.push_back(sample(init));

  const long steps = static_cast<long>(std::floor(cfg.T / cfg.h + 1e-9));
  const long every = std::max(1L, static_cast<long>(std::ceil(0.1 / cfg.h - 1e-9)));
  FlowState s = init;
  for (long i = 1; i <= steps; ++i) {
    s = euler_step(p, s, cfg);
    s.t = static_cast<double>(i) * cfg.h;  // avoid accumulating h
    s.theta = flow_theta(cfg.theta0, s.t);
    s.gamma = flow_gamma(cfg.gamma0, p.mu(), s.t);
    if (i % every == 0) out.push_back(sample(s));
  }
  return out;
}

/// e^{t} E(t) along a trajectory; nonincreasing for the exact flow.
inline std::vector<double> scaled_lyapunov(const std::vector<FlowSample>& traj) {
  std::vector<double> out;
  out.reserve(traj.size());
  for (const auto& s : traj) out.push_back(std::exp(s.t) * s.lyapunov);
  return out;
}

/// Largest increase of e^{t} E(t) over any window of one time unit,
/// relative to max_t |e^{t} E(t)|. Zero when the decay law holds exactly.
inline double lyapunov_growth_per_unit_time(const std::vector<FlowSample>& traj) {
  const std::vector<double> w = scaled_lyapunov(traj);
  double scale = 0.0;
  for (double v : w) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i)
    for (std::size_t j = i + 1; j < traj.size() && traj[j].t <= traj[i].t + 1.0 + 1e-9; ++j)
      worst = std::max(worst, w[j] - w[i]);
  return worst / scale;
}

}  // namespace ampd
