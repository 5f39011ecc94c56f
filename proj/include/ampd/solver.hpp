#pragma once

#include <chrono>
#include <cmath>
#include <limits>
#include <tuple>
#include <string>
#include <utility>

#include "ampd/diagnostics.hpp"
#include "ampd/error.hpp"
#include "ampd/problem.hpp"
#include "ampd/simplex_qp.hpp"
#include "ampd/trace.hpp"

namespace ampd {

/// Iterate (x_k, v_k, xi_k, theta_k, gamma_k) of AMPD-QP.
struct SolverState {
  Vector x;
  Vector v;
  Vector xi;
  double theta = 1.0;
  double gamma = 1.0;
  long k = 0;
};

enum class StepRule {
  /// alpha^2 (L theta + ||A||^2) = gamma theta
  equality,
  /// largest alpha with alpha^2 (L theta / (1 + alpha) + ||A||^2) <= gamma theta
  inequality_backtracked,
};

struct SolverConfig {
  double theta0 = 1.0;
  double gamma0 = 1.0;
  double tol = 1e-3;       ///< stop once KKT(x_k, xi_k) <= tol
  long max_iter = 100000;
  StepRule step_rule = StepRule::equality;
  long gap_every = 10;     ///< objective-gap refresh period in the trace
  bool record_trace = true;

  void validate() const {
    if (!(theta0 > 0.0 && gamma0 > 0.0)) throw PreconditionError("SolverConfig: theta0, gamma0 must be > 0");
    if (!(tol > 0.0)) throw PreconditionError("SolverConfig: tol must be > 0");
    if (max_iter < 0) throw PreconditionError("SolverConfig: max_iter must be >= 0");
    if (gap_every < 1) throw PreconditionError("SolverConfig: gap_every must be >= 1");
  }
};

/// Everything produced by one advance() call.
struct StepOutcome {
  SolverState state;
  double alpha = 0.0;
  SimplexWeights weights;  ///< lambda of the hull QP at y_k
  Vector y;                ///< y_k
  Vector xi_hat;           ///< predicted multiplier
  Vector v_qp;             ///< projection returned by the QP
};

struct SolveResult {
  SolverState state;
  Trace trace;
  bool converged = false;
  double final_kkt = 0.0;
  double final_feas = 0.0;
};

/// Raised when a step fails mid-solve; keeps the trace recorded so far.
class SolveError : public Error {
 public:
  SolveError(const std::string& msg, Trace partial) : Error(msg), partial_(std::move(partial)) {}
  const Trace& partial_trace() const noexcept { return partial_; }

 private:
  Trace partial_;
};

/// alpha = sqrt(gamma theta) / sqrt(L theta + ||A||^2).
inline double step_size(double theta, double gamma, double lip, double norm_a) {
  if (!(theta > 0.0 && gamma > 0.0 && lip >= 0.0 && norm_a >= 0.0))
    throw PreconditionError("step_size: invalid arguments");
  const double den = lip * theta + norm_a * norm_a;
  if (!(den > 0.0)) throw PreconditionError("step_size: L theta + ||A||^2 = 0");
  return std::sqrt(gamma * theta) / std::sqrt(den);
}

/// True when alpha satisfies alpha^2 (L theta / (1 + alpha) + ||A||^2) <= gamma theta
/// up to a relative roundoff allowance.
inline bool step_admissible(double alpha, double theta, double gamma, double lip, double norm_a) {
  const double lhs = alpha * alpha * (lip * theta / (1.0 + alpha) + norm_a * norm_a);
  return lhs <= gamma * theta * (1.0 + 1e-12);
}

/// Largest alpha meeting the inequality constraint, by bisection. The
/// left-hand side is increasing in alpha, so the root is unique.
inline double step_size_inequality(double theta, double gamma, double lip, double norm_a) {
  double lo = step_size(theta, gamma, lip, norm_a);  // always admissible
  auto excess = [&](double a) { return a * a * (lip * theta / (1.0 + a) + norm_a * norm_a) - gamma * theta; };
  double hi = 2.0 * lo;
  while (excess(hi) <= 0.0) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) <= 0.0 ? lo : hi) = mid;
  }
  return lo;
}

inline double choose_step(StepRule rule, double theta, double gamma, double lip, double norm_a) {
  return rule == StepRule::equality ? step_size(theta, gamma, lip, norm_a)
                                    : step_size_inequality(theta, gamma, lip, norm_a);
}

/// Implicit parameter recursion: theta' = theta/(1+alpha), gamma' = (gamma + mu alpha)/(1+alpha).
inline std::pair<double, double> update_params(double theta, double gamma, double mu, double alpha) {
  if (!(theta > 0.0 && gamma > 0.0 && alpha > 0.0 && mu >= 0.0))
    throw PreconditionError("update_params: invalid arguments");
  return {theta / (1.0 + alpha), (gamma + mu * alpha) / (1.0 + alpha)};
}

/// One AMPD-QP step with step size alpha.
///
///   y      = (x + alpha v) / (1 + alpha)
///   xi_hat = xi + alpha/theta (A v - b)
///   v_qp   = proj_{C(y)}(gamma/alpha (v - x) + mu (y - x) - A^T xi_hat)
///   v'     = (gamma v + mu alpha y - alpha A^T xi_hat - alpha v_qp) / (gamma + mu alpha)
///   xi'    = xi + alpha/theta (A v' - b)
///   x'     = (x + alpha v') / (1 + alpha)
inline StepOutcome advance(const Problem& p, const SolverState& s, double alpha, const HullQpOptions& qp = {}) {
  detail::require_dim(s.x.size(), p.n(), "advance x");
  detail::require_dim(s.v.size(), p.n(), "advance v");
  detail::require_dim(s.xi.size(), p.r(), "advance xi");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw PreconditionError("advance: alpha must be positive");

  const Matrix& a = p.constraint().matrix();
  const Vector& b = p.constraint().rhs();
  const double mu = p.mu();
  const double theta = s.theta;
  const double gamma = s.gamma;

  StepOutcome out;
  out.alpha = alpha;
  out.y = (s.x + alpha * s.v) / (1.0 + alpha);
  out.xi_hat = s.xi + (alpha / theta) * (a * s.v - b);
  const Vector at_xi_hat = a.transpose() * out.xi_hat;
  detail::require_finite(out.y, "advance: prediction y");
  detail::require_finite(out.xi_hat, "advance: prediction xi_hat");

  const Vector target = (gamma / alpha) * (s.v - s.x) + mu * (out.y - s.x) - at_xi_hat;
  HullProjection proj = project_hull(eval_jacobian(p, out.y), target, qp);
  out.v_qp = std::move(proj.point);
  out.weights = std::move(proj.weights);

  SolverState& next = out.state;
  next.v = (gamma * s.v + mu * alpha * out.y - alpha * at_xi_hat - alpha * out.v_qp) / (gamma + mu * alpha);
  next.xi = s.xi + (alpha / theta) * (a * next.v - b);
  next.x = (s.x + alpha * next.v) / (1.0 + alpha);
  std::tie(next.theta, next.gamma) = update_params(theta, gamma, mu, alpha);
  next.k = s.k + 1;

  detail::require_finite(next.v, "advance: v");
  detail::require_finite(next.xi, "advance: xi");
  detail::require_finite(next.x, "advance: x");
  return out;
}

inline SolverState initial_state(const Vector& x0, const Vector& v0, const Vector& xi0, const SolverConfig& cfg) {
  return SolverState{x0, v0, xi0, cfg.theta0, cfg.gamma0, 0};
}

/// Runs AMPD-QP until KKT(x_k, xi_k) <= tol or k = max_iter.
///
/// The trace has one record per visited iterate (k = 0 included). When
/// `refs` is given, the objective-gap estimate is recomputed every
/// `gap_every` iterations and carried forward (flagged stale) in between.
/// Nonconvex problems run unchanged, but no convergence guarantee applies.
inline SolveResult solve(const Problem& p, const Vector& x0, const Vector& v0, const Vector& xi0,
                         const SolverConfig& cfg, const ParetoReference* refs = nullptr) {
  cfg.validate();
  detail::require_dim(x0.size(), p.n(), "solve x0");
  detail::require_dim(v0.size(), p.n(), "solve v0");
  detail::require_dim(xi0.size(), p.r(), "solve xi0");

  using clock = std::chrono::steady_clock;
  const auto t_start = clock::now();
  const double norm_a = p.constraint().norm();

  SolveResult res;
  SolverState st = initial_state(x0, v0, xi0, cfg);
  double gap = std::numeric_limits<double>::quiet_NaN();

  while (true) {
    double alpha = 0.0, kkt = 0.0, feas = 0.0;
    try {
      kkt = kkt_residual(p, st.x, st.xi);
      feas = feasibility(p, st.x);
      alpha = choose_step(cfg.step_rule, st.theta, st.gamma, p.lip(), norm_a);
    } catch (const Error& e) {
      throw SolveError(std::string("solve: iteration ") + std::to_string(st.k) + ": " + e.what(),
                       std::move(res.trace));
    }

    if (cfg.record_trace) {
      TraceRecord rec;
      rec.k = st.k;
      rec.alpha = alpha;
      rec.theta = st.theta;
      rec.gamma = st.gamma;
      rec.feas = feas;
      rec.kkt = kkt;
      rec.gap_stale = false;
      if (refs != nullptr) {
        if (st.k % cfg.gap_every == 0) {
          gap = objective_gap(p, st.x, *refs).value;
        } else {
          rec.gap_stale = true;
        }
      }
      rec.gap_est = gap;
      rec.f_values = eval_objectives(p, st.x);
      rec.wall_time = std::chrono::duration<double>(clock::now() - t_start).count();
      res.trace.push_back(std::move(rec));
    }

    res.final_kkt = kkt;
    res.final_feas = feas;
    if (kkt <= cfg.tol) {
      res.converged = true;
      break;
    }
    if (st.k >= cfg.max_iter) break;

    try {
      st = advance(p, st, alpha).state;
    } catch (const Error& e) {
      throw SolveError(std::string("solve: iteration ") + std::to_string(st.k) + ": " + e.what(),
                       std::move(res.trace));
    }
  }
  res.state = std::move(st);
  return res;
}

/// solve() with the default initialization v0 = x0, xi0 = 0.
inline SolveResult solve(const Problem& p, const Vector& x0, const SolverConfig& cfg,
                         const ParetoReference* refs = nullptr) {
  return solve(p, x0, x0, Vector::Zero(p.r()), cfg, refs);
}

}  // namespace ampd
