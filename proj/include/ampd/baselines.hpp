#pragma once

#include <cmath>
#include <concepts>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "ampd/diagnostics.hpp"
#include "ampd/error.hpp"
#include "ampd/problem.hpp"
#include "ampd/simplex_qp.hpp"

namespace ampd {

// Comparison solvers: multiobjective steepest descent with a multiobjective
// Armijo rule, and an augmented-Lagrangian outer loop in the style of ALAMO
// (Ax = b split into Ax - b <= 0 and b - Ax <= 0, PHR penalty, safeguarded
// first-order multiplier update). The outer schedule is a standard variant,
// not a transcription of any particular reference implementation.

/// Anything exposing m objective values and their m x n Jacobian.
template <class V>
concept MultiObjectiveView = requires(const V& view, const Vector& x) {
  { view.values(x) } -> std::convertible_to<Vector>;
  { view.jacobian(x) } -> std::convertible_to<Matrix>;
};

/// The problem's objectives with the constraint dropped.
struct UnconstrainedView {
  const Problem& problem;
  Vector values(const Vector& x) const { return eval_objectives(problem, x); }
  Matrix jacobian(const Vector& x) const { return eval_jacobian(problem, x); }
};

/// f_j(x) + tau/2 sum_i max(0, g_i(x) + mult_i / tau)^2 with g = (Ax - b, b - Ax).
struct AugmentedLagrangianView {
  const Problem& problem;
  Vector mult;  ///< 2r multipliers
  double tau = 1.0;

  Vector constraints(const Vector& x) const {
    const Vector res = problem.constraint().residual(x);
    Vector g(2 * res.size());
    g << res, -res;
    return g;
  }
  Vector shifted(const Vector& x) const { return (tau * constraints(x) + mult).cwiseMax(0.0); }
  Vector values(const Vector& x) const {
    const double pen = shifted(x).squaredNorm() / (2.0 * tau);
    return eval_objectives(problem, x).array() + pen;
  }
  Matrix jacobian(const Vector& x) const {
    const Vector s = shifted(x);
    const Eigen::Index r = problem.r();
    const Vector grad_pen = problem.constraint().matrix().transpose() * (s.head(r) - s.tail(r));
    Matrix jac = eval_jacobian(problem, x);
    jac.rowwise() += grad_pen.transpose();
    return jac;
  }
};

struct ArmijoParams {
  double c = 1e-4;
  double shrink = 0.5;
  double t0 = 1.0;
  int max_backtracks = 60;

  void validate() const {
    if (!(c > 0.0 && c < 1.0 && shrink > 0.0 && shrink < 1.0 && t0 > 0.0 && max_backtracks >= 0))
      throw PreconditionError("ArmijoParams: need 0 < c < 1, 0 < shrink < 1, t0 > 0");
  }
};

struct MsdDirection {
  Vector d;            ///< minus the min-norm element of C(x)
  double theta_val;    ///< -||d||^2
  SimplexWeights weights;
};

/// Steepest common descent direction d = -argmin_{p in C(x)} ||p||.
/// d = 0 exactly at Pareto-critical points of the unconstrained view.
template <MultiObjectiveView View>
MsdDirection msd_direction(const View& view, const Vector& x) {
  const Matrix jac = view.jacobian(x);
  detail::require_finite(jac, "msd_direction gradients");
  HullProjection mn = min_norm_element(jac);
  MsdDirection out;
  out.d = -mn.point;
  out.theta_val = -out.d.squaredNorm();
  out.weights = std::move(mn.weights);
  return out;
}

/// Largest t = t0 shrink^i with f_j(x + t d) <= f_j(x) + c t <grad f_j(x), d> for all j.
template <MultiObjectiveView View>
double armijo_step(const View& view, const Vector& x, const Vector& d, const ArmijoParams& params,
                   int* backtracks = nullptr) {
  params.validate();
  const Vector slopes = view.jacobian(x) * d;
  if (!(slopes.maxCoeff() < 0.0)) throw PreconditionError("armijo_step: d is not a common descent direction");
  const Vector f0 = view.values(x);
  double t = params.t0;
  for (int i = 0; i <= params.max_backtracks; ++i) {
    const Vector ft = view.values(Vector(x + t * d));
    if (((ft - f0 - params.c * t * slopes).array() <= 0.0).all()) {
      if (backtracks != nullptr) *backtracks = i;
      return t;
    }
    t *= params.shrink;
  }
  throw ConvergenceError("armijo_step: max_backtracks exceeded", x);
}

struct MsdResult {
  Vector x;
  long iterations = 0;
  bool converged = false;
};

/// Steepest descent with Armijo steps until ||d|| <= tol or max_iter steps.
template <MultiObjectiveView View>
MsdResult msd_solve(const View& view, Vector x, double tol, long max_iter, const ArmijoParams& armijo = {}) {
  MsdResult out;
  for (out.iterations = 0; out.iterations < max_iter; ++out.iterations) {
    const MsdDirection dir = msd_direction(view, x);
    if (dir.d.norm() <= tol) {
      out.converged = true;
      break;
    }
    const double t = armijo_step(view, x, dir.d, armijo);
    x += t * dir.d;
  }
  if (!out.converged) out.converged = msd_direction(view, x).d.norm() <= tol;
  out.x = std::move(x);
  return out;
}

struct AlamoParams {
  double tau0 = 1.0;
  double growth = 2.0;
  Vector mult0;            ///< 2r entries; empty means all ones
  double sigma = 0.9;
  double inner_tol = 1e-4;
  long inner_max = 8000;
  double tol = 1e-3;       ///< outer KKT tolerance
  long outer_max = 100;
  double mult_max = 1e8;   ///< safeguard box for the multipliers
  ArmijoParams armijo;

  void validate() const {
    if (!(tau0 > 0.0 && growth > 1.0 && sigma > 0.0 && sigma < 1.0 && inner_tol > 0.0 && inner_max >= 1 &&
          tol > 0.0 && outer_max >= 1 && mult_max > 0.0))
      throw PreconditionError("AlamoParams: invalid parameters");
    armijo.validate();
  }
};

struct AlamoOuterRecord {
  long outer = 0;
  long inner_iterations = 0;
  double tau = 0.0;
  double feas = 0.0;
  double kkt = 0.0;
};

struct AlamoResult {
  Vector x;
  Vector xi;  ///< equality multiplier mult_+ - mult_-
  std::vector<AlamoOuterRecord> outer_trace;
  long total_inner = 0;
  bool converged = false;
};

class AlamoError : public Error {
 public:
  AlamoError(const std::string& msg, std::vector<AlamoOuterRecord> partial)
      : Error(msg), partial_(std::move(partial)) {}
  const std::vector<AlamoOuterRecord>& partial_trace() const noexcept { return partial_; }

 private:
  std::vector<AlamoOuterRecord> partial_;
};

/// Augmented-Lagrangian outer loop with steepest-descent inner solves.
/// Stops when KKT(x, mult_+ - mult_-) <= tol or after outer_max rounds.
inline AlamoResult alamo_solve(const Problem& p, const Vector& x0, const AlamoParams& params) {
  params.validate();
  detail::require_dim(x0.size(), p.n(), "alamo_solve x0");
  const Eigen::Index r = p.r();

  AugmentedLagrangianView view{p, params.mult0.size() == 0 ? Vector::Ones(2 * r) : params.mult0, params.tau0};
  detail::require_dim(view.mult.size(), 2 * r, "AlamoParams mult0");

  AlamoResult res;
  res.x = x0;
  double prev_violation = std::numeric_limits<double>::infinity();
  for (long outer = 1; outer <= params.outer_max; ++outer) {
    MsdResult inner;
    try {
      inner = msd_solve(view, res.x, params.inner_tol, params.inner_max, params.armijo);
    } catch (const Error& e) {
      throw AlamoError(std::string("alamo_solve: inner solver stalled: ") + e.what(), std::move(res.outer_trace));
    }
    res.total_inner += inner.iterations;
    res.x = std::move(inner.x);

    const Vector g = view.constraints(res.x);
    const double violation =
        g.size() == 0 ? 0.0 : g.cwiseMax(Vector(-view.mult / view.tau)).cwiseAbs().maxCoeff();
    view.mult = (view.mult + view.tau * g).cwiseMax(0.0).cwiseMin(params.mult_max);
    res.xi = view.mult.head(r) - view.mult.tail(r);

    AlamoOuterRecord rec;
    rec.outer = outer;
    rec.inner_iterations = inner.iterations;
    rec.tau = view.tau;
    rec.feas = feasibility(p, res.x);
    rec.kkt = kkt_residual(p, res.x, res.xi);
    res.outer_trace.push_back(rec);
    if (rec.kkt <= params.tol) {
      res.converged = true;
      break;
    }
    if (violation > params.sigma * prev_violation) view.tau *= params.growth;
    prev_violation = violation;
  }
  return res;
}

}  // namespace ampd
