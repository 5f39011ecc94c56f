#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "ampd/diagnostics.hpp"
#include "ampd/error.hpp"
#include "ampd/linalg.hpp"
#include "ampd/problem.hpp"
#include "ampd/rng.hpp"
#include "ampd/solver.hpp"

namespace ampd {

/// Problem name not known to the registry.
class UnknownProblemError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// min {x1^2 + x2^2, (x1-5)^2 + (x2-5)^2} s.t. x1 - x2 = 1.
/// Pareto set {(t, t-1) : 1/2 <= t <= 11/2}.
inline Problem make_bk1() {
  QuadraticModel qm;
  qm.q = {2.0 * Matrix::Identity(2, 2), 2.0 * Matrix::Identity(2, 2)};
  qm.c = {Vector::Zero(2), Vector::Constant(2, -10.0)};
  qm.d = {0.0, 50.0};
  Matrix a(1, 2);
  a << 1.0, -1.0;
  Problem p = make_quadratic_problem("bk1", qm, {2.0, 2.0}, {2.0, 2.0}, std::move(a), Vector::Ones(1));
  p.set_sample_region(Vector::Constant(2, -10.0), Vector::Constant(2, 10.0));
  p.set_feasible_point((Vector(2) << 1.0, 0.0).finished());
  p.set_pareto_curve(ParetoCurve{[](double s) {
    const double t = 0.5 + 5.0 * s;
    return Vector((Vector(2) << t, t - 1.0).finished());
  }});
  return p;
}

/// Nonconvex bi-objective test problem
///   f_i(x) = 1/2 (sqrt(1 + <a,x>^2) + sqrt(1 + <b,x>^2) + <c_i,x>) + lambda exp(-<b,x>^2)
/// with a = (1,1), b = (1,-1), c_i = ((-1)^{i+1}, -1), subject to x1 - x2 = 1.
///
/// mu is set to 0 (a surrogate: the objectives are not convex) and L to the
/// term-wise curvature bound ||a||^2/2 + ||b||^2/2 + 2 lambda ||b||^2, using
/// |d^2/ds^2 sqrt(1+s^2)| <= 1 and |d^2/du^2 exp(-u^2)| <= 2.
/// The attached reference point is (1/2, -1/2).
inline Problem make_witting(double lambda = 0.6) {
  if (!(lambda >= 0.0)) throw PreconditionError("make_witting: lambda must be >= 0");
  const Vector a = (Vector(2) << 1.0, 1.0).finished();
  const Vector b = (Vector(2) << 1.0, -1.0).finished();
  const double lip = 0.5 * a.squaredNorm() + 0.5 * b.squaredNorm() + 2.0 * lambda * b.squaredNorm();

  std::vector<Objective> objs;
  for (int i = 1; i <= 2; ++i) {
    const Vector c = (Vector(2) << (i == 1 ? 1.0 : -1.0), -1.0).finished();
    Objective f;
    f.eval = [a, b, c, lambda](const Vector& x) {
      const double s = a.dot(x), u = b.dot(x);
      return 0.5 * (std::sqrt(1.0 + s * s) + std::sqrt(1.0 + u * u) + c.dot(x)) + lambda * std::exp(-u * u);
    };
    f.grad = [a, b, c, lambda](const Vector& x) -> Vector {
      const double s = a.dot(x), u = b.dot(x);
      return 0.5 * (s / std::sqrt(1.0 + s * s) * a + u / std::sqrt(1.0 + u * u) * b + c) -
             2.0 * lambda * u * std::exp(-u * u) * b;
    };
    f.mu = 0.0;
    f.lip = lip;
    f.convex = lambda == 0.0;
    objs.push_back(std::move(f));
  }
  Matrix am(1, 2);
  am << 1.0, -1.0;
  Problem p("witting", std::move(objs), LinearConstraint(std::move(am), Vector::Ones(1)));
  p.set_sample_region(Vector::Constant(2, -10.0), Vector::Constant(2, 10.0));
  p.set_feasible_point((Vector(2) << 0.5, -0.5).finished());
  p.set_pareto_curve(ParetoCurve{[](double) { return Vector((Vector(2) << 0.5, -0.5).finished()); }});
  return p;
}

/// Coefficients of f_i(x) = log sum_j exp(<a_j^(i), x> - b_j^(i)), four terms each.
struct LogSumExpCoefficients {
  std::vector<Matrix> a;  ///< per objective: 4 x n, row j = a_j^(i)
  std::vector<Vector> b;  ///< per objective: 4 entries
};

/// Deterministic stand-in coefficients (seed 0 by default). These are NOT
/// the coefficients of the published experiment, which are defined elsewhere.
/// Term directions are spread around the circle so level sets stay bounded.
inline LogSumExpCoefficients default_logsumexp_coefficients(std::uint64_t seed = 0) {
  Rng rng = Rng(seed).split("logsumexp");
  LogSumExpCoefficients out;
  for (int i = 0; i < 2; ++i) {
    Matrix a(4, 2);
    Vector b(4);
    for (int j = 0; j < 4; ++j) {
      const double phi = j * 1.5707963267948966 + rng.uniform(-0.3, 0.3) + i * 0.7;
      const double rad = rng.uniform(0.5, 1.5);
      a(j, 0) = rad * std::cos(phi);
      a(j, 1) = rad * std::sin(phi);
      b[j] = rng.uniform(-1.0, 1.0);
    }
    out.a.push_back(a);
    out.b.push_back(b);
  }
  return out;
}

/// Log-sum-exp objectives with L_i = ||A^(i)||^2 and mu = 0.
inline Problem make_logsumexp(const LogSumExpCoefficients& coeffs, Matrix a_con, Vector b_con,
                              std::string name = "logsumexp") {
  if (coeffs.a.empty() || coeffs.a.size() != coeffs.b.size())
    throw DimensionError("make_logsumexp: coefficient lists differ in length");
  std::vector<Objective> objs;
  for (std::size_t i = 0; i < coeffs.a.size(); ++i) {
    const Matrix ai = coeffs.a[i];
    const Vector bi = coeffs.b[i];
    if (ai.rows() != 4 || bi.size() != 4) throw DimensionError("make_logsumexp: need 4 terms per objective");
    detail::require_dim(ai.cols(), a_con.cols(), "make_logsumexp a_j dimension");
    Objective f;
    f.eval = [ai, bi](const Vector& x) {
      const Vector z = ai * x - bi;
      const double zmax = z.maxCoeff();
      return zmax + std::log((z.array() - zmax).exp().sum());
    };
    f.grad = [ai, bi](const Vector& x) -> Vector {
      const Vector z = ai * x - bi;
      const Vector w = (z.array() - z.maxCoeff()).exp().matrix();
      return ai.transpose() * (w / w.sum());
    };
    const double na = operator_norm(ai, 1e-13);
    f.mu = 0.0;
    f.lip = na * na;
    objs.push_back(std::move(f));
  }
  Problem p(std::move(name), std::move(objs), LinearConstraint(std::move(a_con), std::move(b_con)));
  p.set_sample_region(Vector::Constant(p.n(), -10.0), Vector::Constant(p.n(), 10.0));
  if (p.r() > 0) p.set_feasible_point(project_affine(p.constraint().matrix(), p.constraint().rhs(), Vector::Zero(p.n())));
  return p;
}

/// Default log-sum-exp instance on x1 + x2 = 1.
inline Problem make_logsumexp() {
  Matrix a(1, 2);
  a << 1.0, 1.0;
  return make_logsumexp(default_logsumexp_coefficients(0), std::move(a), Vector::Ones(1));
}

/// Random strongly convex (or convex, mu_range = 0) quadratic instance.
///
/// Q_j = U_j diag(s) U_j^T with U_j Haar-like orthogonal and spectrum s in
/// [mu_range, lip_range] including both ends; c_j, A uniform in [-1, 1];
/// b = A x_feas with x_feas uniform in the sample region [-1, 1]^n.
/// Deterministic in seed.
inline Problem make_random_quadratic(Eigen::Index n, Eigen::Index m, Eigen::Index r, std::uint64_t seed,
                                     double mu_range, double lip_range, std::string name = {}) {
  if (!(n >= r && r >= 1 && m >= 1)) throw PreconditionError("make_random_quadratic: need n >= r >= 1, m >= 1");
  if (!(mu_range >= 0.0 && mu_range <= lip_range && lip_range > 0.0 && std::isfinite(lip_range)))
    throw PreconditionError("make_random_quadratic: need 0 <= mu_range <= lip_range, lip_range > 0");
  const Rng root = Rng(seed).split("random_quadratic");

  QuadraticModel qm;
  std::vector<double> mus, lips;
  for (Eigen::Index j = 0; j < m; ++j) {
    Rng rq = root.split("Q").split(static_cast<std::uint64_t>(j));
    Vector spec(n);
    for (Eigen::Index i = 0; i < n; ++i) spec[i] = rq.uniform(mu_range, lip_range);
    spec[0] = n > 1 ? mu_range : lip_range;
    spec[n - 1] = lip_range;
    Matrix q;
    if (mu_range == lip_range) {
      q = lip_range * Matrix::Identity(n, n);
    } else {
      Eigen::HouseholderQR<Matrix> qr(rq.normal_matrix(n, n));
      const Matrix u = qr.householderQ();
      q = u * spec.asDiagonal() * u.transpose();
      q = 0.5 * (q + q.transpose()).eval();
    }
    qm.q.push_back(std::move(q));
    Rng rc = root.split("c").split(static_cast<std::uint64_t>(j));
    qm.c.push_back(rc.uniform_vector(Vector::Constant(n, -1.0), Vector::Constant(n, 1.0)));
    qm.d.push_back(0.0);
    mus.push_back(spec.minCoeff());
    lips.push_back(spec.maxCoeff());
  }
  Rng ra = root.split("A");
  Matrix a = ra.uniform_matrix(r, n, -1.0, 1.0);
  Rng rx = root.split("x_feas");
  const Vector lo = Vector::Constant(n, -1.0), hi = Vector::Constant(n, 1.0);
  Vector x_feas = rx.uniform_vector(lo, hi);
  Vector b = a * x_feas;

  if (name.empty())
    name = "random_quadratic_n" + std::to_string(n) + "_m" + std::to_string(m) + "_r" + std::to_string(r) + "_s" +
           std::to_string(seed);
  Problem p = make_quadratic_problem(std::move(name), qm, mus, lips, std::move(a), std::move(b));
  p.set_sample_region(lo, hi);
  p.set_feasible_point(std::move(x_feas));
  return p;
}

/// Finite reference set for objective-gap estimation.
///
/// With an attached Pareto parametrization, `count` points on a uniform grid
/// of the parameter. Otherwise AMPD-QP runs from `count` random starts in the
/// sample region; terminal points with KKT <= 1e-4 are corrected onto
/// {A z = b} by the least-norm step and kept.
inline ParetoReference pareto_reference(const Problem& p, std::size_t count, std::uint64_t seed,
                                        const SolverConfig& cfg = {}) {
  if (count < 1) throw PreconditionError("pareto_reference: count must be >= 1");
  std::vector<Vector> pts;
  if (p.pareto_curve()) {
    for (std::size_t i = 0; i < count; ++i) {
      const double s = count == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(count - 1);
      pts.push_back(p.pareto_curve()->at(s));
    }
    return ParetoReference::from_points(p, std::move(pts), ParetoReference::Source::analytic);
  }

  SolverConfig run = cfg;
  run.tol = std::min(cfg.tol, 1e-4);
  run.record_trace = false;
  const Rng root = Rng(seed).split("pareto_reference");
  for (std::size_t i = 0; i < count; ++i) {
    Rng rs = root.split(static_cast<std::uint64_t>(i));
    const Vector x0 = rs.uniform_vector(p.sample_lo(), p.sample_hi());
    try {
      const SolveResult res = solve(p, x0, run);
      if (res.converged && res.final_kkt <= 1e-4)
        pts.push_back(project_affine(p.constraint().matrix(), p.constraint().rhs(), res.state.x));
    } catch (const Error&) {
      // failed start: skipped
    }
  }
  if (pts.empty()) throw Error("pareto_reference: solver failed from every start");
  return ParetoReference::from_points(p, std::move(pts), ParetoReference::Source::solver_generated);
}

/// Names understood by make_named_problem.
inline std::vector<std::string> problem_names() {
  return {"bk1", "witting", "logsumexp", "rq20", "rq20c", "rq100"};
}

/// Packaged instance by name. Random instances derive their data from `seed`.
///   rq20  : strongly convex quadratic n=20, m=2, r=5, spectrum [1, 10]
///   rq20c : convex quadratic n=20, m=2, r=5, spectrum [0, 10]
///   rq100 : strongly convex quadratic n=100, m=3, r=20, spectrum [1, 10]
inline Problem make_named_problem(const std::string& name, std::uint64_t seed = 0) {
  if (name == "bk1") return make_bk1();
  if (name == "witting") return make_witting(0.6);
  if (name == "logsumexp") return make_logsumexp();
  if (name == "rq20") return make_random_quadratic(20, 2, 5, seed, 1.0, 10.0, "rq20");
  if (name == "rq20c") return make_random_quadratic(20, 2, 5, seed, 0.0, 10.0, "rq20c");
  if (name == "rq100") return make_random_quadratic(100, 3, 20, seed, 1.0, 10.0, "rq100");
  throw UnknownProblemError("unknown problem '" + name + "'");
}

}  // namespace ampd
