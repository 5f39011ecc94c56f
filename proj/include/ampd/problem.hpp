#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ampd/error.hpp"
#include "ampd/linalg.hpp"

namespace ampd {

/// One smooth objective f_j with its strong-convexity and gradient-Lipschitz
/// constants. The solver trusts (mu, lip); nothing here estimates them.
struct Objective {
  std::function<double(const Vector&)> eval;
  std::function<Vector(const Vector&)> grad;
  double mu = 0.0;
  double lip = 0.0;
  /// False for objectives outside the convex class (e.g. the Witting test
  /// problem); then `mu` is a surrogate and only the L-smoothness half of the
  /// curvature sandwich is meaningful.
  bool convex = true;
};

/// Equality constraint A x = b with cached spectral data.
class LinearConstraint {
 public:
  LinearConstraint() = default;

  LinearConstraint(Matrix a, Vector b) : a_(std::move(a)), b_(std::move(b)) {
    detail::require_dim(b_.size(), a_.rows(), "LinearConstraint b");
    detail::require_finite(a_, "constraint matrix A");
    detail::require_finite(b_, "constraint vector b");
    norm_ = operator_norm(a_, 1e-13);
    is_zero_ = a_.size() == 0 || a_.cwiseAbs().maxCoeff() == 0.0;
    if (!is_zero_) sigma_min_plus_ = min_positive_singular(a_);
  }

  const Matrix& matrix() const noexcept { return a_; }
  const Vector& rhs() const noexcept { return b_; }
  Eigen::Index rows() const noexcept { return a_.rows(); }
  Eigen::Index cols() const noexcept { return a_.cols(); }
  double norm() const noexcept { return norm_; }
  bool is_zero() const noexcept { return is_zero_; }

  /// sigma_min^+(A); throws when A = 0.
  double sigma_min_plus() const {
    if (is_zero_) throw PreconditionError("sigma_min_plus undefined for A = 0");
    return sigma_min_plus_;
  }

  Vector residual(const Vector& x) const { return a_ * x - b_; }

 private:
  Matrix a_;
  Vector b_;
  double norm_ = 0.0;
  double sigma_min_plus_ = 0.0;
  bool is_zero_ = true;
};

/// Raw data of a quadratic instance f_j(x) = 1/2 x^T Q_j x + c_j^T x + d_j.
struct QuadraticModel {
  std::vector<Matrix> q;
  std::vector<Vector> c;
  std::vector<double> d;
};

/// A parametrized subset of the Pareto set: s in [0, 1] -> point.
struct ParetoCurve {
  std::function<Vector(double)> at;
};

/// Linearly constrained multiobjective problem min F(x) s.t. A x = b.
class Problem {
 public:
  Problem(std::string name, std::vector<Objective> objectives, LinearConstraint constraint)
      : name_(std::move(name)), objectives_(std::move(objectives)), constraint_(std::move(constraint)) {
    if (objectives_.empty()) throw PreconditionError("Problem needs at least one objective");
    mu_ = objectives_.front().mu;
    lip_ = objectives_.front().lip;
    for (const auto& f : objectives_) {
      if (!f.eval || !f.grad) throw PreconditionError("Objective without value or gradient");
      if (!(f.mu >= 0.0 && f.mu <= f.lip && std::isfinite(f.lip)))
        throw PreconditionError("Objective constants must satisfy 0 <= mu <= lip < inf");
      mu_ = std::min(mu_, f.mu);
      lip_ = std::max(lip_, f.lip);
    }
    const Eigen::Index n = constraint_.cols();
    sample_lo_ = Vector::Constant(n, -10.0);
    sample_hi_ = Vector::Constant(n, 10.0);
  }

  const std::string& name() const noexcept { return name_; }
  const std::vector<Objective>& objectives() const noexcept { return objectives_; }
  const Objective& objective(std::size_t j) const { return objectives_.at(j); }
  const LinearConstraint& constraint() const noexcept { return constraint_; }

  Eigen::Index n() const noexcept { return constraint_.cols(); }
  Eigen::Index m() const noexcept { return static_cast<Eigen::Index>(objectives_.size()); }
  Eigen::Index r() const noexcept { return constraint_.rows(); }
  double mu() const noexcept { return mu_; }
  double lip() const noexcept { return lip_; }
  bool convex() const noexcept {
    return std::all_of(objectives_.begin(), objectives_.end(), [](const Objective& f) { return f.convex; });
  }

  // Metadata attached by the packaged constructors.

  const Vector& sample_lo() const noexcept { return sample_lo_; }
  const Vector& sample_hi() const noexcept { return sample_hi_; }
  void set_sample_region(Vector lo, Vector hi) {
    detail::require_dim(lo.size(), n(), "sample region");
    detail::require_dim(hi.size(), n(), "sample region");
    sample_lo_ = std::move(lo);
    sample_hi_ = std::move(hi);
  }

  /// A point certifying that {A x = b} is nonempty, when known.
  const std::optional<Vector>& feasible_point() const noexcept { return feasible_point_; }
  void set_feasible_point(Vector x) {
    detail::require_dim(x.size(), n(), "feasible point");
    feasible_point_ = std::move(x);
  }

  const std::optional<ParetoCurve>& pareto_curve() const noexcept { return pareto_; }
  void set_pareto_curve(ParetoCurve c) { pareto_ = std::move(c); }

  const std::shared_ptr<const QuadraticModel>& quadratic() const noexcept { return quadratic_; }
  void set_quadratic(std::shared_ptr<const QuadraticModel> q) { quadratic_ = std::move(q); }

 private:
  std::string name_;
  std::vector<Objective> objectives_;
  LinearConstraint constraint_;
  double mu_ = 0.0;
  double lip_ = 0.0;
  Vector sample_lo_, sample_hi_;
  std::optional<Vector> feasible_point_;
  std::optional<ParetoCurve> pareto_;
  std::shared_ptr<const QuadraticModel> quadratic_;
};

/// F(x) = (f_1(x), ..., f_m(x)).
inline Vector eval_objectives(const Problem& p, const Vector& x) {
  detail::require_dim(x.size(), p.n(), "eval_objectives x");
  Vector out(p.m());
  for (Eigen::Index j = 0; j < p.m(); ++j) out[j] = p.objectives()[j].eval(x);
  return out;
}

/// m x n matrix whose row j is grad f_j(x): the vertices of C(x).
inline Matrix eval_jacobian(const Problem& p, const Vector& x) {
  detail::require_dim(x.size(), p.n(), "eval_jacobian x");
  Matrix out(p.m(), p.n());
  for (Eigen::Index j = 0; j < p.m(); ++j) {
    Vector g = p.objectives()[j].grad(x);
    detail::require_dim(g.size(), p.n(), "objective gradient");
    out.row(j) = g.transpose();
  }
  return out;
}

/// Largest relative error between the analytic gradients and central
/// differences with step h: max_j ||g_j - fd_j|| / max(1, ||g_j||).
inline double check_gradients(const Problem& p, const Vector& x, double h) {
  if (!(h > 0.0)) throw PreconditionError("check_gradients: h must be positive");
  detail::require_dim(x.size(), p.n(), "check_gradients x");
  double worst = 0.0;
  for (const auto& f : p.objectives()) {
    const Vector g = f.grad(x);
    detail::require_finite(g, "check_gradients gradient");
    Vector fd(x.size());
    Vector probe = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      probe[i] = x[i] + h;
      const double fp = f.eval(probe);
      probe[i] = x[i] - h;
      const double fm = f.eval(probe);
      probe[i] = x[i];
      detail::require_finite(fp, "check_gradients probe value");
      detail::require_finite(fm, "check_gradients probe value");
      fd[i] = (fp - fm) / (2.0 * h);
    }
    worst = std::max(worst, (g - fd).norm() / std::max(1.0, g.norm()));
  }
  return worst;
}

/// f(x) = 1/2 x^T Q x + c^T x + d.
inline Objective make_quadratic_objective(Matrix q, Vector c, double d, double mu, double lip) {
  detail::require_dim(q.rows(), q.cols(), "quadratic Q (square)");
  detail::require_dim(c.size(), q.rows(), "quadratic c");
  auto qp = std::make_shared<const Matrix>(std::move(q));
  auto cp = std::make_shared<const Vector>(std::move(c));
  Objective f;
  f.eval = [qp, cp, d](const Vector& x) { return 0.5 * x.dot(*qp * x) + cp->dot(x) + d; };
  f.grad = [qp, cp](const Vector& x) -> Vector { return *qp * x + *cp; };
  f.mu = mu;
  f.lip = lip;
  return f;
}

/// Builds a quadratic problem and attaches its raw model.
inline Problem make_quadratic_problem(std::string name, const QuadraticModel& model,
                                      const std::vector<double>& mus, const std::vector<double>& lips,
                                      Matrix a, Vector b) {
  const std::size_t m = model.q.size();
  if (m == 0 || model.c.size() != m || model.d.size() != m || mus.size() != m || lips.size() != m)
    throw DimensionError("make_quadratic_problem: inconsistent objective counts");
  std::vector<Objective> objs;
  objs.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    detail::require_dim(model.q[j].cols(), a.cols(), "quadratic Q vs A columns");
    objs.push_back(make_quadratic_objective(model.q[j], model.c[j], model.d[j], mus[j], lips[j]));
  }
  Problem p(std::move(name), std::move(objs), LinearConstraint(std::move(a), std::move(b)));
  p.set_quadratic(std::make_shared<const QuadraticModel>(model));
  return p;
}

}  // namespace ampd
