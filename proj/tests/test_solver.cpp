#include <gtest/gtest.h>

#include <limits>

#include "support.hpp"

using namespace ampd;
using ampd::testing::mat;
using ampd::testing::vec;

namespace {

double distance_to_bk1_segment(const Vector& x) {
  // segment {(t, t - 1) : 0.5 <= t <= 5.5}
  const Vector p0 = vec({0.5, -0.5});
  const Vector dir = vec({5, 5});
  const double s = std::clamp((x - p0).dot(dir) / dir.squaredNorm(), 0.0, 1.0);
  return (x - p0 - s * dir).norm();
}

}  // namespace

TEST(StepSize, SpecExamples) {
  EXPECT_DOUBLE_EQ(step_size(1, 1, 0, 1), 1.0);
  EXPECT_DOUBLE_EQ(step_size(1, 1, 3, 1), 0.5);
  EXPECT_NEAR(step_size(4, 4, 2, std::sqrt(2.0)), 4 / std::sqrt(10.0), 1e-15);
}

TEST(StepSize, Errors) {
  EXPECT_THROW(step_size(1, 1, 0, 0), PreconditionError);
  EXPECT_THROW(step_size(0, 1, 1, 1), PreconditionError);
  EXPECT_THROW(step_size(1, -1, 1, 1), PreconditionError);
}

TEST(StepSize, EqualityRuleSatisfiesInequality) {
  Rng rng(6);
  for (int i = 0; i < 1000; ++i) {
    const double th = rng.uniform(1e-6, 10), ga = rng.uniform(1e-3, 10), l = rng.uniform(0, 10),
                 na = rng.uniform(0.1, 5);
    const double a = step_size(th, ga, l, na);
    EXPECT_TRUE(step_admissible(a, th, ga, l, na));
    const double b = step_size_inequality(th, ga, l, na);
    EXPECT_TRUE(step_admissible(b, th, ga, l, na));
    EXPECT_GE(b, a);
    EXPECT_FALSE(step_admissible(b * (1 + 1e-9), th, ga, l, na));
  }
}

TEST(UpdateParams, SpecExamples) {
  EXPECT_DOUBLE_EQ(update_params(1, 1, 0, 1).first, 0.5);
  EXPECT_DOUBLE_EQ(update_params(1, 1, 0, 1).second, 0.5);
  EXPECT_DOUBLE_EQ(update_params(1, 1, 2, 1).second, 1.5);
  EXPECT_THROW(update_params(1, 1, 0, 0), PreconditionError);
  EXPECT_THROW(update_params(1, 1, -1, 1), PreconditionError);
}

TEST(Advance, HandComputedStep) {
  const Problem p = ampd::testing::half_norm_problem(mat(1, 1, {1}), vec({0}));
  const SolverState s{vec({1}), vec({1}), vec({0}), 1.0, 1.0, 0};
  const double alpha = step_size(1, 1, p.lip(), p.constraint().norm());
  EXPECT_NEAR(alpha, std::sqrt(0.5), 1e-15);
  const StepOutcome o = advance(p, s, alpha);
  EXPECT_NEAR(o.y[0], 1.0, 1e-15);
  EXPECT_NEAR(o.xi_hat[0], 0.70710678118654752, 1e-14);
  EXPECT_NEAR(o.v_qp[0], 1.0, 1e-15);
  EXPECT_NEAR(o.state.v[0], 0.29289321881345248, 1e-14);
  EXPECT_NEAR(o.state.xi[0], 0.20710678118654752, 1e-14);
  EXPECT_NEAR(o.state.x[0], 0.70710678118654752, 1e-14);
  EXPECT_NEAR(o.state.theta, 1 / (1 + alpha), 1e-15);
  EXPECT_NEAR(o.state.gamma, 1.0, 1e-15);
  EXPECT_EQ(o.state.k, 1);
}

TEST(Advance, SingleObjectiveOracle) {
  // With m = 1 the hull is {grad f(y)}, so the step is an ordinary
  // accelerated primal-dual update coded here without the QP.
  QuadraticModel qm;
  Rng rng(12);
  const Matrix b0 = rng.uniform_matrix(6, 6, -1, 1);
  qm.q.push_back(b0 * b0.transpose() + Matrix::Identity(6, 6));
  qm.c.push_back(rng.uniform_vector(Vector::Constant(6, -1), Vector::Constant(6, 1)));
  qm.d.push_back(0.0);
  const double ev_max = Eigen::SelfAdjointEigenSolver<Matrix>(qm.q[0]).eigenvalues().maxCoeff();
  const double ev_min = Eigen::SelfAdjointEigenSolver<Matrix>(qm.q[0]).eigenvalues().minCoeff();
  const Matrix a = rng.uniform_matrix(2, 6, -1, 1);
  const Vector b = rng.uniform_vector(Vector::Constant(2, -1), Vector::Constant(2, 1));
  const Problem p = make_quadratic_problem("m1", qm, {ev_min}, {ev_max}, a, b);

  SolverState s{rng.uniform_vector(Vector::Constant(6, -1), Vector::Constant(6, 1)),
                rng.uniform_vector(Vector::Constant(6, -1), Vector::Constant(6, 1)), vec({0.3, -0.2}), 0.7, 1.3, 0};
  for (int it = 0; it < 5; ++it) {
    const double al = step_size(s.theta, s.gamma, p.lip(), p.constraint().norm());
    const double mu = p.mu();
    const Vector y = (s.x + al * s.v) / (1 + al);
    const Vector xh = s.xi + al / s.theta * (a * s.v - b);
    const Vector grad = qm.q[0] * y + qm.c[0];
    const Vector v1 = (s.gamma * s.v + mu * al * y - al * a.transpose() * xh - al * grad) / (s.gamma + mu * al);
    const Vector xi1 = s.xi + al / s.theta * (a * v1 - b);
    const Vector x1 = (s.x + al * v1) / (1 + al);

    const StepOutcome o = advance(p, s, al);
    EXPECT_LE((o.state.v - v1).norm(), 1e-12 * (1 + v1.norm()));
    EXPECT_LE((o.state.xi - xi1).norm(), 1e-12 * (1 + xi1.norm()));
    EXPECT_LE((o.state.x - x1).norm(), 1e-12 * (1 + x1.norm()));
    s = o.state;
  }
}

TEST(Advance, KktPairIsFixedPoint) {
  const Problem p = make_bk1();
  const SolverState s{vec({3, 2}), vec({3, 2}), vec({-1}), 0.3, 1.5, 4};
  const StepOutcome o = advance(p, s, step_size(s.theta, s.gamma, p.lip(), p.constraint().norm()));
  EXPECT_LE((o.state.v - s.x).norm(), 1e-9);
  EXPECT_LE((o.state.x - s.x).norm(), 1e-9);
  EXPECT_LE((o.state.xi - s.xi).norm(), 1e-9);
}

TEST(Advance, ImplicitRelationsHold) {
  const Problem p = make_random_quadratic(10, 3, 4, 2, 0.5, 5.0);
  Rng rng(13);
  SolverState s{rng.uniform_vector(p.sample_lo(), p.sample_hi()), rng.uniform_vector(p.sample_lo(), p.sample_hi()),
                Vector::Zero(4), 1.0, 1.0, 0};
  const Matrix& a = p.constraint().matrix();
  for (int it = 0; it < 50; ++it) {
    const double al = step_size(s.theta, s.gamma, p.lip(), p.constraint().norm());
    const StepOutcome o = advance(p, s, al);
    const SolverState& n = o.state;
    // gamma (v' - v)/alpha = mu (y - v') - A^T xi_hat - v_qp
    const Vector lhs = s.gamma * (n.v - s.v) / al;
    const Vector rhs = p.mu() * (o.y - n.v) - a.transpose() * o.xi_hat - o.v_qp;
    EXPECT_LE((lhs - rhs).norm(), 1e-9 * (1 + lhs.norm() + rhs.norm()));
    // x' - x = alpha (v' - x')
    EXPECT_LE((n.x - s.x - al * (n.v - n.x)).norm(), 1e-12 * (1 + n.x.norm()));
    // v_qp lies in C(y)
    EXPECT_LE((eval_jacobian(p, o.y).transpose() * o.weights.lambda - o.v_qp).norm(), 1e-10 * (1 + o.v_qp.norm()));
    s = n;
  }
}

TEST(Advance, Errors) {
  const Problem p = make_bk1();
  const SolverState s{vec({1, 0}), vec({1, 0}), vec({0}), 1, 1, 0};
  EXPECT_THROW(advance(p, s, 0.0), PreconditionError);
  EXPECT_THROW(advance(p, SolverState{vec({1}), vec({1, 0}), vec({0}), 1, 1, 0}, 0.5), DimensionError);
  EXPECT_THROW(advance(p, SolverState{vec({1, 0}), vec({1, 0}), vec({0, 0}), 1, 1, 0}, 0.5), DimensionError);
}

TEST(Solve, Bk1FeasibleStart) {
  const Problem p = make_bk1();
  const SolveResult r = solve(p, vec({1, 0}), SolverConfig{});
  EXPECT_TRUE(r.converged);
  EXPECT_GE(r.state.k, 10);
  EXPECT_LE(r.state.k, 1000);
  EXPECT_LE(distance_to_bk1_segment(r.state.x), 1e-2);
  EXPECT_LE(r.final_kkt, 1e-3);
  ASSERT_EQ(static_cast<long>(r.trace.size()), r.state.k + 1);
  EXPECT_EQ(r.trace.back().kkt, r.final_kkt);
}

TEST(Solve, ZeroIterations) {
  const Problem p = make_bk1();
  SolverConfig cfg;
  cfg.max_iter = 0;
  const SolveResult r = solve(p, vec({1, 0}), cfg);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.state.k, 0);
  EXPECT_EQ(r.state.x, vec({1, 0}));
  EXPECT_EQ(r.trace.size(), 1u);

  const SolveResult at_kkt = solve(p, vec({3, 2}), vec({3, 2}), vec({-1}), cfg);
  EXPECT_TRUE(at_kkt.converged);
}

TEST(Solve, TraceInvariants) {
  const Problem p = make_random_quadratic(20, 2, 5, 1, 0.0, 10.0);
  SolverConfig cfg;
  cfg.gamma0 = 2.5;
  cfg.theta0 = 0.4;
  cfg.max_iter = 400;
  cfg.gap_every = 7;
  const ParetoReference refs =
      ParetoReference::from_points(p, {*p.feasible_point()}, ParetoReference::Source::sampled);
  const SolveResult r = solve(p, Vector::Zero(20), cfg, &refs);
  const double mu = p.mu();
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    const TraceRecord& rec = r.trace[i];
    EXPECT_EQ(rec.k, static_cast<long>(i));
    EXPECT_EQ(rec.gap_stale, rec.k % 7 != 0);
    EXPECT_FALSE(std::isnan(rec.gap_est));
    EXPECT_EQ(rec.f_values.size(), 2);
    EXPECT_GE(rec.gamma, cfg.gamma0 * rec.theta / cfg.theta0 - 1e-12);
    EXPECT_GE(rec.gamma, std::min(cfg.gamma0, mu) - 1e-15);
    EXPECT_LE(rec.gamma, std::max(cfg.gamma0, mu) + 1e-15);
    if (i > 0) {
      EXPECT_LT(rec.theta, r.trace[i - 1].theta);
      EXPECT_GE(rec.wall_time, r.trace[i - 1].wall_time);
      if (rec.gap_stale) {
        EXPECT_EQ(rec.gap_est, r.trace[i - 1].gap_est);
      }
    }
  }
}

TEST(Solve, NoReferencesMeansNanGap) {
  SolverConfig cfg;
  cfg.max_iter = 3;
  const SolveResult r = solve(make_bk1(), vec({1, 0}), cfg);
  for (const auto& rec : r.trace) EXPECT_TRUE(std::isnan(rec.gap_est));
}

TEST(Solve, RecordTraceOff) {
  SolverConfig cfg;
  cfg.record_trace = false;
  const SolveResult r = solve(make_bk1(), vec({1, 0}), cfg);
  EXPECT_TRUE(r.trace.empty());
  EXPECT_TRUE(r.converged);
}

TEST(Solve, InequalityRuleConverges) {
  SolverConfig cfg;
  cfg.step_rule = StepRule::inequality_backtracked;
  const SolveResult r = solve(make_bk1(), vec({-7, 9}), cfg);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(distance_to_bk1_segment(r.state.x), 1e-2);
}

TEST(Solve, Deterministic) {
  const Problem p = make_random_quadratic(20, 2, 5, 3, 1.0, 10.0);
  const Vector x0 = Vector::LinSpaced(20, -1, 1);
  const SolveResult a = solve(p, x0, SolverConfig{});
  const SolveResult b = solve(p, x0, SolverConfig{});
  EXPECT_EQ(a.state.k, b.state.k);
  EXPECT_EQ(a.state.x, b.state.x);
}

TEST(Solve, InvalidConfig) {
  SolverConfig cfg;
  cfg.tol = 0;
  EXPECT_THROW(solve(make_bk1(), vec({0, 0}), cfg), PreconditionError);
  cfg = {};
  cfg.theta0 = -1;
  EXPECT_THROW(solve(make_bk1(), vec({0, 0}), cfg), PreconditionError);
  EXPECT_THROW(solve(make_bk1(), vec({0, 0, 0}), SolverConfig{}), DimensionError);
}

TEST(Solve, FailureCarriesPartialTrace) {
  // Gradient turns NaN once x_1 exceeds 2.
  Objective f = make_quadratic_objective(Matrix::Identity(2, 2), vec({-10, 0}), 0, 1, 1);
  const auto good = f.grad;
  f.grad = [good](const Vector& x) -> Vector {
    if (x[0] > 2) return Vector::Constant(2, std::numeric_limits<double>::quiet_NaN());
    return good(x);
  };
  Problem p("trap", {f}, LinearConstraint(mat(1, 2, {0, 1}), vec({0})));
  try {
    solve(p, vec({0, 0}), SolverConfig{});
    FAIL() << "expected SolveError";
  } catch (const SolveError& e) {
    EXPECT_FALSE(e.partial_trace().empty());
  }
}

TEST(Solve, StronglyConvexReachesKktPair) {
  const Problem p = make_random_quadratic(20, 2, 5, 7, 1.0, 10.0);
  SolverConfig cfg;
  cfg.tol = 1e-6;
  const SolveResult r = solve(p, Vector::Zero(20), cfg);
  ASSERT_TRUE(r.converged);
  EXPECT_LE(kkt_residual(p, r.state.x, r.state.xi), 1e-6);
  // O(1/k^2): k^2 KKT stays bounded along the run
  const double k = static_cast<double>(r.state.k);
  EXPECT_LE(r.trace.back().kkt * k * k, 10.0 * r.trace[r.trace.size() / 2].kkt * (k / 2) * (k / 2));
}
