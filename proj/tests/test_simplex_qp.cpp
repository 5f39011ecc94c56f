#include <gtest/gtest.h>

#include <limits>

#include "support.hpp"

using namespace ampd;
using ampd::testing::mat;
using ampd::testing::vec;

namespace {

// Optimality of lambda for min ||lambda - y||^2 over the simplex:
// <y - lambda, e_i - lambda> <= 0 for every vertex e_i.
double simplex_vi(const Vector& y, const Vector& lambda) {
  double worst = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    Vector e = Vector::Zero(y.size());
    e[i] = 1;
    worst = std::max(worst, (y - lambda).dot(e - lambda));
  }
  return worst;
}

// Brute-force minimum of 1/2 ||G^T l - w||^2 over a simplex grid.
double grid_min(const Matrix& g, const Vector& w, double mesh) {
  const int steps = static_cast<int>(std::lround(1.0 / mesh));
  double best = std::numeric_limits<double>::infinity();
  auto obj = [&](const Vector& l) { return 0.5 * (g.transpose() * l - w).squaredNorm(); };
  if (g.rows() == 1) return obj(Vector::Ones(1));
  if (g.rows() == 2) {
    for (int i = 0; i <= steps; ++i) {
      const double a = i * mesh;
      best = std::min(best, obj(vec({a, 1 - a})));
    }
    return best;
  }
  for (int i = 0; i <= steps; ++i)
    for (int j = 0; i + j <= steps; ++j) {
      const double a = i * mesh, b = j * mesh;
      best = std::min(best, obj(vec({a, b, std::max(0.0, 1 - a - b)})));
    }
  return best;
}

}  // namespace

TEST(SimplexProject, SpecExamples) {
  EXPECT_TRUE(simplex_project(vec({0.5, 0.5})).lambda.isApprox(vec({0.5, 0.5})));
  EXPECT_TRUE(simplex_project(vec({2, 0})).lambda.isApprox(vec({1, 0})));
  const Vector l = simplex_project(vec({0.8, 0.4})).lambda;
  EXPECT_NEAR(l[0], 0.7, 1e-15);
  EXPECT_NEAR(l[1], 0.3, 1e-15);
}

TEST(SimplexProject, Errors) {
  EXPECT_THROW(simplex_project(Vector(0)), Error);
  EXPECT_THROW(simplex_project(vec({1, std::numeric_limits<double>::quiet_NaN()})), NumericalError);
}

TEST(SimplexProject, RandomOptimality) {
  Rng rng(2);
  for (int trial = 0; trial < 500; ++trial) {
    const Eigen::Index m = 1 + trial % 6;
    Vector y(m);
    for (Eigen::Index i = 0; i < m; ++i) y[i] = rng.uniform(-3, 3);
    const Vector l = simplex_project(y).lambda;
    EXPECT_GE(l.minCoeff(), 0.0);
    EXPECT_NEAR(l.sum(), 1.0, 1e-12);
    EXPECT_LE(simplex_vi(y, l), 1e-12);
  }
}

TEST(ProjectHull, SingleVertex) {
  const HullProjection h = project_hull(mat(1, 2, {3, -1}), vec({10, 10}));
  EXPECT_TRUE(h.point.isApprox(vec({3, -1})));
  EXPECT_EQ(h.weights.lambda.size(), 1);
  EXPECT_EQ(h.weights.lambda[0], 1.0);
}

TEST(ProjectHull, SegmentInterior) {
  const HullProjection h = project_hull(mat(2, 2, {0, 0, 1, 0}), vec({0.3, 5}));
  EXPECT_NEAR((h.point - vec({0.3, 0})).norm(), 0.0, 1e-15);
  EXPECT_NEAR(h.weights.lambda[0], 0.7, 1e-15);
  EXPECT_NEAR(h.weights.lambda[1], 0.3, 1e-15);
  EXPECT_NEAR(h.objective, 12.5, 1e-12);
}

TEST(ProjectHull, SegmentClipped) {
  const HullProjection h = project_hull(mat(2, 2, {0, 0, 1, 0}), vec({-2, 0}));
  EXPECT_EQ(h.point, vec({0, 0}));
  EXPECT_EQ(h.weights.lambda, vec({1, 0}));
}

TEST(ProjectHull, DegenerateSegment) {
  const HullProjection h = project_hull(mat(2, 2, {1, 2, 1, 2}), vec({0, 0}));
  EXPECT_TRUE(h.point.isApprox(vec({1, 2})));
}

TEST(ProjectHull, TriangleInteriorPoint) {
  const Matrix g = mat(3, 2, {0, 0, 1, 0, 0, 1});
  const HullProjection h = project_hull(g, vec({0.2, 0.3}));
  EXPECT_NEAR((h.point - vec({0.2, 0.3})).norm(), 0.0, 1e-9);
  EXPECT_NEAR(h.weights.lambda.sum(), 1.0, 1e-12);
}

TEST(ProjectHull, TriangleFace) {
  const Matrix g = mat(3, 2, {0, 0, 1, 0, 0, 1});
  const HullProjection h = project_hull(g, vec({1, 1}));
  EXPECT_NEAR((h.point - vec({0.5, 0.5})).norm(), 0.0, 1e-9);
}

TEST(ProjectHull, Errors) {
  EXPECT_THROW(project_hull(mat(1, 2, {1, 2}), vec({1, 2, 3})), DimensionError);
  EXPECT_THROW(project_hull(mat(2, 1, {1, std::numeric_limits<double>::infinity()}), vec({0})), NumericalError);
  EXPECT_THROW(project_hull(Matrix(0, 2), vec({0, 0})), Error);
}

TEST(ProjectHull, IterationCapCarriesBestIterate) {
  Rng rng(4);
  const Matrix g = rng.uniform_matrix(3, 4, -1, 1);
  HullQpOptions opt;
  opt.max_iter = 1;
  opt.gap_tol = 1e-300;
  opt.polish = false;
  try {
    // near the centroid the solution is interior, so one step cannot be exact
    const Vector w = g.colwise().mean().transpose() + 0.1 * g.row(0).transpose();
    project_hull(g, w, opt);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    // best iterate is the hull point G^T lambda
    ASSERT_EQ(e.best().size(), 4);
    EXPECT_TRUE(e.best().allFinite());
  }
}

TEST(MinNormElement, SpecExamples) {
  EXPECT_NEAR(min_norm_element(mat(2, 2, {1, 0, -1, 0})).point.norm(), 0.0, 1e-15);
  EXPECT_TRUE(min_norm_element(mat(1, 2, {2, 0})).point.isApprox(vec({2, 0})));
  const HullProjection h = min_norm_element(mat(2, 2, {1, 1, 1, -1}));
  EXPECT_TRUE(h.point.isApprox(vec({1, 0})));
  EXPECT_TRUE(h.weights.lambda.isApprox(vec({0.5, 0.5})));
}

class HullProperties : public ::testing::Test {
 protected:
  Rng rng{99};
  std::pair<Matrix, Vector> draw() {
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(rng.next_u64() % 3);
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.next_u64() % 4);
    return {rng.uniform_matrix(m, n, -2, 2), rng.uniform_vector(Vector::Constant(n, -4), Vector::Constant(n, 4))};
  }
};

TEST_F(HullProperties, VariationalInequality) {
  for (int trial = 0; trial < 300; ++trial) {
    auto [g, w] = draw();
    const HullProjection h = project_hull(g, w);
    for (Eigen::Index j = 0; j < g.rows(); ++j) {
      const Vector gj = g.row(j).transpose();
      EXPECT_LE((w - h.point).dot(gj - h.point), 1e-9 * (1 + w.norm()) * (1 + gj.norm()));
    }
  }
}

TEST_F(HullProperties, WeightConsistency) {
  for (int trial = 0; trial < 300; ++trial) {
    auto [g, w] = draw();
    const HullProjection h = project_hull(g, w);
    EXPECT_GE(h.weights.lambda.minCoeff(), 0.0);
    EXPECT_NEAR(h.weights.lambda.sum(), 1.0, 1e-12);
    EXPECT_LE((g.transpose() * h.weights.lambda - h.point).norm(), 1e-12 * (1 + g.norm()));
    EXPECT_NEAR(h.objective, 0.5 * (h.point - w).squaredNorm(), 1e-12 * (1 + h.objective));
  }
}

TEST_F(HullProperties, Idempotence) {
  for (int trial = 0; trial < 300; ++trial) {
    auto [g, w] = draw();
    const Vector p = project_hull(g, w).point;
    EXPECT_LE((project_hull(g, p).point - p).norm(), 1e-10);
  }
}

TEST_F(HullProperties, PolishAgreesWithPlainIteration) {
  HullQpOptions plain;
  plain.polish = false;
  plain.max_iter = 1000000;
  plain.gap_tol = 1e-14;
  for (int trial = 0; trial < 100; ++trial) {
    auto [g, w] = draw();
    EXPECT_LE((project_hull(g, w).point - project_hull(g, w, plain).point).norm(), 1e-6);
  }
}

TEST_F(HullProperties, Nonexpansive) {
  for (int trial = 0; trial < 300; ++trial) {
    auto [g, w1] = draw();
    const Vector w2 = w1 + rng.uniform_vector(Vector::Constant(w1.size(), -1), Vector::Constant(w1.size(), 1));
    EXPECT_LE((project_hull(g, w1).point - project_hull(g, w2).point).norm(), (w1 - w2).norm() + 1e-9);
  }
}

TEST_F(HullProperties, MatchesGridOracle) {
  for (int trial = 0; trial < 60; ++trial) {
    auto [g, w] = draw();
    EXPECT_NEAR(project_hull(g, w).objective, grid_min(g, w, 1e-2), 5e-2 * (1 + w.squaredNorm()));
    EXPECT_LE(project_hull(g, w).objective, grid_min(g, w, 1e-2) + 1e-12);
  }
}

TEST(ProjectHull, DuplicatedRows) {
  const Matrix g = mat(3, 2, {1, 0, 1, 0, 0, 1});
  const HullProjection h = project_hull(g, vec({0, 0}));
  EXPECT_TRUE(h.point.isApprox(vec({0.5, 0.5}), 1e-9));
  EXPECT_EQ(h.weights.lambda.size(), 3);
}

TEST(HullViResidual, ZeroAtProjection) {
  const Matrix g = mat(2, 2, {0, 0, 1, 0});
  EXPECT_LE(hull_vi_residual(g, vec({0.3, 5}), vec({0.3, 0})), 1e-15);
  EXPECT_GT(hull_vi_residual(g, vec({0.3, 5}), vec({0.0, 0})), 0.1);
}
