#include <gtest/gtest.h>

#include <random>

#include "ltoco/composite_step.hpp"
#include "ltoco/errors.hpp"
#include "ltoco/verification.hpp"
#include "test_support.hpp"

using namespace ltoco;
using ltoco::testing::mat;
using ltoco::testing::vec;

namespace {

struct Fixture {
  ConstraintBlock g;
  FeasibleSet X;
};

Fixture square_with_identity() {
  return {ConstraintBlock::static_affine(Matrix::Identity(2, 2), Vector::Ones(2), 1),
          FeasibleSet::cube(2, 1.0)};
}

// X = [-2, 2], g(x) = x, eta = 1, gamma = 1, w = 2, v = -1, anchor 0.
Fixture kink() {
  return {ConstraintBlock::static_affine(mat(1, 1, {1}), vec({0}), 1),
          FeasibleSet::cube(1, 2.0)};
}

CompositeStepSpec kink_spec(const Fixture& f) {
  return CompositeStepSpec{vec({-1}), vec({2}), 1.0, 1.0, f.g, 1, vec({0}), f.X};
}

}  // namespace

TEST(SolveCompositeStep, ZeroWeightsFastPath) {
  const Fixture f = square_with_identity();
  const CompositeStepSpec s{vec({1, 0}), Vector::Zero(2), 0.1, 3.7, f.g, 1, vec({0, 0}), f.X};
  const StepResult r = solve_composite_step(s);
  EXPECT_TRUE(r.fast_path);
  EXPECT_TRUE(r.verified);
  EXPECT_NEAR(r.x[0], -0.1, 1e-15);
  EXPECT_EQ(r.x[1], 0.0);
}

TEST(SolveCompositeStep, ZeroWeightsClampedAtBoundary) {
  const Fixture f = square_with_identity();
  const CompositeStepSpec s{vec({100, 0}), Vector::Zero(2), 0.1, 1.0, f.g, 1, vec({0, 0}), f.X};
  const StepResult r = solve_composite_step(s);
  EXPECT_EQ(r.x.coords(), vec({-1, 0}));
}

TEST(SolveCompositeStep, OneDimensionalKink) {
  const Fixture f = kink();
  const CompositeStepSpec s = kink_spec(f);
  const StepResult sg = solve_composite_step(s, InnerMethod::Subgradient);
  EXPECT_NEAR(sg.x[0], 0.0, 1e-3);
  const StepResult r = solve_composite_step(s);
  EXPECT_NEAR(r.x[0], 0.0, 1e-6);
  EXPECT_NEAR(r.objective, 0.0, 1e-9);
  EXPECT_TRUE(r.verified);
  EXPECT_LE(r.gap_bound, s.tol);
  // Piecewise-quadratic objective evaluated by hand.
  EXPECT_DOUBLE_EQ(composite_objective(s, vec({-1})), 1.0 + 0.5);
  EXPECT_DOUBLE_EQ(composite_objective(s, vec({1})), -1.0 + 2.0 + 0.5);
}

TEST(SolveCompositeStep, RejectsMalformedSpecs) {
  const Fixture f = square_with_identity();
  const CompositeStepSpec neg_w{vec({1, 0}), vec({-1, 0}), 0.1, 1.0, f.g, 1, vec({0, 0}), f.X};
  EXPECT_THROW(solve_composite_step(neg_w), InvalidInput);
  const CompositeStepSpec bad_v{vec({1}), Vector::Zero(2), 0.1, 1.0, f.g, 1, vec({0, 0}), f.X};
  EXPECT_THROW(solve_composite_step(bad_v), InvalidInput);
}

TEST(BruteForceStep, KinkInstance) {
  const Fixture f = kink();
  EXPECT_NEAR(brute_force_step(kink_spec(f), 1e-4)[0], 0.0, 1e-4);
}

TEST(BruteForceStep, MatchesClosedFormWithoutWeights) {
  const Fixture f = square_with_identity();
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    const Vector v = vec({n(rng), n(rng)});
    const Vector z = 0.5 * vec({n(rng), n(rng)});
    const CompositeStepSpec s{v, Vector::Zero(2), 0.3, 1.0, f.g, 1, z, f.X};
    const Vector closed = f.X.project(z - 0.3 * v);
    const Vector grid = brute_force_step(s, 1e-3).coords();
    EXPECT_LE((grid - closed).lpNorm<Eigen::Infinity>(), 1e-3);
  }
}

TEST(BruteForceStep, BregmanTermAloneReturnsAnchor) {
  const Fixture f = square_with_identity();
  const CompositeStepSpec s{Vector::Zero(2), Vector::Zero(2), 0.5, 1.0, f.g, 1, vec({0.25, -0.5}),
                            f.X};
  const Vector x = brute_force_step(s, 1e-3).coords();
  EXPECT_NEAR(x[0], 0.25, 1e-3);
  EXPECT_NEAR(x[1], -0.5, 1e-3);
}

TEST(BruteForceStep, RejectsHigherDimensions) {
  const auto g = ConstraintBlock::static_affine(Matrix::Identity(3, 3), Vector::Ones(3), 1);
  const FeasibleSet X = FeasibleSet::cube(3, 1.0);
  const CompositeStepSpec s{Vector::Zero(3), Vector::Zero(3), 0.5, 1.0, g, 1, Vector::Zero(3), X};
  EXPECT_THROW(brute_force_step(s, 1e-2), UnsupportedDimension);
}

// The certified value is within tol of every sampled feasible objective, for
// random instances in several dimensions and on both set shapes.
TEST(SolveCompositeStep, NoSampledPointBeatsCertificate) {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const Index p = 1 + trial % 5;
    const Index m = 1 + trial % 3;
    Matrix A(m, p);
    Vector b(m), w(m), v(p);
    for (Index j = 0; j < m; ++j) {
      for (Index i = 0; i < p; ++i) A(j, i) = n(rng);
      b[j] = 0.3 * n(rng);
      w[j] = 3.0 * u(rng);
    }
    for (Index i = 0; i < p; ++i) v[i] = 2.0 * n(rng);
    const auto g = ConstraintBlock::static_affine(A, b, 1);
    const FeasibleSet X = trial % 2 ? FeasibleSet::cube(p, 1.0) : FeasibleSet::ball(Vector::Zero(p), 1.0);
    const Vector anchor = X.sample(rng);
    const CompositeStepSpec s{v, w, 0.5, 2.0, g, 1, anchor, X, 1e-10};
    const StepResult r = solve_composite_step(s);
    ASSERT_TRUE(r.verified);
    EXPECT_TRUE(X.contains(r.x.coords()));
    EXPECT_NEAR(r.objective, composite_objective(s, r.x.coords()), 1e-12);
    for (int k = 0; k < 200; ++k) {
      EXPECT_GE(composite_objective(s, X.sample(rng)), r.objective - s.tol);
    }
  }
}

// For the strongly convex composite objective phi with minimizer x_hat:
//   phi(y) >= phi(x_hat) + D(y, x_hat)   for all y in X.
TEST(SolveCompositeStep, ThreePointInequality) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const Index p = 2;
    Matrix A(2, p);
    Vector b(2);
    for (Index j = 0; j < 2; ++j) {
      for (Index i = 0; i < p; ++i) A(j, i) = n(rng);
      b[j] = 0.2 * n(rng);
    }
    const auto g = ConstraintBlock::static_affine(A, b, 1);
    const FeasibleSet X = FeasibleSet::cube(p, 1.0);
    const CompositeStepSpec s{vec({n(rng), n(rng)}), vec({u(rng), u(rng)}), 0.4, 1.5, g, 1,
                              X.sample(rng), X, 1e-12};
    const StepResult r = solve_composite_step(s);
    ASSERT_TRUE(r.verified);
    for (int k = 0; k < 100; ++k) {
      const Vector y = X.sample(rng);
      const double d = 0.5 * (y - r.x.coords()).squaredNorm();
      // An eps-optimal point satisfies the inequality up to sqrt-scale slack.
      EXPECT_GE(composite_objective(s, y), r.objective + d - 1e-5);
    }
  }
}

TEST(SolveCompositeStep, BaselineProxWeight) {
  const auto g = ConstraintBlock::static_affine(mat(1, 1, {1}), vec({10}), 1);
  const FeasibleSet X = FeasibleSet::cube(1, 1.0);
  CompositeStepSpec s{vec({1}), vec({0}), 0.5, 1.0, g, 1, vec({0}), X};
  s.prox_weight = 2.0;
  // min 0.5 x + x^2 -> x = -0.25
  EXPECT_NEAR(solve_composite_step(s).x[0], -0.25, 1e-15);
}

TEST(StepOracleSuite, SmallRandomBatchAgrees) {
  const OracleSuiteReport r = step_oracle_suite(10, 123, 1e-4);
  EXPECT_EQ(r.instances, 10);
  EXPECT_TRUE(r.passed()) << "failures " << r.failures << " worst " << r.worst_diff;
}
