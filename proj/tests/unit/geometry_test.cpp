#include <gtest/gtest.h>

#include <random>

#include "ltoco/errors.hpp"
#include "ltoco/geometry.hpp"
#include "test_support.hpp"

using namespace ltoco;
using ltoco::testing::vec;

TEST(Project, BoxClamps) {
  const FeasibleSet X = FeasibleSet::cube(2, 1.0);
  EXPECT_EQ(project(X, vec({2, 0.5})).coords(), vec({1, 0.5}));
}

TEST(Project, BallRescales) {
  const FeasibleSet X = FeasibleSet::ball(Vector::Zero(2), 1.0);
  const Vector x = project(X, vec({3, 4})).coords();
  EXPECT_NEAR(x[0], 0.6, 1e-15);
  EXPECT_NEAR(x[1], 0.8, 1e-15);
}

TEST(Project, FixedPointInside) {
  const FeasibleSet box = FeasibleSet::cube(3, 1.0);
  const FeasibleSet ball = FeasibleSet::ball(vec({1, 0, 0}), 2.0);
  const Vector y = vec({0.2, -0.4, 0.9});
  EXPECT_EQ(project(box, y).coords(), y);
  EXPECT_EQ(project(ball, y).coords(), y);
}

TEST(Project, RejectsNonFinite) {
  EXPECT_THROW(project(FeasibleSet::cube(1, 1.0), vec({std::nan("")})), InvalidInput);
}

TEST(Project, IdempotentAndNonexpansive) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> n(0.0, 3.0);
  const FeasibleSet sets[] = {FeasibleSet::box(vec({-1, 0, 2}), vec({1, 0.5, 4})),
                              FeasibleSet::ball(vec({0.5, -1, 0}), 1.5)};
  for (const FeasibleSet& X : sets) {
    for (int k = 0; k < 500; ++k) {
      Vector y1(3), y2(3);
      for (int i = 0; i < 3; ++i) {
        y1[i] = n(rng);
        y2[i] = n(rng);
      }
      const Vector p1 = X.project(y1), p2 = X.project(y2);
      EXPECT_TRUE(X.contains(p1));
      EXPECT_LE((X.project(p1) - p1).norm(), 1e-15);
      EXPECT_LE((p1 - p2).norm(), (y1 - y2).norm() + 1e-12);
    }
  }
}

TEST(FeasibleSet, RejectsInvalidShapes) {
  EXPECT_THROW(FeasibleSet::box(vec({1}), vec({0})), InvalidInput);
  EXPECT_THROW(FeasibleSet::ball(vec({0}), 0.0), InvalidInput);
  EXPECT_THROW(FeasibleSet::ball(vec({0}), INFINITY), InvalidInput);
  EXPECT_THROW(FeasibleSet::box(vec({-INFINITY}), vec({0})), InvalidInput);
}

TEST(FeasibleSet, SupportDiameterAndSampling) {
  const FeasibleSet box = FeasibleSet::box(vec({-1, 2}), vec({1, 3}));
  EXPECT_DOUBLE_EQ(box.support(vec({1, -1})), 1.0 - 2.0);
  EXPECT_DOUBLE_EQ(box.diameter(), std::sqrt(5.0));
  const FeasibleSet ball = FeasibleSet::ball(vec({1, 0}), 2.0);
  EXPECT_DOUBLE_EQ(ball.support(vec({0, 3})), 6.0);
  EXPECT_DOUBLE_EQ(ball.diameter(), 4.0);
  EXPECT_DOUBLE_EQ(ball.max_distance_from(vec({-1, 0})), 4.0);
  std::mt19937_64 rng(2);
  for (int k = 0; k < 200; ++k) {
    EXPECT_TRUE(box.contains(box.sample(rng)));
    EXPECT_TRUE(ball.contains(ball.sample(rng)));
  }
}

TEST(Bregman, QuadraticExamples) {
  const Regularizer R;
  EXPECT_DOUBLE_EQ(bregman(R, vec({1, 0}), vec({0, 0})), 0.5);
  EXPECT_DOUBLE_EQ(bregman(R, vec({0.3, -2}), vec({0.3, -2})), 0.0);
  EXPECT_DOUBLE_EQ(bregman(R, vec({1, 1}), vec({-1, 1})), 2.0);
}

TEST(Bregman, StrongConvexityAndPositivity) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 1.0);
  const Regularizer R;
  for (int k = 0; k < 300; ++k) {
    Vector x(3), y(3);
    for (int i = 0; i < 3; ++i) {
      x[i] = n(rng);
      y[i] = n(rng);
    }
    const double d = bregman(R, x, y);
    EXPECT_GE(d, 0.0);
    EXPECT_NEAR(d, 0.5 * (x - y).squaredNorm(), 1e-12);
    EXPECT_NEAR(R.value(x) - R.value(y) - R.gradient(y).dot(x - y), d, 1e-12);
    EXPECT_GT(d, 0.0);
  }
}

TEST(RegularizerMinimizer, Examples) {
  const Regularizer R;
  EXPECT_EQ(regularizer_minimizer(R, FeasibleSet::cube(4, 1.0)).coords(), Vector::Zero(4));
  EXPECT_EQ(regularizer_minimizer(R, FeasibleSet::box(vec({2, 2}), vec({3, 3}))).coords(), vec({2, 2}));
  const Vector x = regularizer_minimizer(R, FeasibleSet::ball(vec({5, 0}), 1.0)).coords();
  EXPECT_NEAR(x[0], 4.0, 1e-15);
  EXPECT_NEAR(x[1], 0.0, 1e-15);
}
