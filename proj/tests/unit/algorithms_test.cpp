#include <gtest/gtest.h>

#include <cmath>

#include "ltoco/composite_step.hpp"
#include "ltoco/engines.hpp"
#include "ltoco/errors.hpp"
#include "ltoco/metrics.hpp"
#include "test_support.hpp"

using namespace ltoco;
using ltoco::testing::constant_costs;
using ltoco::testing::make_env;
using ltoco::testing::mat;
using ltoco::testing::never_violated;
using ltoco::testing::vec;

namespace {

Environment line_env(std::vector<Vector> costs, ConstraintBlock g, double witness = -0.9) {
  return make_env(std::move(costs), std::move(g), FeasibleSet::cube(1, 1.0), vec({witness}));
}

void expect_same_trace(const RunTrace& a, const RunTrace& b) {
  ASSERT_EQ(a.T, b.T);
  for (long t = 0; t < a.T; ++t) {
    const auto i = static_cast<std::size_t>(t);
    EXPECT_EQ(a.x[i], b.x[i]);
    EXPECT_EQ(a.q[i], b.q[i]);
    EXPECT_EQ(a.q_hat[i], b.q_hat[i]);
    if (a.has_z()) {
      EXPECT_EQ(a.z[i], b.z[i]);
      EXPECT_EQ(a.h[i], b.h[i]);
    }
  }
  EXPECT_EQ(a.x_final, b.x_final);
}

}  // namespace

TEST(RunOgd, MonotoneDescentToBoundary) {
  const Environment env = line_env(constant_costs(vec({1}), 3), never_violated(1, 3));
  const auto s = make_custom_schedule(3, 0.5, 1.0, Variant::Baseline, 1.0, env.F);
  const RunTrace tr = run_ogd(env, s);
  EXPECT_EQ(tr.x[0][0], 0.0);
  EXPECT_EQ(tr.x[1][0], -0.5);
  EXPECT_EQ(tr.x[2][0], -1.0);
  EXPECT_EQ(tr.x_final[0], -1.0);
  EXPECT_FALSE(tr.has_z());
}

TEST(RunOgd, ZeroGradientStaysPut) {
  const Environment env = make_env(constant_costs(Vector::Zero(2), 5), never_violated(2, 5),
                                   FeasibleSet::box(vec({0.5, -1}), vec({1, 1})), vec({0.75, 0}));
  const RunTrace tr = run_ogd(env, make_custom_schedule(5, 0.7, 1.0, Variant::Baseline, 1.0, 2.0));
  for (const Vector& x : tr.x) EXPECT_EQ(x, vec({0.5, 0}));
}

TEST(RunOgd, AlternatingGradientsOscillate) {
  const Environment env =
      line_env({vec({1}), vec({-1}), vec({1}), vec({-1})}, never_violated(1, 4));
  const RunTrace tr = run_ogd(env, make_custom_schedule(4, 0.5, 1.0, Variant::Baseline, 1.0, 1.0));
  const double expected[] = {0.0, -0.5, 0.0, -0.5};
  for (int t = 0; t < 4; ++t) EXPECT_EQ(tr.x[static_cast<std::size_t>(t)][0], expected[t]);
  EXPECT_EQ(tr.x_final[0], 0.0);
}

TEST(RunOgd, RejectsHorizonMismatch) {
  const Environment env = line_env(constant_costs(vec({1}), 3), never_violated(1, 3));
  EXPECT_THROW(run_ogd(env, make_custom_schedule(4, 0.5, 1.0, Variant::Baseline, 1.0, 1.0)),
               InvalidConfiguration);
}

TEST(RunBaseline, NeverViolatedMatchesFastPath) {
  const long T = 6;
  const Environment env =
      make_env({vec({1, 0.2}), vec({-0.3, 0.5}), vec({0.8, -0.1}), vec({0.4, 0.4}), vec({-1, 0}),
                vec({0.2, 0.9})},
               never_violated(2, T), FeasibleSet::cube(2, 1.0), vec({0, 0}));
  const auto s = make_schedule(T, 0.5, Variant::Baseline, 1.0, env.F);
  const RunTrace tr = run_baseline(env, s);
  for (long t = 0; t < T; ++t) {
    const auto i = static_cast<std::size_t>(t);
    EXPECT_EQ(tr.q[i], Vector::Zero(1));
    const Vector next = i + 1 < tr.x.size() ? tr.x[i + 1] : tr.x_final;
    const Vector fast = env.set.project(tr.x[i] - 0.5 * s.eta * env.costs[i]);
    EXPECT_LE((next - fast).norm(), 1e-15);
  }
  EXPECT_EQ(tr.unverified_steps, 0);
}

TEST(RunBaseline, TwoStepReplayAgainstGrid) {
  const auto g = ConstraintBlock::static_affine(mat(1, 1, {1}), vec({0}), 2);
  const Environment env = line_env(constant_costs(vec({1}), 2), g);
  const auto s = make_custom_schedule(2, 0.25, 1.0 / std::sqrt(0.5), Variant::Baseline, 1.0, env.F);
  const RunTrace tr = run_baseline(env, s);
  EXPECT_EQ(tr.x[0][0], 0.0);
  EXPECT_NEAR(tr.x[1][0], -0.125, 1e-12);
  EXPECT_NEAR(tr.x_final[0], -0.25, 1e-12);
  Vector q = Vector::Zero(1);
  for (long t = 1; t <= 2; ++t) {
    const auto i = static_cast<std::size_t>(t - 1);
    const Vector viol = positive_part(g.evaluate(t, tr.x[i]));
    q += s.gamma * viol;
    EXPECT_EQ(tr.q[i], q);
    EXPECT_EQ(tr.q_hat[i], Vector(q + s.gamma * viol));
    CompositeStepSpec spec{env.cost(t), tr.q_hat[i], s.eta, s.gamma, g, t, tr.x[i], env.set};
    spec.prox_weight = 2.0;
    const Vector next = t < 2 ? tr.x[i + 1] : tr.x_final;
    EXPECT_NEAR(brute_force_step(spec, 1e-4)[0], next[0], 1e-4);
  }
}

TEST(RunBaseline, ActiveConstraintReplayAgainstGrid) {
  // c pushes right into g(x) = x - 0.1 > 0; the queue must grow and pull back.
  const long T = 8;
  const auto g = ConstraintBlock::static_affine(mat(1, 1, {1}), vec({0.1}), T);
  const Environment env = line_env(constant_costs(vec({-1}), T), g);
  const auto s = make_schedule(T, 0.5, Variant::Baseline, 1.0, env.F);
  const RunTrace tr = run_baseline(env, s);
  EXPECT_GT(tr.q.back()[0], 0.0);
  for (long t = 1; t <= T; ++t) {
    const auto i = static_cast<std::size_t>(t - 1);
    CompositeStepSpec spec{env.cost(t), tr.q_hat[i], s.eta, s.gamma, g, t, tr.x[i], env.set};
    spec.prox_weight = 2.0;
    const Vector next = t < T ? tr.x[i + 1] : tr.x_final;
    EXPECT_NEAR(brute_force_step(spec, 1e-5)[0], next[0], 2e-5);
  }
  EXPECT_TRUE(check_queue_replay(tr));
}

TEST(RunBaseline, ZeroGainIgnoresConstraints) {
  const long T = 4;
  const auto g = ConstraintBlock::static_affine(mat(1, 1, {1}), vec({-0.5}), T);
  const Environment env = line_env(constant_costs(vec({-1}), T), g, -0.9);
  const RunTrace tr = run_baseline(env, make_custom_schedule(T, 0.5, 0.0, Variant::Baseline, 1.0, 2.0));
  const double expected[] = {0.0, 0.25, 0.5, 0.75};
  for (int t = 0; t < T; ++t) EXPECT_NEAR(tr.x[static_cast<std::size_t>(t)][0], expected[t], 1e-15);
  EXPECT_NEAR(tr.x_final[0], 1.0, 1e-15);
  EXPECT_GT(violation(tr), 0.0);
  EXPECT_EQ(tr.q.back()[0], 0.0);
}

TEST(RunBaseline, RejectsTimeVaryingConstraints) {
  const auto g = ConstraintBlock::time_varying({mat(1, 1, {1}), mat(1, 1, {1})}, {vec({1}), vec({1})});
  const Environment env = line_env(constant_costs(vec({1}), 2), g);
  EXPECT_THROW(run_baseline(env, make_schedule(2, 0.5, Variant::Baseline, 1.0, 1.0)),
               InvalidConfiguration);
}

TEST(RunPredictive, PerfectHintsOnConstantSequence) {
  const long T = 3;
  const Vector c = vec({1, 0.5});
  const Environment env =
      make_env(constant_costs(c, T), never_violated(2, T), FeasibleSet::cube(2, 1.0), vec({0, 0}), 2.0);
  const auto s = make_custom_schedule(T, 0.3, 1.0 / (2.0 * std::sqrt(0.3)), Variant::Predictive, 2.0, env.F);
  const Predictor perfect({PredictorKind::Perfect}, T, 2.0);
  const RunTrace tr = run_predictive(env, perfect, s);
  // z_{t+1} = P(z_t - eta c), x_{t+1} = P(z_{t+1} - eta c).
  const Vector zs[] = {vec({0, 0}), vec({-0.3, -0.15}), vec({-0.6, -0.3})};
  const Vector xs[] = {vec({0, 0}), vec({-0.6, -0.3}), vec({-0.9, -0.45})};
  for (int t = 0; t < T; ++t) {
    EXPECT_LE((tr.z[static_cast<std::size_t>(t)] - zs[t]).norm(), 1e-15);
    EXPECT_LE((tr.x[static_cast<std::size_t>(t)] - xs[t]).norm(), 1e-15);
  }
  EXPECT_LE((tr.z_final - vec({-0.9, -0.45})).norm(), 1e-15);
  EXPECT_LE((tr.x_final - vec({-1, -0.6})).norm(), 1e-15);
  EXPECT_EQ(tr.h[0], Vector::Zero(2));
  EXPECT_EQ(tr.h[1], c);
}

TEST(RunPredictive, ZeroHintsPlayTheAnchor) {
  const long T = 10;
  std::vector<Vector> costs;
  for (long t = 0; t < T; ++t) costs.push_back(vec({std::sin(t * 1.0), std::cos(t * 0.7)}));
  const Environment env =
      make_env(costs, never_violated(2, T), FeasibleSet::ball(Vector::Zero(2), 1.0), vec({0, 0}));
  const RunTrace tr = run_predictive(env, Predictor({PredictorKind::Zero}, T, 1.0),
                                     make_schedule(T, 0.5, Variant::Predictive, 1.0, env.F));
  for (long t = 0; t < T; ++t) {
    const auto i = static_cast<std::size_t>(t);
    EXPECT_EQ(tr.x[i], tr.z[i]);
  }
  EXPECT_EQ(tr.x_final, tr.z_final);
}

TEST(RunPredictive, TwoStepReplayAgainstGrid) {
  const long T = 2;
  const auto g = ConstraintBlock::static_affine(mat(1, 1, {1}), vec({0.5}), T);
  const Environment env = line_env({vec({1}), vec({-1})}, g);
  const auto s = make_schedule(T, 0.5, Variant::Predictive, 1.0, env.F);
  const RunTrace tr = run_predictive(env, Predictor({PredictorKind::Perfect}, T, 1.0), s);
  EXPECT_EQ(tr.h[1], vec({-1}));
  EXPECT_EQ(tr.q_hat_init, Vector::Zero(1));
  const double eta = s.eta;
  EXPECT_NEAR(tr.z[1][0], -eta, 1e-12);
  EXPECT_NEAR(tr.x[1][0], 0.0, 1e-12);
  EXPECT_NEAR(tr.z_final[0], 0.0, 1e-12);
  EXPECT_NEAR(tr.x_final[0], eta, 1e-12);

  for (long t = 1; t <= T; ++t) {
    const auto i = static_cast<std::size_t>(t - 1);
    const Vector& qhat_prev = i == 0 ? tr.q_hat_init : tr.q_hat[i - 1];
    const Vector z_next = t < T ? tr.z[i + 1] : tr.z_final;
    const Vector x_next = t < T ? tr.x[i + 1] : tr.x_final;
    const CompositeStepSpec zs{env.cost(t), qhat_prev, eta, s.gamma, g, t, tr.z[i], env.set};
    EXPECT_NEAR(brute_force_step(zs, 1e-4)[0], z_next[0], 1e-4);
    const Vector h_next = t < T ? tr.h[i + 1] : tr.h[i];
    const CompositeStepSpec xs{h_next, tr.q_hat[i], eta, s.gamma, g, std::min(t + 1, T), z_next, env.set};
    EXPECT_NEAR(brute_force_step(xs, 1e-4)[0], x_next[0], 1e-4);
  }
}

TEST(RunPredictive, ActiveConstraintReplayAgainstGrid) {
  const long T = 12;
  const auto g = ConstraintBlock::static_affine(mat(1, 1, {1}), vec({0.2}), T);
  const Environment env = line_env(constant_costs(vec({-1}), T), g);
  const auto s = make_schedule(T, 0.5, Variant::Predictive, 1.0, env.F);
  const RunTrace tr = run_predictive(env, Predictor({PredictorKind::LastValue}, T, 1.0), s);
  EXPECT_GT(tr.q.back()[0], 0.0);
  for (long t = 1; t <= T; ++t) {
    const auto i = static_cast<std::size_t>(t - 1);
    const Vector& qhat_prev = i == 0 ? tr.q_hat_init : tr.q_hat[i - 1];
    const Vector z_next = t < T ? tr.z[i + 1] : tr.z_final;
    const Vector x_next = t < T ? tr.x[i + 1] : tr.x_final;
    const CompositeStepSpec zs{env.cost(t), qhat_prev, s.eta, s.gamma, g, t, tr.z[i], env.set};
    EXPECT_NEAR(brute_force_step(zs, 1e-5)[0], z_next[0], 2e-5);
    const Vector expected_qhat = tr.q[i] + s.gamma * positive_part(g.evaluate(t, z_next));
    EXPECT_EQ(tr.q_hat[i], expected_qhat);
    const Vector h_next = t < T ? tr.h[i + 1] : tr.h[i];
    const CompositeStepSpec xs{h_next, tr.q_hat[i], s.eta, s.gamma, g, std::min(t + 1, T), z_next, env.set};
    EXPECT_NEAR(brute_force_step(xs, 1e-5)[0], x_next[0], 2e-5);
  }
}

TEST(RunPredictive, RejectsPredictorHorizonMismatch) {
  const Environment env = line_env(constant_costs(vec({1}), 3), never_violated(1, 3));
  EXPECT_THROW(run_predictive(env, Predictor({PredictorKind::Zero}, 4, 1.0),
                              make_schedule(3, 0.5, Variant::Predictive, 1.0, 1.0)),
               InvalidConfiguration);
}

TEST(Engines, TracesAreDeterministicAndReplayable) {
  EnvironmentSpec es;
  es.p = 3;
  es.m = 2;
  es.T = 200;
  es.cost.sigma = 0.5;
  es.constraints.kind = ConstraintKind::TimeVaryingAffine;
  es.seed = 11;
  const Environment env = generate_environment(es);
  const Predictor pred({PredictorKind::OracleDecay, 0.5, std::nullopt, 3}, es.T, env.G);
  const auto s = make_schedule(es.T, 0.5, Variant::Predictive, env.G, env.F, 0.5);
  const RunTrace a = run_predictive(env, pred, s);
  const RunTrace b = run_predictive(generate_environment(es), pred, s);
  expect_same_trace(a, b);
  EXPECT_TRUE(check_queue_replay(a));
  EXPECT_EQ(a.unverified_steps, 0);
  EXPECT_EQ(a.solver_calls, 2 * es.T);

  es.constraints.kind = ConstraintKind::StaticAffine;
  const Environment senv = generate_environment(es);
  const auto bs = make_schedule(es.T, 0.5, Variant::Baseline, senv.G, senv.F);
  const RunTrace c = run_baseline(senv, bs);
  expect_same_trace(c, run_baseline(senv, bs));
  EXPECT_TRUE(check_queue_replay(c));
  const RunTrace o = run_ogd(senv, bs);
  expect_same_trace(o, run_ogd(senv, bs));
  EXPECT_TRUE(check_queue_replay(o));
}

TEST(Engines, IteratesStayInX) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    EnvironmentSpec es;
    es.p = 4;
    es.m = 3;
    es.T = 100;
    es.set.kind = seed % 2 ? SetKind::Ball : SetKind::Box;
    es.seed = seed;
    const Environment env = generate_environment(es);
    const RunTrace tr = run_predictive(env, Predictor({PredictorKind::LastValue}, es.T, env.G),
                                       make_schedule(es.T, 0.4, Variant::Predictive, env.G, env.F));
    for (std::size_t i = 0; i < tr.x.size(); ++i) {
      EXPECT_TRUE(env.set.contains(tr.x[i]));
      EXPECT_TRUE(env.set.contains(tr.z[i]));
      EXPECT_TRUE((tr.q_hat[i].array() >= tr.q[i].array()).all());
    }
  }
}
