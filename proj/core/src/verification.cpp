#include "ltoco/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "ltoco/comparator.hpp"
#include "ltoco/environment.hpp"

namespace ltoco {

namespace {

struct Incumbent {
  Vector x;
  double value = std::numeric_limits<double>::infinity();

  void offer(const CompositeStepSpec& spec, const Vector& y) {
    if (!spec.set.contains(y)) return;
    const double f = composite_objective(spec, y);
    if (f < value) {
      value = f;
      x = y;
    }
  }
};

// Best point of X on the segment x0 + s d, s in [lo, hi], by a uniform scan
// of spacing h followed by `levels` zooms of +-3h with 200 cells each.
void scan_segment(const CompositeStepSpec& spec, const Vector& x0, const Vector& d, double lo,
                  double hi, double h, int levels, Incumbent& best) {
  if (!(hi >= lo)) return;
  Incumbent local;
  double s_best = lo;
  auto sweep = [&](double a, double b, double step) {
    const long n = std::max(1L, static_cast<long>(std::ceil((b - a) / step)));
    for (long i = 0; i <= n; ++i) {
      const double s = a + (b - a) * static_cast<double>(i) / static_cast<double>(n);
      const double before = local.value;
      local.offer(spec, x0 + s * d);
      if (local.value < before) s_best = s;
    }
  };
  sweep(lo, hi, h);
  for (int k = 0; k < levels && std::isfinite(local.value); ++k) {
    const double a = std::max(lo, s_best - 3.0 * h), b = std::min(hi, s_best + 3.0 * h);
    h = 6.0 * h / 200.0;
    sweep(a, b, h);
  }
  if (std::isfinite(local.value)) best.offer(spec, local.x);
}

// Parameter range of x0 + s d inside the box [lo, hi].
bool clip_to_box(const Vector& x0, const Vector& d, const Box& box, double& s_lo, double& s_hi) {
  s_lo = -std::numeric_limits<double>::infinity();
  s_hi = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < x0.size(); ++i) {
    if (d[i] == 0.0) {
      if (x0[i] < box.lower[i] || x0[i] > box.upper[i]) return false;
      continue;
    }
    double a = (box.lower[i] - x0[i]) / d[i], b = (box.upper[i] - x0[i]) / d[i];
    if (a > b) std::swap(a, b);
    s_lo = std::max(s_lo, a);
    s_hi = std::min(s_hi, b);
  }
  return s_lo <= s_hi;
}

}  // namespace

DecisionVector refined_brute_force_step(const CompositeStepSpec& spec, double resolution,
                                        int levels) {
  const Index p = spec.set.dim();
  const Matrix& A = spec.constraints.matrix(spec.step);
  const Vector& b = spec.constraints.offset(spec.step);
  const Index m = A.rows();

  Incumbent best;
  best.offer(spec, brute_force_step(spec, resolution).coords());
  double h = resolution;
  for (int k = 0; k < levels; ++k) {
    const Vector r = Vector::Constant(p, 3.0 * h);
    h = 6.0 * h / 200.0;
    best.offer(spec, brute_force_step(spec, h, Box{best.x - r, best.x + r}).coords());
  }

  // The objective is a quadratic on each cell of the arrangement cut out by
  // the rows with positive weight; its minimizer is either a stationary point
  // of one cell or lies on a constraint line or on the boundary of X.
  const double scale = spec.eta / spec.prox_weight;
  for (unsigned mask = 0; m <= 16 && mask < (1u << m); ++mask) {
    Vector grad = spec.v;
    for (Index j = 0; j < m; ++j) {
      if (mask & (1u << j)) grad += spec.gamma * spec.w[j] * A.row(j).transpose();
    }
    best.offer(spec, spec.anchor - scale * grad);
  }

  const Box bb = spec.set.bounding_box();
  if (p == 1) {
    for (Index j = 0; j < m; ++j) {
      if (A(j, 0) != 0.0) best.offer(spec, Vector::Constant(1, b[j] / A(j, 0)));
    }
    best.offer(spec, bb.lower);
    best.offer(spec, bb.upper);
    return DecisionVector(best.x);
  }
  if (p != 2) return DecisionVector(best.x);

  for (Index j = 0; j < m; ++j) {
    const Vector a = A.row(j).transpose();
    const double n = a.norm();
    if (n == 0.0) continue;
    const Vector x0 = a * (b[j] / (n * n));
    Vector d(2);
    d << -a[1] / n, a[0] / n;
    double lo = 0.0, hi = 0.0;
    if (clip_to_box(x0, d, bb, lo, hi)) scan_segment(spec, x0, d, lo, hi, resolution, levels, best);
  }
  if (spec.set.is_box()) {
    for (int axis = 0; axis < 2; ++axis) {
      for (double side : {bb.lower[axis], bb.upper[axis]}) {
        Vector x0 = bb.lower;
        x0[axis] = side;
        Vector d = Vector::Zero(2);
        d[1 - axis] = 1.0;
        scan_segment(spec, x0, d, 0.0, bb.upper[1 - axis] - bb.lower[1 - axis], resolution, levels, best);
      }
    }
  } else {
    // Arc-length scan of the circle, zoomed in angle.
    const Ball& ball = spec.set.as_ball();
    const double rad = ball.radius * (1.0 - 1e-15);
    auto at = [&](double th) { return Vector(ball.center + rad * Vector((Vector(2) << std::cos(th), std::sin(th)).finished())); };
    Incumbent local;
    double th_best = 0.0, dth = resolution / ball.radius;
    auto sweep = [&](double a, double c, double step) {
      const long n = std::max(1L, static_cast<long>(std::ceil((c - a) / step)));
      for (long i = 0; i <= n; ++i) {
        const double th = a + (c - a) * static_cast<double>(i) / static_cast<double>(n);
        const double before = local.value;
        local.offer(spec, at(th));
        if (local.value < before) th_best = th;
      }
    };
    sweep(0.0, 2.0 * std::numbers::pi, dth);
    for (int k = 0; k < levels; ++k) {
      const double a = th_best - 3.0 * dth, c = th_best + 3.0 * dth;
      dth = 6.0 * dth / 200.0;
      sweep(a, c, dth);
    }
    if (std::isfinite(local.value)) best.offer(spec, local.x);
  }
  return DecisionVector(best.x);
}

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Vector gaussian(std::mt19937_64& rng, Index p) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(p);
  for (Index i = 0; i < p; ++i) v[i] = normal(rng);
  return v;
}

}  // namespace

OracleSuiteReport step_oracle_suite(int instances, std::uint64_t seed, double threshold) {
  OracleSuiteReport rep;
  rep.threshold = threshold;
  std::mt19937_64 rng(mix_seed(seed, 11));
  for (int k = 0; k < instances; ++k) {
    const Index p = 1 + (k % 2);
    const Index m = 1 + static_cast<Index>(rng() % 3);
    const FeasibleSet set = (rng() % 2 == 0) ? FeasibleSet::cube(p, uniform(rng, 0.5, 2.0))
                                             : FeasibleSet::ball(Vector::Zero(p), uniform(rng, 0.5, 2.0));
    Matrix A(m, p);
    for (Index j = 0; j < m; ++j) A.row(j) = gaussian(rng, p).transpose();
    Vector b(m);
    for (Index j = 0; j < m; ++j) b[j] = uniform(rng, -0.5, 0.5);
    const ConstraintBlock g = ConstraintBlock::static_affine(A, b, 1);
    Vector w(m);
    for (Index j = 0; j < m; ++j) w[j] = (rng() % 4 == 0) ? 0.0 : uniform(rng, 0.0, 3.0);
    Vector anchor = set.sample(rng);
    CompositeStepSpec spec{gaussian(rng, p), w, uniform(rng, 0.05, 1.5), uniform(rng, 0.0, 4.0),
                           g, 1, anchor, set};
    spec.prox_weight = (rng() % 3 == 0) ? 2.0 : 1.0;
    spec.tol = 1e-12 * objective_scale(spec, 1.0);
    spec.max_iters = 5000;

    const StepResult r = solve_composite_step(spec);
    const DecisionVector oracle = refined_brute_force_step(spec, p == 1 ? 1e-4 : 1e-3, 4);
    const double diff = std::abs(r.objective - composite_objective(spec, oracle));
    ++rep.instances;
    if (!r.verified) ++rep.unverified;
    if (!(diff <= threshold)) ++rep.failures;
    rep.worst_diff = std::max(rep.worst_diff, diff);
  }
  return rep;
}

OracleSuiteReport comparator_oracle_suite(int instances, std::uint64_t seed, double threshold) {
  OracleSuiteReport rep;
  rep.threshold = threshold;
  for (int k = 0; k < instances; ++k) {
    EnvironmentSpec es;
    es.p = 2;
    es.m = 1 + k % 3;
    es.T = 20;
    es.cost.kind = CostKind::IidRandom;
    es.cost.sigma = 0.5;
    es.cost.bias = 0.5;
    es.constraints.margin = 0.05 + 0.05 * (k % 4);
    es.set.kind = (k % 5 == 4) ? SetKind::Ball : SetKind::Box;
    es.seed = mix_seed(seed, static_cast<std::uint64_t>(k));
    const Environment env = generate_environment(es);
    const Comparator comp = compute_comparator(env);
    const Comparator grid = grid_comparator(env, 1e-3, 3);
    const double diff = std::abs(comp.objective - grid.objective);
    ++rep.instances;
    if (!(diff <= threshold)) ++rep.failures;
    rep.worst_diff = std::max(rep.worst_diff, diff);
  }
  return rep;
}

}  // namespace ltoco
