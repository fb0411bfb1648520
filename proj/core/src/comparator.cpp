#include "ltoco/comparator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "ltoco/composite_step.hpp"
#include "ltoco/errors.hpp"

namespace ltoco {

namespace {

struct StackedRows {
  Matrix A;
  Vector b;
};

StackedRows stack_rows(const ConstraintBlock& g) {
  const long steps = g.is_static() ? 1 : g.horizon();
  const Index m = g.num_constraints();
  StackedRows s{Matrix(steps * m, g.dim()), Vector(steps * m)};
  for (long t = 1; t <= steps; ++t) {
    s.A.middleRows((t - 1) * m, m) = g.matrix(t);
    s.b.segment((t - 1) * m, m) = g.offset(t);
  }
  return s;
}

Vector cost_sum(const Environment& env) {
  Vector s = Vector::Zero(env.dim());
  for (const Vector& c : env.costs) s += c;
  return s;
}

double max_value(const StackedRows& rows, const Vector& x) {
  return (rows.A * x - rows.b).maxCoeff();
}

// Adds up to `limit` of the most violated rows at x that are not yet in the
// (sorted) working set. Returns false when nothing is violated.
bool add_violated(const StackedRows& rows, const Vector& x, std::vector<Index>& working,
                  std::size_t limit) {
  const Vector g = rows.A * x - rows.b;
  std::vector<std::pair<double, Index>> hit;
  for (Index i = 0; i < g.size(); ++i) {
    if (g[i] > 0.0 && !std::binary_search(working.begin(), working.end(), i)) {
      hit.emplace_back(-g[i], i);
    }
  }
  if (hit.empty()) return false;
  const std::size_t k = std::min(limit, hit.size());
  std::partial_sort(hit.begin(), hit.begin() + static_cast<std::ptrdiff_t>(k), hit.end());
  for (std::size_t j = 0; j < k; ++j) working.push_back(hit[j].second);
  std::sort(working.begin(), working.end());
  return true;
}

Vector prox_step(const StackedRows& rows, const std::vector<Index>& idx, const FeasibleSet& set,
                 const Vector& u, double tau, double rho, const Vector& anchor) {
  const Index r = static_cast<Index>(idx.size());
  if (r == 0) return set.project(anchor - tau * u);
  Matrix A(r, rows.A.cols());
  Vector b(r);
  for (Index k = 0; k < r; ++k) {
    A.row(k) = rows.A.row(idx[static_cast<std::size_t>(k)]);
    b[k] = rows.b[idx[static_cast<std::size_t>(k)]];
  }
  const ConstraintBlock block = ConstraintBlock::static_affine(std::move(A), std::move(b), 1);
  CompositeStepSpec spec{u, Vector::Constant(r, rho), tau, 1.0, block, 1, anchor, set};
  spec.max_iters = 20000;
  spec.tol = 1e-14 * objective_scale(spec, 1.0);
  return solve_composite_step(spec).x.coords();
}

void grid_scan(const Environment& env, const StackedRows& rows, const Vector& s, const Box& window,
               double res, Comparator& best) {
  const Box bb = env.set.bounding_box();
  const Index p = env.dim();
  Vector lo = window.lower.cwiseMax(bb.lower);
  Vector hi = window.upper.cwiseMin(bb.upper);
  std::vector<long> n(static_cast<std::size_t>(p));
  for (Index i = 0; i < p; ++i) {
    n[static_cast<std::size_t>(i)] =
        std::max<long>(1, static_cast<long>(std::ceil((hi[i] - lo[i]) / res - 1e-9)));
  }
  const long n0 = n[0];
  const long n1 = p == 2 ? n[1] : 0;
  Vector x(p);
  for (long i = 0; i <= n0; ++i) {
    x[0] = lo[0] + (hi[0] - lo[0]) * static_cast<double>(i) / static_cast<double>(n0);
    for (long j = 0; j <= n1; ++j) {
      if (p == 2) x[1] = lo[1] + (hi[1] - lo[1]) * static_cast<double>(j) / static_cast<double>(n1);
      if (!env.set.contains(x)) continue;
      const double f = s.dot(x);
      if (f >= best.objective) continue;
      if (max_value(rows, x) > 0.0) continue;
      best.objective = f;
      best.x_star = x;
    }
  }
}

// One-dimensional grid along a boundary curve x(s), s in [lo, hi], followed
// by zooms around the best feasible parameter found on that curve.
template <class Curve>
void curve_scan(const Environment& env, const StackedRows& rows, const Vector& s, Curve point,
                double lo, double hi, double res, int zoom_levels, Comparator& best) {
  if (!(hi > lo)) return;
  double local = std::numeric_limits<double>::infinity();
  double arg = lo;
  auto scan = [&](double a, double b, long n) {
    for (long i = 0; i <= n; ++i) {
      const double u = a + (b - a) * static_cast<double>(i) / static_cast<double>(n);
      const Vector x = point(u);
      if (!env.set.contains(x) || max_value(rows, x) > 0.0) continue;
      const double f = s.dot(x);
      if (f < local) {
        local = f;
        arg = u;
      }
      if (f < best.objective) {
        best.objective = f;
        best.x_star = x;
      }
    }
  };
  scan(lo, hi, std::max<long>(1, static_cast<long>(std::ceil((hi - lo) / res))));
  if (!std::isfinite(local)) return;
  double h = res;
  for (int level = 0; level < zoom_levels; ++level) {
    const double a = std::max(lo, arg - 2.0 * h);
    const double b = std::min(hi, arg + 2.0 * h);
    h = 4.0 * h / 200.0;
    scan(a, b, 200);
  }
}

// Parameter range of {x0 + u d} inside the box.
std::pair<double, double> clip_line(const Vector& x0, const Vector& d, const Box& box) {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < x0.size(); ++i) {
    if (d[i] == 0.0) {
      if (x0[i] < box.lower[i] || x0[i] > box.upper[i]) return {1.0, 0.0};
      continue;
    }
    double a = (box.lower[i] - x0[i]) / d[i];
    double b = (box.upper[i] - x0[i]) / d[i];
    if (a > b) std::swap(a, b);
    lo = std::max(lo, a);
    hi = std::min(hi, b);
  }
  return {lo, hi};
}

// The minimum of a linear objective over a convex polygon-like region lies on
// its boundary, which is covered by the constraint lines and the boundary of
// X. Scanning those curves finely removes the area grid's blind spots near
// thin corners.
void boundary_scan(const Environment& env, const StackedRows& rows, const Vector& s, double res,
                   int zoom_levels, Comparator& best) {
  const Box bb = env.set.bounding_box();
  auto along = [&](const Vector& x0, const Vector& d) {
    const auto [lo, hi] = clip_line(x0, d, bb);
    curve_scan(env, rows, s, [&](double u) { return Vector(x0 + u * d); }, lo, hi, res,
               zoom_levels, best);
  };
  if (env.dim() == 1) {
    Vector d = Vector::Ones(1);
    for (Index i = 0; i < rows.A.rows(); ++i) {
      if (rows.A(i, 0) == 0.0) continue;
      Vector x(1);
      x[0] = rows.b[i] / rows.A(i, 0);
      if (env.set.contains(x) && max_value(rows, x) <= 0.0 && s.dot(x) < best.objective) {
        best.objective = s.dot(x);
        best.x_star = x;
      }
    }
    along(bb.lower, d);
    return;
  }
  for (Index i = 0; i < rows.A.rows(); ++i) {
    const Vector a = rows.A.row(i).transpose();
    const double n2 = a.squaredNorm();
    if (n2 == 0.0) continue;
    const Vector x0 = a * (rows.b[i] / n2);
    Vector d(2);
    d << -a[1], a[0];
    along(x0, d / std::sqrt(n2));
  }
  if (env.set.is_box()) {
    for (Index i = 0; i < 2; ++i) {
      Vector d = Vector::Zero(2);
      d[1 - i] = 1.0;
      for (double edge : {bb.lower[i], bb.upper[i]}) {
        Vector x0 = bb.lower;
        x0[i] = edge;
        along(x0, d);
      }
    }
  } else {
    const Ball& ball = env.set.as_ball();
    // Points slightly inside the circle so contains() accepts them.
    const double r = ball.radius * (1.0 - 1e-15);
    curve_scan(
        env, rows, s,
        [&](double u) {
          Vector x(2);
          x << ball.center[0] + r * std::cos(u), ball.center[1] + r * std::sin(u);
          return x;
        },
        0.0, 2.0 * std::numbers::pi, res / ball.radius, zoom_levels, best);
  }
}

}  // namespace

double max_constraint_value(const Environment& env, const Vector& x) {
  return max_value(stack_rows(env.constraints), x);
}

Comparator compute_comparator(const Environment& env, const ComparatorOptions& options) {
  const StackedRows rows = stack_rows(env.constraints);
  const Vector s = cost_sum(env);
  const double diam = env.set.diameter();
  const double witness_value = max_value(rows, env.witness);
  if (!(witness_value < 0.0)) {
    throw InvalidConfiguration("comparator needs a strictly feasible witness");
  }

  Comparator out;
  Vector x = env.witness;
  const double snorm = s.norm();
  if (snorm > 0.0) {
    const Vector u = s / snorm;
    const double tau = 10.0 * diam;
    const std::size_t batch = static_cast<std::size_t>(std::max<Index>(4, 2 * env.dim()));
    std::vector<Index> working;
    double rho = 1.0;
    for (int round = 0; round < options.max_penalty_rounds; ++round) {
      ++out.penalty_rounds;
      for (int k = 0; k < options.max_prox_iterations; ++k) {
        ++out.prox_iterations;
        // Rows outside the working set must not be violated at the new point
        // (a row with g <= 0 there contributes a zero subgradient), so grow
        // the set until that holds.
        Vector next = prox_step(rows, working, env.set, u, tau, rho, x);
        while (add_violated(rows, next, working, batch)) {
          next = prox_step(rows, working, env.set, u, tau, rho, x);
        }
        const double moved = (next - x).norm();
        x = std::move(next);
        if (moved <= 1e-13 * (1.0 + diam)) break;
      }
      if (max_value(rows, x) <= options.tol_feas) break;
      rho *= 10.0;
    }
  }

  double v = max_value(rows, x);
  if (v > options.tol_feas * 1e3) {
    throw InvalidConfiguration("comparator search did not reach a feasible point");
  }
  if (v > 0.0) {
    // g is affine, so g(x + theta (w - x)) <= (1 - theta) v + theta witness_value.
    // The extra 1e-12 absorbs rounding in the row evaluations.
    const double theta = std::min(1.0, (v + 1e-12) / (v - witness_value));
    x = x + theta * (env.witness - x);
    out.pulled_to_witness = true;
    v = max_value(rows, x);
  }
  if (v > 0.0) throw InvalidConfiguration("comparator could not be made feasible");

  out.x_star = x;
  out.objective = s.dot(x);
  out.max_violation = v;
  if (options.cross_validate && env.dim() <= 2) {
    out.grid_objective = grid_comparator(env, options.grid_resolution, 2).objective;
    out.cross_validated = true;
  }
  return out;
}

Comparator grid_comparator(const Environment& env, double resolution, int zoom_levels) {
  if (env.dim() > 2) throw UnsupportedDimension("grid comparator supports p <= 2 only");
  if (!(resolution > 0.0)) throw InvalidParameter("grid resolution must be > 0");
  const StackedRows rows = stack_rows(env.constraints);
  const Vector s = cost_sum(env);
  Comparator best;
  best.objective = std::numeric_limits<double>::infinity();
  grid_scan(env, rows, s, env.set.bounding_box(), resolution, best);
  boundary_scan(env, rows, s, resolution, zoom_levels, best);
  if (!std::isfinite(best.objective)) {
    throw InvalidConfiguration("grid comparator found no feasible grid point");
  }
  double res = resolution;
  for (int level = 0; level < zoom_levels; ++level) {
    const double radius = 2.0 * res;
    const Vector r = Vector::Constant(env.dim(), radius);
    res = 2.0 * radius / 200.0;
    const Vector centre = best.x_star;
    grid_scan(env, rows, s, Box{centre - r, centre + r}, res, best);
  }
  best.max_violation = max_value(rows, best.x_star);
  return best;
}

ComparatorAudit audit_comparator(const Environment& env, const Comparator& comp, int samples,
                                 std::uint64_t seed, double rel_tol) {
  const StackedRows rows = stack_rows(env.constraints);
  const Vector s = cost_sum(env);
  ComparatorAudit a;
  a.samples = samples;
  a.scale = s.norm() * env.set.diameter();
  a.worst_margin = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(mix_seed(seed, 7));
  for (int k = 0; k < samples; ++k) {
    Vector y = env.set.sample(rng);
    if (max_value(rows, y) > 0.0) {
      // Shrink toward the witness until feasible; keeps the sample inside the
      // feasible region without rejection loops.
      const double v = max_value(rows, y);
      const double wv = max_value(rows, env.witness);
      y = y + (v / (v - wv)) * (env.witness - y);
    }
    ++a.feasible_samples;
    const double margin = s.dot(y) - comp.objective;
    a.worst_margin = std::min(a.worst_margin, margin);
  }
  if (samples == 0) a.worst_margin = 0.0;
  a.passed = a.worst_margin >= -rel_tol * std::max(1.0, a.scale);
  return a;
}

}  // namespace ltoco
