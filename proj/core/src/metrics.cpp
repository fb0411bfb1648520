#include "ltoco/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ltoco/errors.hpp"
#include "ltoco/geometry.hpp"

namespace ltoco {

double regret(const RunTrace& trace, const Vector& x_star) {
  double played = 0.0;
  Vector s = Vector::Zero(trace.p);
  for (long t = 0; t < trace.T; ++t) {
    played += trace.cost[static_cast<std::size_t>(t)];
    s += trace.c[static_cast<std::size_t>(t)];
  }
  return played - s.dot(x_star);
}

double regret(const RunTrace& trace, const Comparator& comp) { return regret(trace, comp.x_star); }

double violation(const RunTrace& trace) {
  double total = 0.0;
  for (const Vector& v : trace.violation) total += v.sum();
  return total;
}

QueueIdentityReport check_queue_identity(const RunTrace& trace) {
  const double gamma = trace.schedule.gamma;
  if (!(gamma > 0.0)) throw InvalidInput("queue identity needs gamma > 0");
  if (trace.q.empty()) throw InvalidInput("trace has no queue series");
  QueueIdentityReport r;
  r.violation = violation(trace);
  r.queue_norm = trace.q.back().lpNorm<1>();
  r.residual = std::abs(r.violation - r.queue_norm / gamma);
  r.passed = r.residual <= 1e-9 * std::max(1.0, r.violation);
  return r;
}

bool check_queue_replay(const RunTrace& trace) {
  if (trace.q.size() != static_cast<std::size_t>(trace.T) ||
      trace.violation.size() != trace.q.size()) {
    return false;
  }
  Vector q = Vector::Zero(trace.m);
  for (std::size_t t = 0; t < trace.q.size(); ++t) {
    q += trace.schedule.gamma * trace.violation[t];
    if (q.size() != trace.q[t].size() || !(q.array() == trace.q[t].array()).all()) return false;
  }
  return true;
}

Lemma1Report check_lemma1(const RunTrace& trace, const Environment& env, const Comparator& comp,
                          bool prefix_mode) {
  if (!trace.has_z() || trace.z.size() != static_cast<std::size_t>(trace.T) ||
      trace.h.size() != trace.z.size() || trace.z_final.size() == 0) {
    throw InvalidInput("lemma check needs a predictive trace with z and h series");
  }
  const Regularizer R;
  const double eta = trace.schedule.eta;
  const double gamma = trace.schedule.gamma;
  const double G = trace.schedule.G;
  const double tol = trace.max_step_tol();
  const Vector& xs = comp.x_star;

  // Running sums of every term.
  double err = 0.0, tele = 0.0, dxz = 0.0, queue_x = 0.0, queue_star = 0.0, cross = 0.0, reg = 0.0;
  Vector q_prev = Vector::Zero(trace.m);
  Vector qh_prev = trace.q_hat_init;

  Lemma1Report r;
  r.worst_prefix_margin1 = std::numeric_limits<double>::infinity();
  r.worst_prefix_margin2 = std::numeric_limits<double>::infinity();
  for (long t = 1; t <= trace.T; ++t) {
    const auto i = static_cast<std::size_t>(t - 1);
    const Vector& x = trace.x[i];
    const Vector& z = trace.z[i];
    const Vector& z_next = t < trace.T ? trace.z[i + 1] : trace.z_final;
    const Vector& viol = trace.violation[i];
    err += (trace.c[i] - trace.h[i]).squaredNorm();
    tele += R.divergence(z, xs) - R.divergence(xs, z_next);
    dxz += R.divergence(x, z);
    queue_x += q_prev.dot(viol);
    queue_star += qh_prev.dot(positive_part(env.constraints.evaluate(t, xs)));
    cross += positive_part(env.constraints.evaluate(t, z)).dot(viol);
    reg += trace.c[i].dot(x - xs);

    const double lhs1 = gamma * queue_x + reg;
    const double rhs1 = 0.5 * eta * err + tele / eta - dxz / eta + gamma * queue_star -
                        gamma * gamma * cross;
    const double lhs2 = 0.5 * trace.q[i].squaredNorm();
    const double rhs2 = 0.5 * eta * err + gamma * queue_star - reg + tele / eta +
                        (gamma * gamma * G * G - 1.0 / eta) * dxz;
    if (prefix_mode) {
      const double allowed = static_cast<double>(t) * tol;
      const double m1 = rhs1 - lhs1 + allowed;
      const double m2 = rhs2 - lhs2 + allowed;
      if (std::min(m1, m2) < std::min(r.worst_prefix_margin1, r.worst_prefix_margin2)) {
        r.worst_prefix_step = t;
      }
      r.worst_prefix_margin1 = std::min(r.worst_prefix_margin1, m1);
      r.worst_prefix_margin2 = std::min(r.worst_prefix_margin2, m2);
    }
    if (t == trace.T) {
      r.lhs1 = lhs1;
      r.rhs1 = rhs1;
      r.lhs2 = lhs2;
      r.rhs2 = rhs2;
    }
    q_prev = trace.q[i];
    qh_prev = trace.q_hat[i];
  }
  r.slack1 = r.rhs1 - r.lhs1;
  r.slack2 = r.rhs2 - r.lhs2;
  r.allowed = trace.tolerance_slack();
  r.passed = r.slack1 >= -r.allowed && r.slack2 >= -r.allowed;
  if (prefix_mode) {
    r.passed = r.passed && r.worst_prefix_margin1 >= 0.0 && r.worst_prefix_margin2 >= 0.0;
  } else {
    r.worst_prefix_margin1 = r.worst_prefix_margin2 = 0.0;
  }
  return r;
}

Theorem3Report check_theorem3_bounds(const RunTrace& trace, const Environment& env,
                                     const Comparator& comp) {
  const ScheduleParams& s = trace.schedule;
  if (trace.algorithm != Algorithm::Predictive || !trace.has_z()) {
    throw InvalidInput("theorem check needs a predictive trace");
  }
  if (s.coupling_residual() > 1e-12) {
    throw InvalidConfiguration("schedule does not satisfy gamma^2 G^2 eta = 1");
  }
  Theorem3Report r;
  r.comparator_violation = max_constraint_value(env, comp.x_star);
  if (r.comparator_violation > 0.0) {
    throw InvalidConfiguration("comparator is not feasible for every step");
  }
  const Regularizer R;
  for (long t = 0; t < trace.T; ++t) {
    const auto i = static_cast<std::size_t>(t);
    r.hint_error_sq += (trace.c[i] - trace.h[i]).squaredNorm();
    r.realized_F = std::max(r.realized_F, std::abs(trace.cost[i]));
  }
  const double T = static_cast<double>(trace.T);
  const double tol_slack = trace.tolerance_slack();
  r.regret = regret(trace, comp);
  r.violation = violation(trace);
  r.divergence = R.divergence(trace.z.front(), comp.x_star);
  r.declared_F = env.F;
  r.rhs_regret = 0.5 * s.eta * r.hint_error_sq + r.divergence / s.eta;
  r.rhs_violation = std::sqrt(r.rhs_regret + env.F * T) / s.gamma;
  r.regret_slack = r.rhs_regret + tol_slack - r.regret;
  r.violation_slack = std::sqrt(r.rhs_regret + env.F * T + tol_slack) / s.gamma - r.violation;
  r.regret_ok = r.regret_slack >= 0.0;
  r.violation_ok = r.violation_slack >= 0.0;
  r.passed = r.regret_ok && r.violation_ok;
  return r;
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) throw InvalidInput("rate fit needs at least two points");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].second > 0.0) || !std::isfinite(points[i].second)) {
      throw InvalidInput("rate fit needs positive values");
    }
    if (!(points[i].first > 0.0)) throw InvalidInput("rate fit needs positive T");
    if (i > 0 && !(points[i].first > points[i - 1].first)) {
      throw InvalidInput("rate fit needs strictly increasing T");
    }
  }
  const double n = static_cast<double>(points.size());
  double sx = 0, sy = 0;
  for (const auto& [T, v] : points) {
    sx += std::log(T);
    sy += std::log(v);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& [T, v] : points) {
    const double dx = std::log(T) - mx, dy = std::log(v) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  RateFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

}  // namespace ltoco
