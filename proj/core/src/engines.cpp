#include "ltoco/engines.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "ltoco/errors.hpp"
#include "ltoco/geometry.hpp"
#include "ltoco/queue.hpp"

namespace ltoco {

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Ogd: return "ogd";
    case Algorithm::Baseline: return "baseline";
    case Algorithm::Predictive: return "predictive";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "ogd") return Algorithm::Ogd;
  if (name == "baseline") return Algorithm::Baseline;
  if (name == "predictive") return Algorithm::Predictive;
  throw InvalidConfiguration("unknown algorithm '" + std::string(name) + "'");
}

double RunTrace::max_step_tol() const {
  double m = 0.0;
  for (double v : step_tol) m = std::max(m, v);
  return m;
}

double RunTrace::tolerance_slack() const { return static_cast<double>(T) * max_step_tol(); }

namespace {

RunTrace start_trace(Algorithm alg, const Environment& env, const ScheduleParams& schedule) {
  if (schedule.T != env.T) {
    throw InvalidConfiguration("schedule horizon " + std::to_string(schedule.T) +
                               " does not match environment horizon " + std::to_string(env.T));
  }
  RunTrace tr;
  tr.algorithm = alg;
  tr.env_id = env.id;
  tr.schedule = schedule;
  tr.T = env.T;
  tr.p = env.dim();
  tr.m = env.num_constraints();
  const auto n = static_cast<std::size_t>(env.T);
  for (auto* v : {&tr.x, &tr.c, &tr.q, &tr.q_hat, &tr.violation}) v->reserve(n);
  tr.cost.reserve(n);
  tr.step_tol.reserve(n);
  tr.step_gap.reserve(n);
  return tr;
}

// Records x_t, c_t, f_t(x_t), [g_t(x_t)]_+ and returns the violation.
const Vector& observe(RunTrace& tr, const Environment& env, long t, const Vector& x) {
  const Vector& c = env.cost(t);
  tr.x.push_back(x);
  tr.c.push_back(c);
  tr.cost.push_back(c.dot(x));
  tr.violation.push_back(positive_part(env.constraints.evaluate(t, x)));
  return tr.violation.back();
}

struct Solve {
  Vector x;
  double tol;
  double gap;
};

Solve solve(RunTrace& tr, const Environment& env, const SolverOptions& opt, Vector v, Vector w,
            const ScheduleParams& s, long step, Vector anchor, double prox_weight) {
  CompositeStepSpec spec{std::move(v), std::move(w), s.eta, s.gamma, env.constraints, step,
                         std::move(anchor), env.set, 0.0, opt.max_iters, prox_weight};
  spec.tol = opt.rel_tol * objective_scale(spec, env.F);
  StepResult r = solve_composite_step(spec, opt.method);
  ++tr.solver_calls;
  if (!r.verified) ++tr.unverified_steps;
  return {r.x.coords(), spec.tol, std::max(0.0, r.gap_bound)};
}

}  // namespace

RunTrace run_ogd(const Environment& env, const ScheduleParams& schedule) {
  RunTrace tr = start_trace(Algorithm::Ogd, env, schedule);
  Vector x = env.set.project(Vector::Zero(env.dim()));
  VirtualQueue queue(env.num_constraints());
  for (long t = 1; t <= env.T; ++t) {
    const Vector& viol = observe(tr, env, t, x);
    queue.accumulate(schedule.gamma, viol);
    queue.set_lookahead(schedule.gamma, viol);
    tr.q.push_back(queue.q());
    tr.q_hat.push_back(queue.q_hat());
    x = env.set.project(x - schedule.eta * env.cost(t));
    tr.step_tol.push_back(0.0);
    tr.step_gap.push_back(0.0);
  }
  tr.q_hat_init = Vector::Zero(env.num_constraints());
  tr.x_final = std::move(x);
  return tr;
}

RunTrace run_baseline(const Environment& env, const ScheduleParams& schedule,
                      const SolverOptions& options) {
  if (!env.constraints.is_static()) {
    throw InvalidConfiguration("baseline algorithm requires static constraints");
  }
  RunTrace tr = start_trace(Algorithm::Baseline, env, schedule);
  Vector x = regularizer_minimizer(Regularizer{}, env.set).coords();
  VirtualQueue queue(env.num_constraints());
  for (long t = 1; t <= env.T; ++t) {
    const Vector viol = observe(tr, env, t, x);
    queue.accumulate(schedule.gamma, viol);
    queue.set_lookahead(schedule.gamma, viol);
    tr.q.push_back(queue.q());
    tr.q_hat.push_back(queue.q_hat());
    Solve s = solve(tr, env, options, env.cost(t), queue.q_hat(), schedule, t, x, 2.0);
    tr.step_tol.push_back(s.tol);
    tr.step_gap.push_back(s.gap);
    x = std::move(s.x);
  }
  tr.q_hat_init = Vector::Zero(env.num_constraints());
  tr.x_final = std::move(x);
  return tr;
}

RunTrace run_predictive(const Environment& env, const Predictor& predictor,
                        const ScheduleParams& schedule, const SolverOptions& options) {
  if (predictor.horizon() != env.T) {
    throw InvalidConfiguration("predictor horizon " + std::to_string(predictor.horizon()) +
                               " does not match environment horizon " + std::to_string(env.T));
  }
  RunTrace tr = start_trace(Algorithm::Predictive, env, schedule);
  const auto n = static_cast<std::size_t>(env.T);
  tr.z.reserve(n);
  tr.h.reserve(n);
  const double gamma = schedule.gamma;

  Vector z = regularizer_minimizer(Regularizer{}, env.set).coords();
  Vector x = z;
  Vector h = Vector::Zero(env.dim());
  VirtualQueue queue(env.num_constraints());
  queue.set_lookahead(gamma, positive_part(env.constraints.evaluate(1, z)));
  tr.q_hat_init = queue.q_hat();

  for (long t = 1; t <= env.T; ++t) {
    tr.z.push_back(z);
    tr.h.push_back(h);
    const Vector viol = observe(tr, env, t, x);
    const Vector q_hat_prev = queue.q_hat();
    queue.accumulate(gamma, viol);

    Solve zs = solve(tr, env, options, env.cost(t), q_hat_prev, schedule, t, z, 1.0);
    z = std::move(zs.x);

    const long next = std::min(t + 1, env.T);
    queue.set_lookahead(gamma, positive_part(env.constraints.evaluate(next, z)));
    if (t < env.T) h = predictor.hint(env, t + 1);

    Solve xs = solve(tr, env, options, h, queue.q_hat(), schedule, next, z, 1.0);
    x = std::move(xs.x);

    tr.q.push_back(queue.q());
    tr.q_hat.push_back(queue.q_hat());
    tr.step_tol.push_back(zs.tol + xs.tol);
    tr.step_gap.push_back(zs.gap + xs.gap);
  }
  tr.x_final = std::move(x);
  tr.z_final = std::move(z);
  return tr;
}

}  // namespace ltoco
