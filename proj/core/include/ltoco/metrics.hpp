#pragma once

#include <utility>
#include <vector>

#include "ltoco/comparator.hpp"
#include "ltoco/environment.hpp"
#include "ltoco/run_trace.hpp"

namespace ltoco {

// sum_t <c_t, x_t> - sum_t <c_t, x_star>; either sign.
double regret(const RunTrace& trace, const Comparator& comp);
double regret(const RunTrace& trace, const Vector& x_star);

// C_T = sum_t ||[g_t(x_t)]_+||_1
double violation(const RunTrace& trace);

struct QueueIdentityReport {
  double violation = 0.0;   // C_T
  double queue_norm = 0.0;  // ||q_T||_1
  double residual = 0.0;    // |C_T - ||q_T||_1 / gamma|
  bool passed = false;
};

// Requires gamma > 0. Passes iff residual <= 1e-9 max(1, C_T).
QueueIdentityReport check_queue_identity(const RunTrace& trace);

// Recomputes q_t = q_{t-1} + gamma [g_t(x_t)]_+ from the stored violations and
// compares with the stored q_t bit for bit.
bool check_queue_replay(const RunTrace& trace);

struct Lemma1Report {
  double lhs1 = 0.0, rhs1 = 0.0, slack1 = 0.0;
  double lhs2 = 0.0, rhs2 = 0.0, slack2 = 0.0;
  double allowed = 0.0;  // T * tol_solver
  // With prefix checking: the smallest slack over t = 1..T, each compared
  // with t * tol_solver, and the step where it occurred.
  double worst_prefix_margin1 = 0.0;
  double worst_prefix_margin2 = 0.0;
  long worst_prefix_step = 0;
  bool passed = false;
};

// Both cumulative inequalities for the predictive engine, with x* the
// comparator and every term evaluated from the trace:
//
//   gamma sum <q_{t-1}, [g_t(x_t)]_+> + R_T
//     <= (eta/2) sum ||c_t - h_t||^2 + (1/eta) sum (D(z_t, x*) - D(x*, z_{t+1}))
//        - (1/eta) sum D(x_t, z_t) + gamma sum <q_hat_{t-1}, [g_t(x*)]_+>
//        - gamma^2 sum <[g_t(z_t)]_+, [g_t(x_t)]_+>
//
//   0.5 ||q_T||^2
//     <= (eta/2) sum ||c_t - h_t||^2 + gamma sum <q_hat_{t-1}, [g_t(x*)]_+> - R_T
//        + (1/eta) sum (D(z_t, x*) - D(x*, z_{t+1}))
//        + (gamma^2 G^2 - 1/eta) sum D(x_t, z_t)
//
// Slack = RHS - LHS; passes iff both slacks >= -T tol_solver (and, in prefix
// mode, every prefix slack >= -t tol_solver). Throws InvalidInput for traces
// without a z series.
Lemma1Report check_lemma1(const RunTrace& trace, const Environment& env, const Comparator& comp,
                          bool prefix_mode = false);

struct Theorem3Report {
  double regret = 0.0;
  double violation = 0.0;
  double hint_error_sq = 0.0;   // sum_t ||c_t - h_t||^2
  double divergence = 0.0;      // D(z_1, x*)
  double rhs_regret = 0.0;      // (eta/2) hint_error_sq + divergence / eta
  double rhs_violation = 0.0;   // (1/gamma) sqrt(rhs_regret + F T)
  double regret_slack = 0.0;    // rhs_regret + T tol - regret
  double violation_slack = 0.0; // (1/gamma) sqrt(rhs_regret + F T + T tol) - violation
  double declared_F = 0.0;
  double realized_F = 0.0;      // max_t |f_t(x_t)|
  double comparator_violation = 0.0;
  bool regret_ok = false;
  bool violation_ok = false;
  bool passed = false;
};

// Throws InvalidConfiguration unless gamma^2 G^2 eta = 1 (to 1e-12) and the
// comparator is feasible for every g_t.
Theorem3Report check_theorem3_bounds(const RunTrace& trace, const Environment& env,
                                     const Comparator& comp);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Least-squares fit of log(value) against log(T). Needs >= 2 points with
// strictly increasing T and positive values.
RateFit fit_rate(const std::vector<std::pair<double, double>>& points);

}  // namespace ltoco
