#pragma once

#include "ltoco/composite_step.hpp"
#include "ltoco/environment.hpp"
#include "ltoco/predictor.hpp"
#include "ltoco/run_trace.hpp"
#include "ltoco/schedule.hpp"

namespace ltoco {

struct SolverOptions {
  InnerMethod method = InnerMethod::DualCertified;
  // Per-solve tolerance relative to objective_scale().
  double rel_tol = 1e-12;
  int max_iters = 5000;
};

// Projected OGD onto X: x_{t+1} = P_X(x_t - eta c_t), x_1 = P_X(0). The
// queue series are still filled (with the schedule's gamma) so every trace
// supports the same metrics.
RunTrace run_ogd(const Environment& env, const ScheduleParams& schedule);

// Static constraints only. Per step:
//   q_t     = q_{t-1} + gamma [g(x_t)]_+
//   q_hat_t = q_t + gamma [g(x_t)]_+
//   x_{t+1} = argmin eta <x, c_t> + eta gamma <q_hat_t, [g(x)]_+> + ||x - x_t||^2
RunTrace run_baseline(const Environment& env, const ScheduleParams& schedule,
                      const SolverOptions& options = {});

// x_1 = z_1 = argmin_X R, q_0 = 0, q_hat_0 = gamma [g_1(z_1)]_+. Per step:
//   q_t     = q_{t-1} + gamma [g_t(x_t)]_+
//   z_{t+1} = argmin eta <z, c_t> + eta gamma <q_hat_{t-1}, [g_t(z)]_+> + D(z, z_t)
//   q_hat_t = q_t + gamma [g_{t+1}(z_{t+1})]_+
//   x_{t+1} = argmin eta <x, h_{t+1}> + eta gamma <q_hat_t, [g_{t+1}(x)]_+> + D(x, z_{t+1})
// with g_{T+1} = g_T and h_{T+1} = h_T. The predictor is never queried for
// h_1 (x_1 is fixed by the initialization), so the trace stores h_1 = 0.
RunTrace run_predictive(const Environment& env, const Predictor& predictor,
                        const ScheduleParams& schedule, const SolverOptions& options = {});

}  // namespace ltoco
