#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ltoco/schedule.hpp"
#include "ltoco/types.hpp"

namespace ltoco {

enum class Algorithm { Ogd, Baseline, Predictive };

std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view name);

// Full per-step record of one run. Every series has exactly T entries and is
// indexed by t - 1.
struct RunTrace {
  Algorithm algorithm = Algorithm::Predictive;
  std::string env_id;
  ScheduleParams schedule;
  long T = 0;
  Index p = 0;
  Index m = 0;

  std::vector<Vector> x;  // x_t, the played decisions
  std::vector<Vector> z;  // z_t (predictive only)
  std::vector<Vector> c;  // c_t
  std::vector<Vector> h;  // h_t (predictive only; h_1 = 0, see engines.hpp)
  std::vector<Vector> q;      // q_t after the step-t update
  std::vector<Vector> q_hat;  // q_hat_t after the step-t update
  std::vector<double> cost;       // f_t(x_t)
  std::vector<Vector> violation;  // [g_t(x_t)]_+

  // Absolute solver tolerance summed over the solves performed in step t,
  // and the certified gaps achieved.
  std::vector<double> step_tol;
  std::vector<double> step_gap;

  Vector q_hat_init;  // q_hat_0
  Vector x_final;     // x_{T+1}, never played
  Vector z_final;     // z_{T+1}

  long solver_calls = 0;
  long unverified_steps = 0;  // solves that missed their tolerance

  bool has_z() const noexcept { return !z.empty(); }
  double max_step_tol() const;
  // T * max_step_tol(), the widening applied by the cumulative checks.
  double tolerance_slack() const;
};

}  // namespace ltoco
