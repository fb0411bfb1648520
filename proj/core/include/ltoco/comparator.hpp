#pragma once

#include <cstdint>

#include "ltoco/environment.hpp"
#include "ltoco/types.hpp"

namespace ltoco {

// Best fixed decision in hindsight over X ∩ {x : g_t(x) <= 0 for all t}.
struct Comparator {
  Vector x_star;
  double objective = 0.0;      // sum_t <c_t, x_star>
  double max_violation = 0.0;  // max_t max_j g_t^j(x_star)
  int penalty_rounds = 0;
  int prox_iterations = 0;
  bool pulled_to_witness = false;  // a final convex step toward the witness was applied
  double grid_objective = 0.0;     // set when cross-validated
  bool cross_validated = false;
};

struct ComparatorOptions {
  double tol_feas = 1e-6;
  int max_penalty_rounds = 14;
  int max_prox_iterations = 60;
  // Also run grid_comparator() for p <= 2 and store its objective.
  bool cross_validate = false;
  double grid_resolution = 1e-3;
};

// Exact-penalty proximal-point method. Each outer iteration solves
//   min_x  tau <s, x> + tau rho sum_i [a_i x - b_i]_+ + 0.5 ||x - x_k||^2
// with the composite-step solver (s the normalized cost sum), restricted to a
// working set of rows that are near-active at x_k; rows left out are checked
// afterwards and added back if violated. rho is raised tenfold until the
// maximal violation falls below tol_feas. Any remaining positive violation is
// removed by moving toward the witness, so the result is feasible for all t.
//
// Throws InvalidConfiguration if no feasible point is reached.
Comparator compute_comparator(const Environment& env, const ComparatorOptions& options = {});

// Uniform grid over X at the given resolution, plus one-dimensional grids
// along every constraint line and the boundary of X, keeping only points
// feasible for every g_t. `zoom_levels` further grids refine around the
// incumbents. Test oracle; p must be <= 2.
Comparator grid_comparator(const Environment& env, double resolution, int zoom_levels = 0);

struct ComparatorAudit {
  int samples = 0;
  int feasible_samples = 0;
  double worst_margin = 0.0;  // min over samples of sum_t <c_t, y> - objective
  double scale = 0.0;         // ||sum_t c_t||  diam(X)
  bool passed = true;
};

// Samples uniform points of X, keeps the feasible ones, and checks none beats
// the comparator by more than rel_tol * scale.
ComparatorAudit audit_comparator(const Environment& env, const Comparator& comp, int samples,
                                 std::uint64_t seed, double rel_tol = 1e-6);

// max_t max_j g_t^j(x)
double max_constraint_value(const Environment& env, const Vector& x);

}  // namespace ltoco
