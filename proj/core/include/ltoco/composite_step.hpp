#pragma once

#include <optional>

#include "ltoco/constraints.hpp"
#include "ltoco/geometry.hpp"
#include "ltoco/types.hpp"

namespace ltoco {

// One proximal step shared by every engine:
//
//   minimize over x in X:
//     eta <x, v> + eta * gamma * <w, [g_t(x)]_+> + prox_weight * D_R(x, anchor)
//
// with D_R the quadratic Bregman divergence. prox_weight is 1 for the
// predictive engine and 2 for the baseline, whose proximal term is
// ||x - x_t||^2 rather than 0.5 ||x - x_t||^2.
struct CompositeStepSpec {
  Vector v;
  Vector w;  // queue weights, >= 0
  double eta = 1.0;
  double gamma = 0.0;
  const ConstraintBlock& constraints;
  long step = 1;
  Vector anchor;
  const FeasibleSet& set;
  double tol = 1e-10;  // absolute suboptimality target
  int max_iters = 2000;
  double prox_weight = 1.0;
};

enum class InnerMethod {
  // Accelerated projected ascent on the box-constrained dual with an
  // active-set polish; the duality gap certifies the tolerance.
  DualCertified,
  // Projected subgradient with 1/k steps and best-iterate tracking.
  Subgradient,
};

struct StepResult {
  DecisionVector x;
  double objective = 0.0;
  double gap_bound = 0.0;  // objective - (certified lower bound)
  bool verified = false;   // gap_bound <= tol
  bool fast_path = false;
  int iterations = 0;
};

double composite_objective(const CompositeStepSpec& spec, const Vector& x);

// eta (||v|| diam(X) + gamma ||w||_1 F) + diam(X)^2
double objective_scale(const CompositeStepSpec& spec, double F);

StepResult solve_composite_step(const CompositeStepSpec& spec,
                                InnerMethod method = InnerMethod::DualCertified);

// Exhaustive search over a uniform grid of spacing <= resolution covering X
// (intersected with `window` when given). Test oracle; p must be 1 or 2.
DecisionVector brute_force_step(const CompositeStepSpec& spec, double resolution,
                                const std::optional<Box>& window = std::nullopt);

}  // namespace ltoco
