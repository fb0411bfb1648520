#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ltoco/constraints.hpp"
#include "ltoco/geometry.hpp"
#include "ltoco/types.hpp"

namespace ltoco {

enum class CostKind { IidRandom, Drifting, PiecewiseConstant };
enum class SetKind { Box, Ball };

std::string_view to_string(CostKind k);
CostKind parse_cost_kind(std::string_view name);
std::string_view to_string(ConstraintKind k);
ConstraintKind parse_constraint_kind(std::string_view name);

struct CostSpec {
  CostKind kind = CostKind::IidRandom;
  // iid-random: c_t = bias * G * d + sigma * xi_t for a fixed random unit d,
  // rescaled onto the G-ball when it leaves it.
  // drifting:   c_{t+1} = G * normalize(c_t + sigma * xi_t).
  double sigma = 1.0;
  double bias = 0.0;
  // piecewise-constant: number of equal-length segments.
  int segments = 1;
};

struct ConstraintSpec {
  ConstraintKind kind = ConstraintKind::StaticAffine;
  // g_t(witness) = -margin for every row and step.
  double margin = 0.1;
  // time-varying: A_t = normalize(A_0 + jitter * N_t).
  double jitter = 0.2;
  // ||A_t||_F = strength * G, which bounds both the row norms and the
  // Lipschitz constant of g_t in l2.
  double strength = 1.0;
};

struct SetSpec {
  SetKind kind = SetKind::Box;
  double radius = 1.0;  // box [-r, r]^p or ball(0, r)
};

struct EnvironmentSpec {
  int p = 2;
  int m = 1;
  long T = 100;
  CostSpec cost;
  ConstraintSpec constraints;
  SetSpec set;
  double G = 1.0;
  // Declared bound on f_t and g_t over X; defaults to G * max_{x in X} max(||x||, ||x - witness||).
  std::optional<double> F;
  // Strictly feasible point; defaults to the origin.
  std::optional<Vector> witness;
  std::uint64_t seed = 0;
};

struct Environment {
  std::string id;
  long T = 0;
  std::vector<Vector> costs;  // c_1..c_T
  ConstraintBlock constraints;
  FeasibleSet set;
  double G = 1.0;
  double F = 1.0;
  Vector witness;

  Index dim() const { return set.dim(); }
  Index num_constraints() const { return constraints.num_constraints(); }
  const Vector& cost(long t) const { return costs.at(static_cast<std::size_t>(t - 1)); }
};

struct BoundsReport {
  double max_cost_norm = 0.0;          // max_t ||c_t||
  double max_abs_cost_value = 0.0;     // max_t sup_X |<c_t, x>|
  double max_constraint_value = 0.0;   // max_t max_j sup_X g_t^j(x)
  double max_constraint_lipschitz = 0.0;  // max_t ||A_t||_2
  double max_row_norm = 0.0;
  double max_witness_value = 0.0;      // max_t max_j g_t^j(witness)
  bool passed = true;
  long offending_step = 0;             // first failing step, 0 if none
  std::string message;
};

// Deterministic in spec.seed. Throws GenerationError if the realized
// sequences break the declared G or F, InvalidConfiguration if the witness
// is infeasible or outside X.
Environment generate_environment(const EnvironmentSpec& spec);

BoundsReport verify_bounds(const Environment& env);

// Stateless seed mixer used to derive independent streams.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace ltoco
