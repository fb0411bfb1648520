#pragma once

#include <cstdint>

#include "ltoco/composite_step.hpp"

namespace ltoco {

// brute_force_step followed by `levels` zooms (each re-grids a window of
// half-width 3h around the incumbent with 200 cells per axis), plus zoomed
// one-dimensional scans along every constraint line and the boundary of X and
// the stationary point of every activity pattern.
DecisionVector refined_brute_force_step(const CompositeStepSpec& spec, double resolution,
                                        int levels);

struct OracleSuiteReport {
  int instances = 0;
  int failures = 0;
  int unverified = 0;       // solver results without a certificate
  double worst_diff = 0.0;  // max |objective(solver) - objective(oracle)|
  double threshold = 0.0;
  bool passed() const noexcept { return failures == 0 && unverified == 0; }
};

// Random 1-D/2-D composite steps (box or ball X, 1-3 affine rows, random
// anchor, weights and gains) compared with the refined grid oracle.
OracleSuiteReport step_oracle_suite(int instances, std::uint64_t seed, double threshold = 1e-4);

// Random 2-D static environments with short horizons; compute_comparator()
// against grid_comparator().
OracleSuiteReport comparator_oracle_suite(int instances, std::uint64_t seed,
                                          double threshold = 1e-3);

}  // namespace ltoco
