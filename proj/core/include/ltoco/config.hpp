#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ltoco/comparator.hpp"
#include "ltoco/engines.hpp"
#include "ltoco/environment.hpp"
#include "ltoco/predictor.hpp"
#include "ltoco/run_trace.hpp"

namespace ltoco {

// Optional cross product over environment shapes; empty lists fall back to
// the single value in the environment section.
struct GridSpec {
  std::vector<int> p;
  std::vector<int> m;
  std::vector<ConstraintKind> constraint_kinds;
};

struct ChecksSpec {
  bool queue = true;
  bool lemma1 = true;
  bool theorem3 = true;
  bool lemma1_prefix = false;
  int comparator_audit_samples = 0;  // 0 disables the audit
  int step_oracle_instances = 0;     // verify only
  int comparator_oracle_instances = 0;
};

struct OutputSpec {
  std::string dir = "out";
  bool trace = false;
  bool timing = false;  // fill wall_ms; off keeps summaries byte-stable
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::vector<Algorithm> algorithms{Algorithm::Predictive};
  EnvironmentSpec environment;
  GridSpec grid;
  PredictorSpec predictor;
  double c_exp = 0.5;
  std::optional<double> a_exp;  // defaults to predictor.a_exp
  std::vector<long> horizons{100};
  std::vector<std::uint64_t> seeds{0};
  SolverOptions solver;
  ComparatorOptions comparator;
  ChecksSpec checks;
  OutputSpec output;

  double schedule_a_exp() const { return a_exp.value_or(predictor.a_exp); }
};

// Strict JSON: unknown keys, wrong types and invalid pairings are reported as
// InvalidConfiguration with the offending field path (e.g.
// "environment.cost.sigma: expected a number").
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Cross-field checks (baseline needs static constraints, strictly increasing
// horizons, ...). `sweep` additionally requires at least four horizons.
void validate_config(const ExperimentConfig& config, bool sweep = false);

}  // namespace ltoco
