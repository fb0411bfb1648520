#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ltoco/config.hpp"
#include "ltoco/metrics.hpp"

namespace ltoco {

// One unit of work: an algorithm on one environment shape, horizon and seed.
struct Cell {
  Algorithm algorithm = Algorithm::Predictive;
  int p = 1;
  int m = 1;
  ConstraintKind constraints = ConstraintKind::StaticAffine;
  long T = 1;
  std::uint64_t seed = 0;
  std::size_t algorithm_index = 0;
  std::size_t shape_index = 0;
};

struct CellResult {
  Cell cell;
  std::string env_id;
  ScheduleParams schedule;
  double regret = 0.0;
  double violation = 0.0;
  std::optional<QueueIdentityReport> queue;
  bool replay_ok = true;
  std::optional<Lemma1Report> lemma1;
  std::optional<Theorem3Report> theorem3;
  std::optional<ComparatorAudit> audit;
  long solver_flags = 0;
  std::optional<double> wall_ms;
  std::vector<std::string> failures;  // names of failed checks

  bool passed() const noexcept { return failures.empty(); }
};

// Cells ordered by (T, seed, algorithm, shape).
std::vector<Cell> expand_cells(const ExperimentConfig& config);

EnvironmentSpec environment_for(const ExperimentConfig& config, const Cell& cell);
ScheduleParams schedule_for(const ExperimentConfig& config, const Cell& cell, const Environment& env);

using TraceSink = std::function<void(const Cell&, const RunTrace&)>;

CellResult run_cell(const ExperimentConfig& config, const Cell& cell,
                    const TraceSink& sink = nullptr);

// Runs every cell on `jobs` threads; results come back in expand_cells()
// order regardless of scheduling. The sink may be called concurrently for
// different cells.
std::vector<CellResult> run_cells(const ExperimentConfig& config, int jobs,
                                  const TraceSink& sink = nullptr);

// Summary CSV: one header row, one row per result, LF endings.
void write_summary_csv(std::ostream& out, const std::vector<CellResult>& results);
void write_trace_csv(std::ostream& out, const RunTrace& trace);
std::string trace_file_name(const Cell& cell);

struct RatePoint {
  long T = 0;
  double mean_positive_regret = 0.0;
  double mean_regret = 0.0;
  double mean_violation = 0.0;
};

struct RateSeries {
  Algorithm algorithm = Algorithm::Predictive;
  int p = 1;
  int m = 1;
  ConstraintKind constraints = ConstraintKind::StaticAffine;
  double c_exp = 0.5;
  double a_exp = 0.0;
  std::vector<RatePoint> points;
  std::optional<RateFit> regret_fit;  // unset if some mean is not positive
  std::optional<RateFit> violation_fit;
  double regret_exponent = 0.0;  // theoretical
  std::optional<double> violation_exponent;
};

struct PairedComparison {
  long T = 0;
  Algorithm first = Algorithm::Predictive;
  Algorithm second = Algorithm::Baseline;
  double mean_first = 0.0;
  double mean_second = 0.0;
  int seeds = 0;
  int first_lower = 0;  // seeds where first has the smaller R_T
};

struct RateReport {
  std::vector<RateSeries> series;
  std::optional<PairedComparison> paired;  // when exactly two algorithms ran
  long solver_flags = 0;
  bool degraded() const noexcept { return solver_flags > 0; }
};

// max{1 - a - c, c} (predictive), max{1 - c, c} (baseline and OGD).
double theoretical_regret_exponent(Algorithm algorithm, double c_exp, double a_exp);
// 1/2 - c/2; none for OGD.
std::optional<double> theoretical_violation_exponent(Algorithm algorithm, double c_exp);

RateReport build_rate_report(const ExperimentConfig& config, const std::vector<CellResult>& results);
void write_rate_report(std::ostream& out, const RateReport& report);

struct CheckSummary {
  std::string name;
  int total = 0;
  int failed = 0;
  std::string worst;  // human-readable worst residual or slack
};

struct VerifyReport {
  std::vector<CheckSummary> checks;
  bool passed() const;
};

// Aggregates per-cell checks, then runs the oracle suites requested in
// config.checks.
VerifyReport build_verify_report(const ExperimentConfig& config,
                                 const std::vector<CellResult>& results);
void write_verify_report(std::ostream& out, const VerifyReport& report);

// Groups a summary CSV by (algorithm, T), averages `column` over seeds
// (positive parts first when positive_part is set) and fits the log-log slope.
struct FitRow {
  std::string algorithm;
  std::vector<std::pair<double, double>> points;
  std::optional<RateFit> fit;
};
std::vector<FitRow> fit_summary(std::istream& csv, const std::string& column, bool positive_part);

// Shortest round-trip decimal form.
std::string format_number(double v);

}  // namespace ltoco
