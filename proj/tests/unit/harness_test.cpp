#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <tuple>

#include "ltoco/config.hpp"
#include "ltoco/errors.hpp"
#include "ltoco/harness.hpp"

using namespace ltoco;

namespace {

std::string error_of(const std::string& json) {
  try {
    validate_config(parse_config(json));
  } catch (const InvalidConfiguration& e) {
    return e.what();
  }
  return {};
}

const char* kSmall = R"({
  "name": "small",
  "algorithm": ["predictive", "baseline", "ogd"],
  "environment": {"p": 2, "m": 1, "cost": {"kind": "iid-random", "sigma": 0.3, "bias": 0.5}},
  "grid": {"p": [1, 2], "m": [1, 2]},
  "predictor": {"kind": "oracle-decay", "a_exp": 0.5, "seed": 3},
  "schedule": {"c_exp": 0.5},
  "T": [20, 40],
  "seeds": [0, 1],
  "checks": {"lemma1_prefix": true, "comparator_audit_samples": 50}
})";

std::string summary_of(const ExperimentConfig& cfg, int jobs) {
  std::ostringstream os;
  write_summary_csv(os, run_cells(cfg, jobs));
  return os.str();
}

}  // namespace

TEST(Config, ParsesMinimalFile) {
  const ExperimentConfig cfg = load_config(std::string(LTOCO_CONFIG_DIR) + "/minimal.json");
  validate_config(cfg);
  EXPECT_EQ(cfg.name, "minimal");
  ASSERT_EQ(cfg.algorithms.size(), 1u);
  EXPECT_EQ(cfg.algorithms[0], Algorithm::Predictive);
  EXPECT_EQ(cfg.environment.p, 2);
  EXPECT_EQ(cfg.environment.m, 2);
  EXPECT_DOUBLE_EQ(cfg.environment.cost.sigma, 0.3);
  EXPECT_EQ(cfg.predictor.kind, PredictorKind::OracleDecay);
  EXPECT_DOUBLE_EQ(cfg.schedule_a_exp(), 0.5);
  EXPECT_EQ(cfg.horizons, std::vector<long>{100});
  EXPECT_EQ(cfg.output.dir, "out/minimal");
}

TEST(Config, EveryShippedConfigValidates) {
  for (const char* name : {"minimal", "verify_default", "sweep_predictive", "sweep_baseline", "advantage"}) {
    const ExperimentConfig cfg = load_config(std::string(LTOCO_CONFIG_DIR) + "/" + name + ".json");
    const bool sweep = std::string(name).rfind("sweep_", 0) == 0;
    EXPECT_NO_THROW(validate_config(cfg, sweep)) << name;
  }
}

TEST(Config, ErrorsNameTheField) {
  EXPECT_NE(error_of(R"({"environment": {"cost": {"sgima": 1}}})").find("environment.cost.sgima: unknown key"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"T": [10, "x"]})").find("T[1]"), std::string::npos);
  EXPECT_NE(error_of(R"({"environment": {"p": 1.5}})").find("environment.p: expected an integer"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"schedule": {"c_exp": 1.5}})").find("schedule.c_exp"), std::string::npos);
  EXPECT_NE(error_of(R"({"algorithm": "baseline", "environment": {"constraints": {"kind": "timevarying-affine"}}})")
                .find("static-affine"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"predictor": {"kind": "psychic"}})").find("predictor.kind"), std::string::npos);
  EXPECT_NE(error_of("{not json").find("valid JSON"), std::string::npos);
  EXPECT_NE(error_of(R"({"T": [50, 20]})").find("strictly increasing"), std::string::npos);
  EXPECT_EQ(error_of(R"({})"), "");
}

TEST(Config, SweepNeedsFourHorizons) {
  const ExperimentConfig cfg = parse_config(R"({"T": [10, 20, 40]})");
  EXPECT_NO_THROW(validate_config(cfg));
  EXPECT_THROW(validate_config(cfg, true), InvalidConfiguration);
}

TEST(Harness, CellOrderIsTSeedAlgorithmShape) {
  const ExperimentConfig cfg = parse_config(kSmall);
  const std::vector<Cell> cells = expand_cells(cfg);
  ASSERT_EQ(cells.size(), 2u * 2u * 3u * 4u);
  for (std::size_t i = 1; i < cells.size(); ++i) {
    const Cell& a = cells[i - 1];
    const Cell& b = cells[i];
    const auto ka = std::tuple(a.T, a.seed, a.algorithm_index, a.shape_index);
    const auto kb = std::tuple(b.T, b.seed, b.algorithm_index, b.shape_index);
    EXPECT_LT(ka, kb);
  }
  EXPECT_EQ(cells.front().T, 20);
  EXPECT_EQ(cells.back().T, 40);
}

TEST(Harness, ScheduleFollowsAlgorithm) {
  const ExperimentConfig cfg = parse_config(kSmall);
  for (const Cell& cell : expand_cells(cfg)) {
    const Environment env = generate_environment(environment_for(cfg, cell));
    const ScheduleParams s = schedule_for(cfg, cell, env);
    EXPECT_EQ(s.T, cell.T);
    if (cell.algorithm == Algorithm::Predictive) {
      EXPECT_LE(s.coupling_residual(), 1e-12);
    } else {
      EXPECT_NEAR(s.gamma * s.gamma * 2.0 * s.eta * env.G * env.G, 1.0, 1e-12);
    }
  }
}

TEST(Harness, CellsPassTheirChecks) {
  const ExperimentConfig cfg = parse_config(kSmall);
  for (const CellResult& r : run_cells(cfg, 1)) {
    EXPECT_TRUE(r.passed()) << trace_file_name(r.cell);
    EXPECT_EQ(r.solver_flags, 0);
    if (r.cell.algorithm == Algorithm::Predictive) {
      EXPECT_TRUE(r.lemma1.has_value());
      EXPECT_TRUE(r.theorem3.has_value());
    } else {
      EXPECT_FALSE(r.lemma1.has_value());
    }
    EXPECT_TRUE(r.queue.has_value());
    ASSERT_TRUE(r.audit.has_value());
  }
}

TEST(Harness, ParallelRunsAreByteIdentical) {
  const ExperimentConfig cfg = parse_config(kSmall);
  const std::string serial = summary_of(cfg, 1);
  EXPECT_EQ(serial, summary_of(cfg, 4));
  EXPECT_EQ(serial, summary_of(cfg, 3));
}

TEST(Harness, SummaryCsvSchema) {
  ExperimentConfig cfg = parse_config(kSmall);
  cfg.horizons = {20};
  cfg.seeds = {0};
  const std::string csv = summary_of(cfg, 1);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line,
            "algorithm,T,seed,c_exp,a_exp,eta,gamma,R_T,C_T,thm3_rhs_regret,thm3_rhs_violation,"
            "lemma1_slack_1,lemma1_slack_2,queue_residual,solver_flags,wall_ms,env_id,checks");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 17) << line;
    EXPECT_TRUE(line.ends_with(",pass")) << line;
  }
  EXPECT_EQ(rows, 12);
  EXPECT_EQ(csv.find('\r'), std::string::npos);
}

TEST(Harness, TraceSinkSeesEveryCell) {
  ExperimentConfig cfg = parse_config(kSmall);
  cfg.horizons = {20};
  std::atomic<int> calls{0};
  run_cells(cfg, 2, [&](const Cell& c, const RunTrace& tr) {
    EXPECT_EQ(tr.T, c.T);
    ++calls;
  });
  EXPECT_EQ(calls.load(), 2 * 3 * 4);
  std::ostringstream os;
  const Environment env = generate_environment(environment_for(cfg, expand_cells(cfg).front()));
  write_trace_csv(os, run_ogd(env, make_schedule(20, 0.5, Variant::Baseline, env.G, env.F)));
  const std::string text = os.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 21);
}

TEST(RateReport, TheoreticalExponents) {
  EXPECT_DOUBLE_EQ(theoretical_regret_exponent(Algorithm::Predictive, 0.25, 0.5), 0.25);
  EXPECT_DOUBLE_EQ(*theoretical_violation_exponent(Algorithm::Predictive, 0.25), 0.375);
  EXPECT_DOUBLE_EQ(theoretical_regret_exponent(Algorithm::Predictive, 0.5, 0.0), 0.5);
  EXPECT_DOUBLE_EQ(*theoretical_violation_exponent(Algorithm::Predictive, 0.5), 0.25);
  EXPECT_DOUBLE_EQ(theoretical_regret_exponent(Algorithm::Baseline, 0.5, 0.0), 0.5);
  EXPECT_DOUBLE_EQ(*theoretical_violation_exponent(Algorithm::Baseline, 0.5), 0.25);
  EXPECT_DOUBLE_EQ(theoretical_regret_exponent(Algorithm::Baseline, 0.3, 0.9), 0.7);
  EXPECT_FALSE(theoretical_violation_exponent(Algorithm::Ogd, 0.5).has_value());
}

TEST(RateReport, BuildsSeriesAndPairs) {
  ExperimentConfig cfg = parse_config(R"({
    "algorithm": ["predictive", "baseline"],
    "environment": {"p": 2, "m": 1, "cost": {"kind": "iid-random", "sigma": 0.05, "bias": 0.5}},
    "predictor": {"kind": "oracle-decay", "a_exp": 0.5},
    "T": [32, 64, 128, 256],
    "seeds": [0, 1, 2],
    "checks": {"lemma1": false, "theorem3": false}
  })");
  validate_config(cfg, true);
  const RateReport rep = build_rate_report(cfg, run_cells(cfg, 2));
  ASSERT_EQ(rep.series.size(), 2u);
  EXPECT_EQ(rep.series[0].points.size(), 4u);
  ASSERT_TRUE(rep.paired.has_value());
  EXPECT_EQ(rep.paired->seeds, 3);
  EXPECT_EQ(rep.paired->T, 256);
  EXPECT_FALSE(rep.degraded());
  std::ostringstream os;
  write_rate_report(os, rep);
  EXPECT_NE(os.str().find("status ok"), std::string::npos);
}

TEST(VerifyReport, FlagsFailedChecks) {
  ExperimentConfig cfg = parse_config(kSmall);
  cfg.horizons = {20};
  std::vector<CellResult> results = run_cells(cfg, 1);
  VerifyReport ok = build_verify_report(cfg, results);
  EXPECT_TRUE(ok.passed());
  results.front().failures.push_back("queue_identity");
  if (results.front().queue) results.front().queue->passed = false;
  const VerifyReport bad = build_verify_report(cfg, results);
  EXPECT_FALSE(bad.passed());
  std::ostringstream os;
  write_verify_report(os, bad);
  EXPECT_NE(os.str().find("FAIL"), std::string::npos);
}

TEST(FitSummary, RecoversSlope) {
  std::ifstream in(std::string(LTOCO_TEST_DATA_DIR) + "/summary_sample.csv");
  ASSERT_TRUE(in);
  const std::vector<FitRow> rows = fit_summary(in, "R_T", true);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].algorithm, "baseline");
  ASSERT_TRUE(rows[0].fit.has_value());
  EXPECT_NEAR(rows[0].fit->slope, 0.5, 1e-12);
}

TEST(FormatNumber, RoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 12345678.0, 0.0}) {
    EXPECT_EQ(std::stod(format_number(v)), v);
  }
}
