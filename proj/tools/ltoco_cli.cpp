#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <thread>

#include "ltoco/config.hpp"
#include "ltoco/errors.hpp"
#include "ltoco/harness.hpp"

namespace fs = std::filesystem;
using namespace ltoco;

namespace {

constexpr int kChecksFailed = 1;
constexpr int kBadInput = 2;

struct CommonFlags {
  std::string config;
  std::string out;
  bool trace = false;
  bool timing = false;
  int jobs = 0;
  std::optional<long> seed_override;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "output directory (overrides output.dir)");
  cmd->add_flag("--trace", f.trace, "write one per-step CSV per cell");
  cmd->add_flag("--timing", f.timing, "fill the wall_ms column");
  cmd->add_option("--jobs", f.jobs, "worker threads (default: hardware concurrency)")->check(CLI::NonNegativeNumber);
  cmd->add_option("--seed-override", f.seed_override, "run only this seed")->check(CLI::NonNegativeNumber);
}

ExperimentConfig prepare(const CommonFlags& f, bool sweep) {
  ExperimentConfig cfg = load_config(f.config);
  if (!f.out.empty()) cfg.output.dir = f.out;
  if (f.trace) cfg.output.trace = true;
  if (f.timing) cfg.output.timing = true;
  if (f.seed_override) cfg.seeds = {static_cast<std::uint64_t>(*f.seed_override)};
  validate_config(cfg, sweep);
  return cfg;
}

int jobs_for(const CommonFlags& f) {
  if (f.jobs > 0) return f.jobs;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::vector<CellResult> execute(const ExperimentConfig& cfg, int jobs) {
  fs::create_directories(cfg.output.dir);
  TraceSink sink;
  if (cfg.output.trace) {
    const fs::path dir = fs::path(cfg.output.dir) / "traces";
    fs::create_directories(dir);
    sink = [dir](const Cell& cell, const RunTrace& trace) {
      std::ofstream out(dir / trace_file_name(cell), std::ios::binary);
      write_trace_csv(out, trace);
    };
  }
  std::vector<CellResult> results = run_cells(cfg, jobs, sink);
  std::ofstream summary(fs::path(cfg.output.dir) / "summary.csv", std::ios::binary);
  write_summary_csv(summary, results);
  return results;
}

int count_failed(const std::vector<CellResult>& results) {
  int n = 0;
  for (const CellResult& r : results) n += r.passed() ? 0 : 1;
  return n;
}

int cmd_run(const CommonFlags& f) {
  const ExperimentConfig cfg = prepare(f, false);
  const std::vector<CellResult> results = execute(cfg, jobs_for(f));
  const int failed = count_failed(results);
  std::cout << results.size() << " run(s), " << failed << " with failing checks; summary in "
            << (fs::path(cfg.output.dir) / "summary.csv").string() << "\n";
  for (const CellResult& r : results) {
    if (r.passed()) continue;
    std::cerr << "failed: " << r.env_id << " " << to_string(r.cell.algorithm) << ":";
    for (const std::string& name : r.failures) std::cerr << " " << name;
    std::cerr << "\n";
  }
  return failed == 0 ? 0 : kChecksFailed;
}

int cmd_sweep(const CommonFlags& f) {
  const ExperimentConfig cfg = prepare(f, true);
  const std::vector<CellResult> results = execute(cfg, jobs_for(f));
  const RateReport rep = build_rate_report(cfg, results);
  std::ofstream out(fs::path(cfg.output.dir) / "rate_report.txt", std::ios::binary);
  write_rate_report(out, rep);
  write_rate_report(std::cout, rep);
  return rep.degraded() ? kChecksFailed : 0;
}

int cmd_verify(const CommonFlags& f) {
  const ExperimentConfig cfg = prepare(f, false);
  const std::vector<CellResult> results = execute(cfg, jobs_for(f));
  const VerifyReport rep = build_verify_report(cfg, results);
  std::ofstream out(fs::path(cfg.output.dir) / "verify_report.txt", std::ios::binary);
  write_verify_report(out, rep);
  write_verify_report(std::cout, rep);
  if (!rep.passed()) {
    std::cerr << "failing checks:";
    for (const CheckSummary& c : rep.checks) {
      if (c.failed > 0) std::cerr << " " << c.name;
    }
    std::cerr << "\n";
    return kChecksFailed;
  }
  return 0;
}

int cmd_fit(const std::string& csv, const std::string& column, bool positive) {
  std::ifstream in(csv, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + csv + "'");
  for (const FitRow& row : fit_summary(in, column, positive)) {
    std::cout << row.algorithm << " " << column << (positive ? " (positive part)" : "") << "\n";
    for (const auto& [T, v] : row.points) {
      std::cout << "  " << format_number(T) << " " << format_number(v) << "\n";
    }
    if (row.fit) {
      std::cout << "  slope " << format_number(row.fit->slope) << " intercept "
                << format_number(row.fit->intercept) << " r2 " << format_number(row.fit->r_squared)
                << "\n";
    } else {
      std::cout << "  slope undefined (needs >= 2 horizons with positive means)\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online convex optimization with long-term constraints: runs, sweeps, checks"};
  app.require_subcommand(1);

  CommonFlags run_flags, sweep_flags, verify_flags;
  CLI::App* run = app.add_subcommand("run", "one run per (T, seed) cell with summary CSV");
  add_common(run, run_flags);
  CLI::App* sweep = app.add_subcommand("sweep", "rate sweep with log-log fits");
  add_common(sweep, sweep_flags);
  CLI::App* verify = app.add_subcommand("verify", "identity, inequality and oracle checks");
  add_common(verify, verify_flags);

  std::string fit_csv, fit_column = "R_T";
  bool fit_positive = false;
  CLI::App* fit = app.add_subcommand("fit", "fit log-log slopes from a summary CSV");
  fit->add_option("summary", fit_csv, "summary.csv produced by run/sweep")->required()->check(CLI::ExistingFile);
  fit->add_option("--column", fit_column, "column to fit (e.g. R_T, C_T)");
  fit->add_flag("--positive", fit_positive, "clamp values at zero before averaging");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kBadInput;
  }

  try {
    if (*run) return cmd_run(run_flags);
    if (*sweep) return cmd_sweep(sweep_flags);
    if (*verify) return cmd_verify(verify_flags);
    if (*fit) return cmd_fit(fit_csv, fit_column, fit_positive);
  } catch (const InvalidConfiguration& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kBadInput;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  }
  return 0;
}
