#include "ltoco/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "ltoco/errors.hpp"
#include "ltoco/verification.hpp"

namespace ltoco {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::vector<Cell> expand_cells(const ExperimentConfig& config) {
  std::vector<int> ps = config.grid.p.empty() ? std::vector<int>{config.environment.p} : config.grid.p;
  std::vector<int> ms = config.grid.m.empty() ? std::vector<int>{config.environment.m} : config.grid.m;
  std::vector<ConstraintKind> kinds = config.grid.constraint_kinds;
  if (kinds.empty()) kinds.push_back(config.environment.constraints.kind);

  std::vector<Cell> cells;
  for (long T : config.horizons) {
    for (std::uint64_t seed : config.seeds) {
      for (std::size_t a = 0; a < config.algorithms.size(); ++a) {
        std::size_t shape = 0;
        for (int p : ps) {
          for (int m : ms) {
            for (ConstraintKind k : kinds) {
              cells.push_back(Cell{config.algorithms[a], p, m, k, T, seed, a, shape++});
            }
          }
        }
      }
    }
  }
  return cells;
}

EnvironmentSpec environment_for(const ExperimentConfig& config, const Cell& cell) {
  EnvironmentSpec spec = config.environment;
  spec.p = cell.p;
  spec.m = cell.m;
  spec.constraints.kind = cell.constraints;
  spec.T = cell.T;
  spec.seed = cell.seed;
  return spec;
}

ScheduleParams schedule_for(const ExperimentConfig& config, const Cell& cell, const Environment& env) {
  const Variant v = cell.algorithm == Algorithm::Predictive ? Variant::Predictive : Variant::Baseline;
  return make_schedule(cell.T, config.c_exp, v, env.G, env.F, config.schedule_a_exp());
}

namespace {

std::string cell_label(const Cell& c) {
  std::ostringstream os;
  os << to_string(c.algorithm) << " p=" << c.p << " m=" << c.m << " " << to_string(c.constraints)
     << " T=" << c.T << " seed=" << c.seed;
  return os.str();
}

}  // namespace

CellResult run_cell(const ExperimentConfig& config, const Cell& cell, const TraceSink& sink) {
  const auto start = std::chrono::steady_clock::now();
  const Environment env = generate_environment(environment_for(config, cell));
  const ScheduleParams schedule = schedule_for(config, cell, env);

  RunTrace trace;
  switch (cell.algorithm) {
    case Algorithm::Ogd: trace = run_ogd(env, schedule); break;
    case Algorithm::Baseline: trace = run_baseline(env, schedule, config.solver); break;
    case Algorithm::Predictive: {
      PredictorSpec ps = config.predictor;
      ps.seed = mix_seed(cell.seed, 0x1000 + config.predictor.seed);
      trace = run_predictive(env, Predictor(ps, cell.T, env.G), schedule, config.solver);
      break;
    }
  }
  const Comparator comp = compute_comparator(env, config.comparator);

  CellResult r;
  r.cell = cell;
  r.env_id = env.id;
  r.schedule = schedule;
  r.regret = regret(trace, comp);
  r.violation = violation(trace);
  r.solver_flags = trace.unverified_steps;
  if (r.solver_flags > 0) r.failures.push_back("solver_tolerance");
  if (config.checks.queue && schedule.gamma > 0.0) {
    r.queue = check_queue_identity(trace);
    r.replay_ok = check_queue_replay(trace);
    if (!r.queue->passed) r.failures.push_back("queue_identity");
    if (!r.replay_ok) r.failures.push_back("queue_replay");
  }
  if (cell.algorithm == Algorithm::Predictive) {
    if (config.checks.lemma1) {
      r.lemma1 = check_lemma1(trace, env, comp, config.checks.lemma1_prefix);
      if (!r.lemma1->passed) r.failures.push_back("lemma1");
    }
    if (config.checks.theorem3) {
      r.theorem3 = check_theorem3_bounds(trace, env, comp);
      if (!r.theorem3->regret_ok) r.failures.push_back("theorem3_regret");
      if (!r.theorem3->violation_ok) r.failures.push_back("theorem3_violation");
    }
  }
  if (config.checks.comparator_audit_samples > 0) {
    r.audit = audit_comparator(env, comp, config.checks.comparator_audit_samples, cell.seed);
    if (!r.audit->passed) r.failures.push_back("comparator_audit");
  }
  if (sink) sink(cell, trace);
  if (config.output.timing) {
    r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  return r;
}

std::vector<CellResult> run_cells(const ExperimentConfig& config, int jobs, const TraceSink& sink) {
  const std::vector<Cell> cells = expand_cells(config);
  std::vector<std::optional<CellResult>> slots(cells.size());
  std::vector<std::exception_ptr> errors(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        slots[i] = run_cell(config, cells[i], sink);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(cells.size())));
  {
    std::vector<std::jthread> pool;
    for (int k = 1; k < n; ++k) pool.emplace_back(worker);
    worker();
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const Error& e) {
      throw Error(cell_label(cells[i]) + ": " + e.what());
    }
  }
  std::vector<CellResult> out;
  out.reserve(cells.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

namespace {

template <class T>
std::string opt(const std::optional<T>& v, double (*get)(const T&)) {
  return v ? format_number(get(*v)) : std::string();
}

}  // namespace

void write_summary_csv(std::ostream& out, const std::vector<CellResult>& results) {
  out << "algorithm,T,seed,c_exp,a_exp,eta,gamma,R_T,C_T,thm3_rhs_regret,thm3_rhs_violation,"
         "lemma1_slack_1,lemma1_slack_2,queue_residual,solver_flags,wall_ms,env_id,checks\n";
  for (const CellResult& r : results) {
    std::string checks = "pass";
    if (!r.passed()) {
      checks = "fail:";
      for (std::size_t i = 0; i < r.failures.size(); ++i) checks += (i ? ";" : "") + r.failures[i];
    }
    out << to_string(r.cell.algorithm) << ',' << r.cell.T << ',' << r.cell.seed << ','
        << format_number(r.schedule.c_exp) << ',' << format_number(r.schedule.a_exp) << ','
        << format_number(r.schedule.eta) << ',' << format_number(r.schedule.gamma) << ','
        << format_number(r.regret) << ',' << format_number(r.violation) << ','
        << opt<Theorem3Report>(r.theorem3, [](const Theorem3Report& t) { return t.rhs_regret; }) << ','
        << opt<Theorem3Report>(r.theorem3, [](const Theorem3Report& t) { return t.rhs_violation; })
        << ',' << opt<Lemma1Report>(r.lemma1, [](const Lemma1Report& l) { return l.slack1; }) << ','
        << opt<Lemma1Report>(r.lemma1, [](const Lemma1Report& l) { return l.slack2; }) << ','
        << opt<QueueIdentityReport>(r.queue, [](const QueueIdentityReport& q) { return q.residual; })
        << ',' << r.solver_flags << ',' << (r.wall_ms ? format_number(*r.wall_ms) : std::string())
        << ',' << r.env_id << ',' << checks << '\n';
  }
}

void write_trace_csv(std::ostream& out, const RunTrace& tr) {
  auto header = [&](const char* name, Index n) {
    for (Index i = 1; i <= n; ++i) out << ',' << name << '_' << i;
  };
  out << 't';
  header("x", tr.p);
  if (tr.has_z()) header("z", tr.p);
  header("c", tr.p);
  if (tr.has_z()) header("h", tr.p);
  header("q", tr.m);
  header("q_hat", tr.m);
  out << ",f";
  header("viol", tr.m);
  out << ",step_tol,step_gap\n";
  auto row = [&](const Vector& v) {
    for (Index i = 0; i < v.size(); ++i) out << ',' << format_number(v[i]);
  };
  for (long t = 0; t < tr.T; ++t) {
    const auto i = static_cast<std::size_t>(t);
    out << t + 1;
    row(tr.x[i]);
    if (tr.has_z()) row(tr.z[i]);
    row(tr.c[i]);
    if (tr.has_z()) row(tr.h[i]);
    row(tr.q[i]);
    row(tr.q_hat[i]);
    out << ',' << format_number(tr.cost[i]);
    row(tr.violation[i]);
    out << ',' << format_number(tr.step_tol[i]) << ',' << format_number(tr.step_gap[i]) << '\n';
  }
}

std::string trace_file_name(const Cell& c) {
  std::ostringstream os;
  os << "trace_" << to_string(c.algorithm) << "_p" << c.p << "_m" << c.m << "_"
     << (c.constraints == ConstraintKind::StaticAffine ? "static" : "tv") << "_T" << c.T << "_seed"
     << c.seed << ".csv";
  return os.str();
}

double theoretical_regret_exponent(Algorithm algorithm, double c_exp, double a_exp) {
  if (algorithm == Algorithm::Predictive) return std::max(1.0 - a_exp - c_exp, c_exp);
  return std::max(1.0 - c_exp, c_exp);
}

std::optional<double> theoretical_violation_exponent(Algorithm algorithm, double c_exp) {
  if (algorithm == Algorithm::Ogd) return std::nullopt;
  return 0.5 - c_exp / 2.0;
}

RateReport build_rate_report(const ExperimentConfig& config, const std::vector<CellResult>& results) {
  RateReport rep;
  // key: (algorithm index, shape index) -> T -> values
  std::map<std::pair<std::size_t, std::size_t>, std::map<long, std::vector<const CellResult*>>> groups;
  for (const CellResult& r : results) {
    groups[{r.cell.algorithm_index, r.cell.shape_index}][r.cell.T].push_back(&r);
    rep.solver_flags += r.solver_flags;
  }
  const double a = config.schedule_a_exp();
  for (const auto& [key, by_T] : groups) {
    const CellResult& any = *by_T.begin()->second.front();
    RateSeries s;
    s.algorithm = any.cell.algorithm;
    s.p = any.cell.p;
    s.m = any.cell.m;
    s.constraints = any.cell.constraints;
    s.c_exp = config.c_exp;
    s.a_exp = a;
    s.regret_exponent = theoretical_regret_exponent(s.algorithm, s.c_exp, a);
    s.violation_exponent = theoretical_violation_exponent(s.algorithm, s.c_exp);
    std::vector<std::pair<double, double>> rp, cp;
    bool r_ok = true, c_ok = true;
    for (const auto& [T, rows] : by_T) {
      RatePoint pt;
      pt.T = T;
      for (const CellResult* r : rows) {
        pt.mean_positive_regret += std::max(0.0, r->regret);
        pt.mean_regret += r->regret;
        pt.mean_violation += r->violation;
      }
      const double n = static_cast<double>(rows.size());
      pt.mean_positive_regret /= n;
      pt.mean_regret /= n;
      pt.mean_violation /= n;
      r_ok = r_ok && pt.mean_positive_regret > 0.0;
      c_ok = c_ok && pt.mean_violation > 0.0;
      rp.emplace_back(static_cast<double>(T), pt.mean_positive_regret);
      cp.emplace_back(static_cast<double>(T), pt.mean_violation);
      s.points.push_back(pt);
    }
    if (rp.size() >= 2 && r_ok) s.regret_fit = fit_rate(rp);
    if (cp.size() >= 2 && c_ok) s.violation_fit = fit_rate(cp);
    rep.series.push_back(std::move(s));
  }
  if (config.algorithms.size() == 2) {
    const long T = config.horizons.back();
    PairedComparison pc;
    pc.T = T;
    pc.first = config.algorithms[0];
    pc.second = config.algorithms[1];
    std::map<std::pair<std::uint64_t, std::size_t>, std::pair<const CellResult*, const CellResult*>> pairs;
    for (const CellResult& r : results) {
      if (r.cell.T != T) continue;
      auto& slot = pairs[{r.cell.seed, r.cell.shape_index}];
      (r.cell.algorithm_index == 0 ? slot.first : slot.second) = &r;
    }
    for (const auto& [k, pr] : pairs) {
      if (!pr.first || !pr.second) continue;
      ++pc.seeds;
      pc.mean_first += pr.first->regret;
      pc.mean_second += pr.second->regret;
      if (pr.first->regret < pr.second->regret) ++pc.first_lower;
    }
    if (pc.seeds > 0) {
      pc.mean_first /= pc.seeds;
      pc.mean_second /= pc.seeds;
      rep.paired = pc;
    }
  }
  return rep;
}

void write_rate_report(std::ostream& out, const RateReport& rep) {
  for (const RateSeries& s : rep.series) {
    out << "series " << to_string(s.algorithm) << " p=" << s.p << " m=" << s.m << " "
        << to_string(s.constraints) << " c=" << format_number(s.c_exp)
        << " a=" << format_number(s.a_exp) << "\n";
    out << "  T mean_pos_R_T mean_R_T mean_C_T\n";
    for (const RatePoint& p : s.points) {
      out << "  " << p.T << ' ' << format_number(p.mean_positive_regret) << ' '
          << format_number(p.mean_regret) << ' ' << format_number(p.mean_violation) << "\n";
    }
    out << "  regret slope "
        << (s.regret_fit ? format_number(s.regret_fit->slope) : std::string("undefined"))
        << " (r2 " << (s.regret_fit ? format_number(s.regret_fit->r_squared) : std::string("-"))
        << ") theory " << format_number(s.regret_exponent) << "\n";
    out << "  violation slope "
        << (s.violation_fit ? format_number(s.violation_fit->slope) : std::string("undefined"))
        << " (r2 " << (s.violation_fit ? format_number(s.violation_fit->r_squared) : std::string("-"))
        << ") theory "
        << (s.violation_exponent ? format_number(*s.violation_exponent) : std::string("n/a")) << "\n";
  }
  if (rep.paired) {
    const PairedComparison& p = *rep.paired;
    out << "paired T=" << p.T << " seeds=" << p.seeds << " mean_R_T " << to_string(p.first) << "="
        << format_number(p.mean_first) << " " << to_string(p.second) << "="
        << format_number(p.mean_second) << " " << to_string(p.first)
        << "_lower_on=" << p.first_lower << "\n";
  }
  out << "status " << (rep.degraded() ? "degraded" : "ok") << " solver_flags=" << rep.solver_flags
      << "\n";
}

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckSummary& c) { return c.failed == 0; });
}

VerifyReport build_verify_report(const ExperimentConfig& config,
                                 const std::vector<CellResult>& results) {
  VerifyReport rep;
  auto named = [](const char* name) {
    CheckSummary c;
    c.name = name;
    return c;
  };
  CheckSummary queue = named("queue_identity"), replay = named("queue_replay"),
               lemma = named("lemma1"), thm_r = named("theorem3_regret"),
               thm_c = named("theorem3_violation"), solver = named("solver_tolerance"),
               audit = named("comparator_audit");
  double worst_q = 0.0, worst_l = std::numeric_limits<double>::infinity();
  double worst_tr = worst_l, worst_tc = worst_l, worst_a = worst_l;
  long flags = 0;
  for (const CellResult& r : results) {
    ++solver.total;
    flags += r.solver_flags;
    if (r.solver_flags > 0) ++solver.failed;
    if (r.queue) {
      ++queue.total;
      ++replay.total;
      if (!r.queue->passed) ++queue.failed;
      if (!r.replay_ok) ++replay.failed;
      worst_q = std::max(worst_q, r.queue->residual / std::max(1.0, r.queue->violation));
    }
    if (r.lemma1) {
      ++lemma.total;
      if (!r.lemma1->passed) ++lemma.failed;
      worst_l = std::min({worst_l, r.lemma1->slack1 + r.lemma1->allowed,
                          r.lemma1->slack2 + r.lemma1->allowed});
    }
    if (r.theorem3) {
      ++thm_r.total;
      ++thm_c.total;
      if (!r.theorem3->regret_ok) ++thm_r.failed;
      if (!r.theorem3->violation_ok) ++thm_c.failed;
      worst_tr = std::min(worst_tr, r.theorem3->regret_slack);
      worst_tc = std::min(worst_tc, r.theorem3->violation_slack);
    }
    if (r.audit) {
      ++audit.total;
      if (!r.audit->passed) ++audit.failed;
      worst_a = std::min(worst_a, r.audit->worst_margin);
    }
  }
  queue.worst = "max relative residual " + format_number(worst_q);
  solver.worst = "unverified solves " + std::to_string(flags);
  lemma.worst = "min slack + allowance " + format_number(worst_l);
  thm_r.worst = "min slack " + format_number(worst_tr);
  thm_c.worst = "min slack " + format_number(worst_tc);
  audit.worst = "min margin " + format_number(worst_a);
  for (CheckSummary* c : {&queue, &replay, &lemma, &thm_r, &thm_c, &solver, &audit}) {
    if (c->total > 0) rep.checks.push_back(*c);
  }
  const std::uint64_t seed = config.seeds.front();
  if (config.checks.step_oracle_instances > 0) {
    const OracleSuiteReport s = step_oracle_suite(config.checks.step_oracle_instances, seed);
    rep.checks.push_back({"step_oracle", s.instances, s.failures + s.unverified,
                          "max |diff| " + format_number(s.worst_diff)});
  }
  if (config.checks.comparator_oracle_instances > 0) {
    const OracleSuiteReport s = comparator_oracle_suite(config.checks.comparator_oracle_instances, seed);
    rep.checks.push_back({"comparator_oracle", s.instances, s.failures,
                          "max |diff| " + format_number(s.worst_diff)});
  }
  return rep;
}

void write_verify_report(std::ostream& out, const VerifyReport& rep) {
  for (const CheckSummary& c : rep.checks) {
    out << (c.failed == 0 ? "PASS " : "FAIL ") << c.name << " " << (c.total - c.failed) << "/"
        << c.total << " " << c.worst << "\n";
  }
  out << (rep.passed() ? "verify: all checks passed\n" : "verify: FAILED\n");
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw InvalidInput("cannot parse " + what + " value '" + s + "'");
  }
  return v;
}

}  // namespace

std::vector<FitRow> fit_summary(std::istream& csv, const std::string& column, bool positive_part) {
  std::string line;
  if (!std::getline(csv, line)) throw InvalidInput("summary CSV is empty");
  const std::vector<std::string> header = split_csv(line);
  auto find = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw InvalidInput("summary CSV has no column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t ia = find("algorithm"), it = find("T"), iv = find(column);
  std::map<std::string, std::map<long, std::pair<double, int>>> acc;
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split_csv(line);
    if (f.size() != header.size()) throw InvalidInput("summary CSV row has the wrong field count");
    const long T = static_cast<long>(parse_double(f[it], "T"));
    double v = parse_double(f[iv], column);
    if (positive_part) v = std::max(0.0, v);
    auto& slot = acc[f[ia]][T];
    slot.first += v;
    ++slot.second;
  }
  std::vector<FitRow> rows;
  for (const auto& [alg, by_T] : acc) {
    FitRow row;
    row.algorithm = alg;
    bool ok = true;
    for (const auto& [T, s] : by_T) {
      const double mean = s.first / s.second;
      ok = ok && mean > 0.0;
      row.points.emplace_back(static_cast<double>(T), mean);
    }
    if (ok && row.points.size() >= 2) row.fit = fit_rate(row.points);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace ltoco
