#include "ltoco/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <json.hpp>

#include "ltoco/errors.hpp"

namespace ltoco {

namespace {

using nlohmann::json;

class Reader {
 public:
  Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail("expected an object");
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw InvalidConfiguration((path_.empty() ? std::string("<root>") : path_) + ": " + what);
  }

  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  bool has(const std::string& key) const { return node_.contains(key); }

  const json& raw(const std::string& key) const {
    seen_.insert(key);
    return node_.at(key);
  }

  Reader section(const std::string& key) const { return Reader(raw(key), child(key)); }

  double number(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_number()) throw InvalidConfiguration(child(key) + ": expected a number");
    return v.get<double>();
  }

  std::optional<double> optional_number(const std::string& key) const {
    if (!has(key) || raw(key).is_null()) return std::nullopt;
    return number(key, 0.0);
  }

  long integer(const std::string& key, long fallback) const {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_number_integer()) throw InvalidConfiguration(child(key) + ": expected an integer");
    return v.get<long>();
  }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_boolean()) throw InvalidConfiguration(child(key) + ": expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_string()) throw InvalidConfiguration(child(key) + ": expected a string");
    return v.get<std::string>();
  }

  // A scalar or a list of scalars, read through `one`.
  template <class T, class F>
  std::vector<T> list(const std::string& key, F one) const {
    const json& v = raw(key);
    std::vector<T> out;
    if (v.is_array()) {
      if (v.empty()) throw InvalidConfiguration(child(key) + ": list must not be empty");
      for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(one(v[i], child(key) + "[" + std::to_string(i) + "]"));
      }
    } else {
      out.push_back(one(v, child(key)));
    }
    return out;
  }

  // Rejects keys nobody asked for.
  void finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      if (!seen_.count(it.key())) throw InvalidConfiguration(child(it.key()) + ": unknown key");
    }
  }

 private:
  const json& node_;
  std::string path_;
  mutable std::set<std::string> seen_;
};

long as_long(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw InvalidConfiguration(path + ": expected an integer");
  return v.get<long>();
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw InvalidConfiguration(path + ": expected a string");
  return v.get<std::string>();
}

template <class F>
auto parse_named(const std::string& path, const std::string& value, F parse) {
  try {
    return parse(value);
  } catch (const InvalidConfiguration& e) {
    throw InvalidConfiguration(path + ": " + e.what());
  }
}

void read_environment(const Reader& r, EnvironmentSpec& env) {
  env.p = static_cast<int>(r.integer("p", env.p));
  env.m = static_cast<int>(r.integer("m", env.m));
  env.G = r.number("G", env.G);
  env.F = r.optional_number("F");
  if (r.has("witness") && !r.raw("witness").is_null()) {
    const json& w = r.raw("witness");
    if (!w.is_array() || w.empty()) r.fail("witness: expected a non-empty list of numbers");
    Vector x(static_cast<Index>(w.size()));
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (!w[i].is_number()) r.fail("witness[" + std::to_string(i) + "]: expected a number");
      x[static_cast<Index>(i)] = w[i].get<double>();
    }
    env.witness = x;
  }
  if (r.has("cost")) {
    Reader c = r.section("cost");
    env.cost.kind = parse_named(c.child("kind"), c.string("kind", std::string(to_string(env.cost.kind))),
                                parse_cost_kind);
    env.cost.sigma = c.number("sigma", env.cost.sigma);
    env.cost.bias = c.number("bias", env.cost.bias);
    env.cost.segments = static_cast<int>(c.integer("segments", env.cost.segments));
    c.finish();
  }
  if (r.has("constraints")) {
    Reader c = r.section("constraints");
    env.constraints.kind =
        parse_named(c.child("kind"), c.string("kind", std::string(to_string(env.constraints.kind))),
                    parse_constraint_kind);
    env.constraints.margin = c.number("margin", env.constraints.margin);
    env.constraints.jitter = c.number("jitter", env.constraints.jitter);
    env.constraints.strength = c.number("strength", env.constraints.strength);
    c.finish();
  }
  if (r.has("set")) {
    Reader s = r.section("set");
    const std::string kind = s.string("kind", "box");
    if (kind == "box") {
      env.set.kind = SetKind::Box;
    } else if (kind == "ball") {
      env.set.kind = SetKind::Ball;
    } else {
      s.fail("kind: expected \"box\" or \"ball\"");
    }
    env.set.radius = s.number("radius", env.set.radius);
    s.finish();
  }
  r.finish();
}

InnerMethod parse_method(const std::string& name) {
  if (name == "dual-certified") return InnerMethod::DualCertified;
  if (name == "subgradient") return InnerMethod::Subgradient;
  throw InvalidConfiguration("unknown solver method '" + name + "'");
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidConfiguration(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  Reader r(root, "");
  cfg.name = r.string("name", cfg.name);
  if (r.has("algorithm")) {
    cfg.algorithms = r.list<Algorithm>("algorithm", [](const json& v, const std::string& path) {
      return parse_named(path, as_string(v, path), parse_algorithm);
    });
  }
  if (r.has("environment")) read_environment(r.section("environment"), cfg.environment);
  if (r.has("grid")) {
    Reader g = r.section("grid");
    auto ints = [](const json& v, const std::string& path) {
      return static_cast<int>(as_long(v, path));
    };
    if (g.has("p")) cfg.grid.p = g.list<int>("p", ints);
    if (g.has("m")) cfg.grid.m = g.list<int>("m", ints);
    if (g.has("constraint_kinds")) {
      cfg.grid.constraint_kinds =
          g.list<ConstraintKind>("constraint_kinds", [](const json& v, const std::string& path) {
            return parse_named(path, as_string(v, path), parse_constraint_kind);
          });
    }
    g.finish();
  }
  if (r.has("predictor")) {
    Reader p = r.section("predictor");
    cfg.predictor.kind = parse_named(
        p.child("kind"), p.string("kind", std::string(to_string(cfg.predictor.kind))),
        parse_predictor_kind);
    cfg.predictor.a_exp = p.number("a_exp", cfg.predictor.a_exp);
    cfg.predictor.delta = p.optional_number("delta");
    cfg.predictor.seed = static_cast<std::uint64_t>(p.integer("seed", 0));
    p.finish();
  }
  if (r.has("schedule")) {
    Reader s = r.section("schedule");
    cfg.c_exp = s.number("c_exp", cfg.c_exp);
    cfg.a_exp = s.optional_number("a_exp");
    s.finish();
  }
  if (r.has("T")) {
    cfg.horizons = r.list<long>("T", as_long);
  }
  if (r.has("seeds")) {
    cfg.seeds = r.list<std::uint64_t>("seeds", [](const json& v, const std::string& path) {
      const long s = as_long(v, path);
      if (s < 0) throw InvalidConfiguration(path + ": seeds must be >= 0");
      return static_cast<std::uint64_t>(s);
    });
  }
  if (r.has("solver")) {
    Reader s = r.section("solver");
    cfg.solver.method = parse_named(s.child("method"), s.string("method", "dual-certified"),
                                    parse_method);
    cfg.solver.rel_tol = s.number("rel_tol", cfg.solver.rel_tol);
    cfg.solver.max_iters = static_cast<int>(s.integer("max_iters", cfg.solver.max_iters));
    s.finish();
  }
  if (r.has("comparator")) {
    Reader c = r.section("comparator");
    cfg.comparator.tol_feas = c.number("tol_feas", cfg.comparator.tol_feas);
    cfg.comparator.cross_validate = c.boolean("cross_validate", cfg.comparator.cross_validate);
    cfg.comparator.grid_resolution = c.number("grid_resolution", cfg.comparator.grid_resolution);
    c.finish();
  }
  if (r.has("checks")) {
    Reader c = r.section("checks");
    cfg.checks.queue = c.boolean("queue", cfg.checks.queue);
    cfg.checks.lemma1 = c.boolean("lemma1", cfg.checks.lemma1);
    cfg.checks.theorem3 = c.boolean("theorem3", cfg.checks.theorem3);
    cfg.checks.lemma1_prefix = c.boolean("lemma1_prefix", cfg.checks.lemma1_prefix);
    cfg.checks.comparator_audit_samples =
        static_cast<int>(c.integer("comparator_audit_samples", cfg.checks.comparator_audit_samples));
    cfg.checks.step_oracle_instances =
        static_cast<int>(c.integer("step_oracle_instances", cfg.checks.step_oracle_instances));
    cfg.checks.comparator_oracle_instances = static_cast<int>(
        c.integer("comparator_oracle_instances", cfg.checks.comparator_oracle_instances));
    c.finish();
  }
  if (r.has("output")) {
    Reader o = r.section("output");
    cfg.output.dir = o.string("dir", cfg.output.dir);
    cfg.output.trace = o.boolean("trace", cfg.output.trace);
    cfg.output.timing = o.boolean("timing", cfg.output.timing);
    o.finish();
  }
  r.finish();
  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidConfiguration("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate_config(const ExperimentConfig& cfg, bool sweep) {
  auto bad = [](const std::string& path, const std::string& what) {
    throw InvalidConfiguration(path + ": " + what);
  };
  if (cfg.algorithms.empty()) bad("algorithm", "at least one algorithm is required");
  if (cfg.horizons.empty()) bad("T", "at least one horizon is required");
  for (std::size_t i = 0; i < cfg.horizons.size(); ++i) {
    if (cfg.horizons[i] < 1) bad("T[" + std::to_string(i) + "]", "horizons must be >= 1");
    if (i > 0 && cfg.horizons[i] <= cfg.horizons[i - 1]) bad("T", "horizons must be strictly increasing");
  }
  if (sweep && cfg.horizons.size() < 4) bad("T", "a sweep needs at least four horizons");
  if (cfg.seeds.empty()) bad("seeds", "at least one seed is required");
  if (!(cfg.c_exp > 0.0 && cfg.c_exp < 1.0)) bad("schedule.c_exp", "must lie in (0, 1)");
  const double a = cfg.schedule_a_exp();
  if (!(a >= 0.0 && a < 1.0)) bad("schedule.a_exp", "must lie in [0, 1)");
  if (!(cfg.solver.rel_tol > 0.0)) bad("solver.rel_tol", "must be > 0");
  if (cfg.solver.max_iters < 1) bad("solver.max_iters", "must be >= 1");
  if (!(cfg.environment.G > 0.0)) bad("environment.G", "must be > 0");
  if (cfg.environment.p < 1) bad("environment.p", "must be >= 1");
  if (cfg.environment.m < 1) bad("environment.m", "must be >= 1");
  for (int p : cfg.grid.p) {
    if (p < 1) bad("grid.p", "entries must be >= 1");
  }
  for (int m : cfg.grid.m) {
    if (m < 1) bad("grid.m", "entries must be >= 1");
  }
  std::vector<ConstraintKind> kinds = cfg.grid.constraint_kinds;
  if (kinds.empty()) kinds.push_back(cfg.environment.constraints.kind);
  for (std::size_t i = 0; i < cfg.algorithms.size(); ++i) {
    if (cfg.algorithms[i] != Algorithm::Baseline) continue;
    for (ConstraintKind k : kinds) {
      if (k != ConstraintKind::StaticAffine) {
        bad(cfg.grid.constraint_kinds.empty() ? "environment.constraints.kind" : "grid.constraint_kinds",
            "the baseline algorithm requires static-affine constraints");
      }
    }
  }
  if (cfg.environment.witness && cfg.grid.p.size() > 0) {
    bad("environment.witness", "an explicit witness cannot be combined with grid.p");
  }
  if (cfg.environment.witness && cfg.environment.witness->size() != cfg.environment.p) {
    bad("environment.witness", "length must equal environment.p");
  }
  if (cfg.output.dir.empty()) bad("output.dir", "must not be empty");
}

}  // namespace ltoco
