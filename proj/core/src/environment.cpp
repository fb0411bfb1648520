#include "ltoco/environment.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>
#include <sstream>
#include <utility>

#include "ltoco/errors.hpp"

namespace ltoco {

std::string_view to_string(CostKind k) {
  switch (k) {
    case CostKind::IidRandom: return "iid-random";
    case CostKind::Drifting: return "drifting";
    case CostKind::PiecewiseConstant: return "piecewise-constant";
  }
  return "?";
}

CostKind parse_cost_kind(std::string_view name) {
  if (name == "iid-random") return CostKind::IidRandom;
  if (name == "drifting") return CostKind::Drifting;
  if (name == "piecewise-constant") return CostKind::PiecewiseConstant;
  throw InvalidConfiguration("unknown cost kind '" + std::string(name) + "'");
}

std::string_view to_string(ConstraintKind k) {
  return k == ConstraintKind::StaticAffine ? "static-affine" : "timevarying-affine";
}

ConstraintKind parse_constraint_kind(std::string_view name) {
  if (name == "static-affine") return ConstraintKind::StaticAffine;
  if (name == "timevarying-affine") return ConstraintKind::TimeVaryingAffine;
  throw InvalidConfiguration("unknown constraint kind '" + std::string(name) + "'");
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over (seed, stream)
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

constexpr double kBoundSlack = 1e-12;

Vector gaussian(std::mt19937_64& rng, Index p) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(p);
  for (Index i = 0; i < p; ++i) v[i] = normal(rng);
  return v;
}

Vector unit_direction(std::mt19937_64& rng, Index p) {
  Vector v;
  double n = 0.0;
  do {
    v = gaussian(rng, p);
    n = v.norm();
  } while (n == 0.0);
  return v / n;
}

std::vector<Vector> generate_costs(const EnvironmentSpec& spec) {
  std::mt19937_64 rng(mix_seed(spec.seed, 1));
  const Index p = spec.p;
  const double G = spec.G;
  std::vector<Vector> costs;
  costs.reserve(static_cast<std::size_t>(spec.T));
  const Vector first = G * unit_direction(rng, p);
  switch (spec.cost.kind) {
    case CostKind::IidRandom: {
      for (long t = 0; t < spec.T; ++t) {
        Vector c = spec.cost.bias * first + spec.cost.sigma * gaussian(rng, p);
        const double n = c.norm();
        if (n > G) c *= G / n;
        costs.push_back(std::move(c));
      }
      break;
    }
    case CostKind::Drifting: {
      Vector c = first;
      for (long t = 0; t < spec.T; ++t) {
        costs.push_back(c);
        if (spec.cost.sigma == 0.0) continue;
        Vector next = c + spec.cost.sigma * gaussian(rng, p);
        const double n = next.norm();
        if (n > 0.0) c = (G / n) * next;
      }
      break;
    }
    case CostKind::PiecewiseConstant: {
      if (spec.cost.segments < 1) throw InvalidConfiguration("piecewise-constant needs >= 1 segment");
      std::vector<Vector> levels{first};
      for (int s = 1; s < spec.cost.segments; ++s) levels.push_back(G * unit_direction(rng, p));
      for (long t = 0; t < spec.T; ++t) {
        const long seg = t * spec.cost.segments / spec.T;
        costs.push_back(levels[static_cast<std::size_t>(seg)]);
      }
      break;
    }
  }
  return costs;
}

Matrix scaled(Matrix A, double target) {
  const double n = A.norm();
  if (n > 0.0) A *= target / n;
  return A;
}

ConstraintBlock generate_constraints(const EnvironmentSpec& spec, const Vector& witness) {
  std::mt19937_64 rng(mix_seed(spec.seed, 2));
  const Index m = spec.m;
  const Index p = spec.p;
  const double target = spec.constraints.strength * spec.G;
  Matrix A0(m, p);
  for (Index j = 0; j < m; ++j) A0.row(j) = gaussian(rng, p).transpose();
  A0 = scaled(std::move(A0), target);
  auto offset_for = [&](const Matrix& A) {
    return Vector(A * witness + Vector::Constant(m, spec.constraints.margin));
  };
  if (spec.constraints.kind == ConstraintKind::StaticAffine) {
    Vector b = offset_for(A0);
    return ConstraintBlock::static_affine(std::move(A0), std::move(b), spec.T);
  }
  std::vector<Matrix> As;
  std::vector<Vector> bs;
  As.reserve(static_cast<std::size_t>(spec.T));
  bs.reserve(static_cast<std::size_t>(spec.T));
  for (long t = 0; t < spec.T; ++t) {
    Matrix N(m, p);
    for (Index j = 0; j < m; ++j) N.row(j) = gaussian(rng, p).transpose();
    Matrix At = scaled(A0 + spec.constraints.jitter * N, target);
    bs.push_back(offset_for(At));
    As.push_back(std::move(At));
  }
  return ConstraintBlock::time_varying(std::move(As), std::move(bs));
}

FeasibleSet make_set(const SetSpec& s, Index p) {
  if (!(s.radius > 0.0)) throw InvalidConfiguration("set radius must be > 0");
  if (s.kind == SetKind::Box) return FeasibleSet::cube(p, s.radius);
  return FeasibleSet::ball(Vector::Zero(p), s.radius);
}

double spectral_norm(const Matrix& A) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(A.transpose() * A, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

std::string make_id(const EnvironmentSpec& s) {
  std::ostringstream os;
  os << to_string(s.cost.kind) << "/" << to_string(s.constraints.kind) << "/p" << s.p << "m" << s.m
     << "/T" << s.T << "/seed" << s.seed;
  return os.str();
}

}  // namespace

Environment generate_environment(const EnvironmentSpec& spec) {
  if (spec.p < 1 || spec.m < 1 || spec.T < 1) {
    throw InvalidConfiguration("environment needs p >= 1, m >= 1, T >= 1");
  }
  if (!(spec.G > 0.0)) throw InvalidConfiguration("environment needs G > 0");
  if (!(spec.constraints.margin > 0.0)) throw InvalidConfiguration("constraint margin must be > 0");
  if (!(spec.constraints.strength > 0.0 && spec.constraints.strength <= 1.0)) {
    throw InvalidConfiguration("constraint strength must lie in (0, 1]");
  }
  if (spec.cost.sigma < 0.0 || spec.constraints.jitter < 0.0) {
    throw InvalidConfiguration("sigma and jitter must be >= 0");
  }

  FeasibleSet set = make_set(spec.set, spec.p);
  Vector witness = spec.witness.value_or(Vector::Zero(spec.p));
  if (witness.size() != spec.p) throw InvalidConfiguration("witness has wrong dimension");
  if (!set.contains(witness)) throw InvalidConfiguration("witness lies outside X");

  const double F = spec.F.value_or(
      spec.G * std::max(set.max_distance_from(Vector::Zero(spec.p)), set.max_distance_from(witness)));

  Environment env{make_id(spec),
                  spec.T,
                  generate_costs(spec),
                  generate_constraints(spec, witness),
                  std::move(set),
                  spec.G,
                  F,
                  std::move(witness)};

  const BoundsReport report = verify_bounds(env);
  if (report.max_witness_value > 0.0) {
    throw InvalidConfiguration("witness is infeasible at step " +
                               std::to_string(report.offending_step));
  }
  if (!report.passed) throw GenerationError(report.message, report.offending_step);
  return env;
}

BoundsReport verify_bounds(const Environment& env) {
  BoundsReport r;
  r.max_witness_value = -std::numeric_limits<double>::infinity();
  const double G = env.G;
  const double F = env.F;
  auto fail = [&](long t, const std::string& what) {
    if (r.passed) {
      r.passed = false;
      r.offending_step = t;
      r.message = what;
    }
  };
  const ConstraintBlock& g = env.constraints;
  const long steps_g = g.is_static() ? 1 : g.horizon();
  for (long t = 1; t <= env.T; ++t) {
    const Vector& c = env.cost(t);
    const double cn = c.norm();
    const double cv = std::max(env.set.support(c), env.set.support(-c));
    r.max_cost_norm = std::max(r.max_cost_norm, cn);
    r.max_abs_cost_value = std::max(r.max_abs_cost_value, cv);
    if (cn > G * (1.0 + kBoundSlack)) fail(t, "cost gradient norm exceeds G");
    if (cv > F * (1.0 + kBoundSlack) + kBoundSlack) fail(t, "|f_t| exceeds F on X");
  }
  r.max_constraint_value = -std::numeric_limits<double>::infinity();
  for (long t = 1; t <= steps_g; ++t) {
    const Matrix& A = g.matrix(t);
    const Vector& b = g.offset(t);
    for (Index j = 0; j < A.rows(); ++j) {
      const double sup = env.set.support(A.row(j).transpose()) - b[j];
      r.max_constraint_value = std::max(r.max_constraint_value, sup);
      r.max_row_norm = std::max(r.max_row_norm, A.row(j).norm());
      if (sup > F * (1.0 + kBoundSlack) + kBoundSlack) fail(t, "g_t exceeds F on X");
    }
    const double lip = spectral_norm(A);
    r.max_constraint_lipschitz = std::max(r.max_constraint_lipschitz, lip);
    if (lip > G * (1.0 + kBoundSlack)) fail(t, "constraint Lipschitz constant exceeds G");
    const double wv = (A * env.witness - b).maxCoeff();
    if (wv > r.max_witness_value) {
      r.max_witness_value = wv;
      if (wv > 0.0) fail(t, "witness violates g_t");
    }
  }
  return r;
}

}  // namespace ltoco
