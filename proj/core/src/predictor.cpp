#include "ltoco/predictor.hpp"

#include <cmath>
#include <random>
#include <string>

#include "ltoco/errors.hpp"

namespace ltoco {

std::string_view to_string(PredictorKind k) {
  switch (k) {
    case PredictorKind::OracleDecay: return "oracle-decay";
    case PredictorKind::LastValue: return "last-value";
    case PredictorKind::Zero: return "zero";
    case PredictorKind::Perfect: return "perfect";
  }
  return "?";
}

PredictorKind parse_predictor_kind(std::string_view name) {
  if (name == "oracle-decay") return PredictorKind::OracleDecay;
  if (name == "last-value") return PredictorKind::LastValue;
  if (name == "zero") return PredictorKind::Zero;
  if (name == "perfect") return PredictorKind::Perfect;
  throw InvalidConfiguration("unknown predictor kind '" + std::string(name) + "'");
}

Predictor::Predictor(PredictorSpec spec, long T, double G) : spec_(spec), T_(T), radius_(0.0) {
  if (T < 1) throw InvalidConfiguration("predictor horizon must be >= 1");
  if (spec_.kind == PredictorKind::OracleDecay) {
    if (!(spec_.a_exp >= 0.0 && spec_.a_exp < 1.0)) {
      throw InvalidParameter("oracle-decay a_exp must lie in [0, 1)");
    }
    const double delta = spec_.delta.value_or(G);
    if (!(delta >= 0.0) || !std::isfinite(delta)) throw InvalidParameter("delta must be >= 0");
    radius_ = delta * std::pow(static_cast<double>(T), -spec_.a_exp / 2.0);
  }
}

Vector Predictor::hint(const Vector& c_t, const Vector* c_prev, long t) const {
  if (t < 1 || t > T_) throw InvalidInput("hint step out of range");
  switch (spec_.kind) {
    case PredictorKind::Perfect: return c_t;
    case PredictorKind::Zero: return Vector::Zero(c_t.size());
    case PredictorKind::LastValue:
      if (t == 1 || c_prev == nullptr) return Vector::Zero(c_t.size());
      return *c_prev;
    case PredictorKind::OracleDecay: {
      std::mt19937_64 rng(mix_seed(spec_.seed, static_cast<std::uint64_t>(t)));
      std::normal_distribution<double> normal(0.0, 1.0);
      Vector u(c_t.size());
      double n = 0.0;
      do {
        for (Index i = 0; i < u.size(); ++i) u[i] = normal(rng);
        n = u.norm();
      } while (n == 0.0);
      return c_t + (radius_ / n) * u;
    }
  }
  return c_t;
}

Vector Predictor::hint(const Environment& env, long t) const {
  if (env.T != T_) throw InvalidConfiguration("predictor horizon does not match environment");
  if (t < 1 || t > T_) throw InvalidInput("hint step out of range");
  const Vector* prev = t > 1 ? &env.cost(t - 1) : nullptr;
  return hint(env.cost(t), prev, t);
}

}  // namespace ltoco
