#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "ltoco/environment.hpp"
#include "ltoco/types.hpp"

namespace ltoco {

enum class PredictorKind { OracleDecay, LastValue, Zero, Perfect };

std::string_view to_string(PredictorKind k);
PredictorKind parse_predictor_kind(std::string_view name);

struct PredictorSpec {
  PredictorKind kind = PredictorKind::OracleDecay;
  double a_exp = 0.0;
  // Error scale; the environment's G when unset.
  std::optional<double> delta;
  std::uint64_t seed = 0;
};

// Gradient hints h_t for a fixed horizon T.
//
//   oracle-decay  h_t = c_t + delta T^(-a/2) u_t, u_t a seeded uniform unit vector
//   last-value    h_t = c_{t-1}, h_1 = 0
//   zero          h_t = 0
//   perfect       h_t = c_t
class Predictor {
 public:
  Predictor(PredictorSpec spec, long T, double G);

  const PredictorSpec& spec() const noexcept { return spec_; }
  long horizon() const noexcept { return T_; }
  // delta T^(-a/2) for oracle-decay, 0 otherwise.
  double error_radius() const noexcept { return radius_; }

  // c_prev is c_{t-1} (ignored unless last-value; nullptr at t = 1).
  Vector hint(const Vector& c_t, const Vector* c_prev, long t) const;

  // Same, reading c_t and c_{t-1} from the environment.
  Vector hint(const Environment& env, long t) const;

 private:
  PredictorSpec spec_;
  long T_;
  double radius_;
};

}  // namespace ltoco
