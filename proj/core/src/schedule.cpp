#include "ltoco/schedule.hpp"

#include <algorithm>
#include <cmath>

#include "ltoco/errors.hpp"

namespace ltoco {

std::string_view to_string(Variant v) {
  return v == Variant::Baseline ? "baseline" : "predictive";
}

Variant parse_variant(std::string_view name) {
  if (name == "baseline") return Variant::Baseline;
  if (name == "predictive") return Variant::Predictive;
  throw InvalidParameter("unknown schedule variant '" + std::string(name) + "'");
}

double ScheduleParams::coupling_residual() const {
  return std::abs(gamma * gamma * G * G * eta - 1.0);
}

ScheduleParams make_schedule(long T, double c_exp, Variant variant, double G, double F,
                             double a_exp) {
  if (T < 1) throw InvalidParameter("make_schedule: T must be >= 1");
  if (!(c_exp > 0.0 && c_exp < 1.0)) throw InvalidParameter("make_schedule: c_exp must lie in (0,1)");
  if (!(a_exp >= 0.0 && a_exp < 1.0)) throw InvalidParameter("make_schedule: a_exp must lie in [0,1)");
  if (!(G > 0.0)) throw InvalidParameter("make_schedule: G must be > 0");
  if (!(F >= 0.0)) throw InvalidParameter("make_schedule: F must be >= 0");

  ScheduleParams s;
  s.T = T;
  s.c_exp = c_exp;
  s.a_exp = a_exp;
  s.eta = std::pow(static_cast<double>(T), -c_exp);
  s.G = G;
  s.F = F;
  s.variant = variant;
  const double denom = variant == Variant::Predictive ? std::sqrt(s.eta) : std::sqrt(2.0 * s.eta);
  s.gamma = 1.0 / (G * denom);
  return s;
}

ScheduleParams make_custom_schedule(long T, double eta, double gamma, Variant variant, double G,
                                    double F) {
  if (T < 1) throw InvalidParameter("make_custom_schedule: T must be >= 1");
  if (!(eta > 0.0)) throw InvalidParameter("make_custom_schedule: eta must be > 0");
  if (!(gamma >= 0.0)) throw InvalidParameter("make_custom_schedule: gamma must be >= 0");
  if (!(G > 0.0)) throw InvalidParameter("make_custom_schedule: G must be > 0");
  ScheduleParams s;
  s.T = T;
  s.c_exp = std::log(1.0 / eta) / std::log(std::max(2.0, static_cast<double>(T)));
  s.eta = eta;
  s.gamma = gamma;
  s.G = G;
  s.F = F;
  s.variant = variant;
  s.custom = true;
  return s;
}

}  // namespace ltoco
