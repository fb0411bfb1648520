#pragma once

#include <string>
#include <string_view>

namespace ltoco {

enum class Variant { Baseline, Predictive };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view name);

// Constant step size eta and queue gain gamma for a horizon T.
//
//   eta   = T^(-c_exp)
//   gamma = 1 / (G sqrt(eta))      predictive
//   gamma = 1 / (G sqrt(2 eta))    baseline
//
// `custom` marks schedules built by make_custom_schedule(), which skip the
// exponent relation; the bound checkers refuse them unless the predictive
// coupling gamma^2 G^2 eta = 1 still holds.
struct ScheduleParams {
  long T = 1;
  double c_exp = 0.5;
  double a_exp = 0.0;
  double eta = 1.0;
  double gamma = 1.0;
  double G = 1.0;
  double F = 1.0;
  Variant variant = Variant::Predictive;
  bool custom = false;

  // |gamma^2 G^2 eta - 1|
  double coupling_residual() const;
};

ScheduleParams make_schedule(long T, double c_exp, Variant variant, double G, double F,
                             double a_exp = 0.0);

// Explicit eta/gamma, for tests and ablations (e.g. gamma = 0).
ScheduleParams make_custom_schedule(long T, double eta, double gamma, Variant variant, double G,
                                    double F);

}  // namespace ltoco
