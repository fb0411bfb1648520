#pragma once

#include <random>
#include <utility>
#include <variant>

#include "ltoco/types.hpp"

namespace ltoco {

struct Box {
  Vector lower;
  Vector upper;
};

struct Ball {
  Vector center;
  double radius = 1.0;
};

// Closed, convex, bounded decision set X with a closed-form projection.
class FeasibleSet {
 public:
  static FeasibleSet box(Vector lower, Vector upper);
  static FeasibleSet cube(Index p, double half_width);  // [-r, r]^p
  static FeasibleSet ball(Vector center, double radius);

  Index dim() const noexcept { return dim_; }
  bool is_box() const noexcept { return std::holds_alternative<Box>(shape_); }
  const Box& as_box() const { return std::get<Box>(shape_); }
  const Ball& as_ball() const { return std::get<Ball>(shape_); }

  // argmin_{x in X} ||x - y||_2
  Vector project(const Vector& y) const;
  bool contains(const Vector& x, double tol = 1e-12) const;

  double diameter() const;
  // max_{x in X} <a, x>
  double support(const Vector& a) const;
  // max_{x in X} ||x - point||_2
  double max_distance_from(const Vector& point) const;

  // Axis-aligned bounding box (lower, upper).
  Box bounding_box() const;

  // Uniform sample from X.
  Vector sample(std::mt19937_64& rng) const;

 private:
  explicit FeasibleSet(std::variant<Box, Ball> shape, Index dim)
      : shape_(std::move(shape)), dim_(dim) {}

  std::variant<Box, Ball> shape_;
  Index dim_;
};

enum class RegularizerKind { Quadratic };

// 1-strongly convex (w.r.t. ||.||_2) mirror map R with its Bregman divergence.
// Only R(x) = 0.5 ||x||^2 is provided.
class Regularizer {
 public:
  Regularizer() = default;
  explicit Regularizer(RegularizerKind kind) : kind_(kind) {}

  RegularizerKind kind() const noexcept { return kind_; }
  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  // D_R(x, y) = R(x) - R(y) - <grad R(y), x - y>
  double divergence(const Vector& x, const Vector& y) const;

 private:
  RegularizerKind kind_ = RegularizerKind::Quadratic;
};

DecisionVector project(const FeasibleSet& set, const Vector& y);
double bregman(const Regularizer& R, const Vector& x, const Vector& y);
// argmin_{x in X} R(x)
DecisionVector regularizer_minimizer(const Regularizer& R, const FeasibleSet& set);

}  // namespace ltoco
