#include "ltoco/geometry.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "ltoco/errors.hpp"

namespace ltoco {

FeasibleSet FeasibleSet::box(Vector lower, Vector upper) {
  if (lower.size() < 1 || lower.size() != upper.size()) {
    throw InvalidInput("FeasibleSet::box: bounds must be nonempty and of equal dimension");
  }
  if (!lower.allFinite() || !upper.allFinite()) {
    throw InvalidInput("FeasibleSet::box: bounds must be finite");
  }
  if ((lower.array() > upper.array()).any()) {
    throw InvalidInput("FeasibleSet::box: lower > upper");
  }
  const Index p = lower.size();
  return FeasibleSet(Box{std::move(lower), std::move(upper)}, p);
}

FeasibleSet FeasibleSet::cube(Index p, double half_width) {
  if (!(half_width > 0.0)) throw InvalidInput("FeasibleSet::cube: half width must be > 0");
  return box(Vector::Constant(p, -half_width), Vector::Constant(p, half_width));
}

FeasibleSet FeasibleSet::ball(Vector center, double radius) {
  if (center.size() < 1 || !center.allFinite()) {
    throw InvalidInput("FeasibleSet::ball: center must be finite and nonempty");
  }
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InvalidInput("FeasibleSet::ball: radius must be finite and > 0");
  }
  const Index p = center.size();
  return FeasibleSet(Ball{std::move(center), radius}, p);
}

Vector FeasibleSet::project(const Vector& y) const {
  if (y.size() != dim_) throw InvalidInput("FeasibleSet::project: dimension mismatch");
  if (const auto* b = std::get_if<Box>(&shape_)) {
    return y.cwiseMax(b->lower).cwiseMin(b->upper);
  }
  const auto& ball = std::get<Ball>(shape_);
  const Vector d = y - ball.center;
  const double n = d.norm();
  if (n <= ball.radius) return y;
  return ball.center + (ball.radius / n) * d;
}

bool FeasibleSet::contains(const Vector& x, double tol) const {
  if (x.size() != dim_) return false;
  if (const auto* b = std::get_if<Box>(&shape_)) {
    return ((x - b->lower).array() >= -tol).all() && ((b->upper - x).array() >= -tol).all();
  }
  const auto& ball = std::get<Ball>(shape_);
  return (x - ball.center).norm() <= ball.radius + tol;
}

double FeasibleSet::diameter() const {
  if (const auto* b = std::get_if<Box>(&shape_)) return (b->upper - b->lower).norm();
  return 2.0 * std::get<Ball>(shape_).radius;
}

double FeasibleSet::support(const Vector& a) const {
  if (a.size() != dim_) throw InvalidInput("FeasibleSet::support: dimension mismatch");
  if (const auto* b = std::get_if<Box>(&shape_)) {
    return (a.array() * b->lower.array()).max(a.array() * b->upper.array()).sum();
  }
  const auto& ball = std::get<Ball>(shape_);
  return a.dot(ball.center) + ball.radius * a.norm();
}

double FeasibleSet::max_distance_from(const Vector& point) const {
  if (point.size() != dim_) throw InvalidInput("FeasibleSet: dimension mismatch");
  if (const auto* b = std::get_if<Box>(&shape_)) {
    return (b->lower - point).cwiseAbs().cwiseMax((b->upper - point).cwiseAbs()).norm();
  }
  const auto& ball = std::get<Ball>(shape_);
  return (ball.center - point).norm() + ball.radius;
}

Box FeasibleSet::bounding_box() const {
  if (const auto* b = std::get_if<Box>(&shape_)) return *b;
  const auto& ball = std::get<Ball>(shape_);
  return Box{ball.center.array() - ball.radius, ball.center.array() + ball.radius};
}

Vector FeasibleSet::sample(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (const auto* b = std::get_if<Box>(&shape_)) {
    Vector x(dim_);
    for (Index i = 0; i < dim_; ++i) x[i] = b->lower[i] + unit(rng) * (b->upper[i] - b->lower[i]);
    return x;
  }
  // Gaussian direction, radius ~ r * U^(1/p).
  const auto& ball = std::get<Ball>(shape_);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector d(dim_);
  double n = 0.0;
  do {
    for (Index i = 0; i < dim_; ++i) d[i] = normal(rng);
    n = d.norm();
  } while (n == 0.0);
  const double r = ball.radius * std::pow(unit(rng), 1.0 / static_cast<double>(dim_));
  return ball.center + (r / n) * d;
}

double Regularizer::value(const Vector& x) const { return 0.5 * x.squaredNorm(); }

Vector Regularizer::gradient(const Vector& x) const { return x; }

double Regularizer::divergence(const Vector& x, const Vector& y) const {
  if (x.size() != y.size()) throw InvalidInput("bregman: dimension mismatch");
  return 0.5 * (x - y).squaredNorm();
}

DecisionVector project(const FeasibleSet& set, const Vector& y) {
  if (!y.allFinite()) throw InvalidInput("project: input is not finite");
  return DecisionVector(set.project(y));
}

double bregman(const Regularizer& R, const Vector& x, const Vector& y) {
  return R.divergence(x, y);
}

DecisionVector regularizer_minimizer(const Regularizer& R, const FeasibleSet& set) {
  switch (R.kind()) {
    case RegularizerKind::Quadratic:
      return DecisionVector(set.project(Vector::Zero(set.dim())));
  }
  throw InvalidInput("regularizer_minimizer: unknown regularizer");
}

}  // namespace ltoco
