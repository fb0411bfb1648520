#pragma once

#include <Eigen/Core>

namespace ltoco {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// A point x in X, the learner's action at one step. Construction rejects an
// empty or non-finite coordinate vector.
class DecisionVector {
 public:
  explicit DecisionVector(Vector coords);

  const Vector& coords() const noexcept { return coords_; }
  Index dim() const noexcept { return coords_.size(); }
  double operator[](Index i) const { return coords_[i]; }

  operator const Vector&() const noexcept { return coords_; }  // NOLINT

 private:
  Vector coords_;
};

// f_t(x) = <c_t, x>.
class LinearCost {
 public:
  explicit LinearCost(Vector gradient);

  const Vector& gradient() const noexcept { return gradient_; }
  Index dim() const noexcept { return gradient_.size(); }
  double value(const Vector& x) const;
  double norm() const { return gradient_.norm(); }

 private:
  Vector gradient_;
};

// Componentwise max(v, 0).
Vector positive_part(const Vector& v);

bool all_finite(const Vector& v);

}  // namespace ltoco
