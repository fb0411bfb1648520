#pragma once

#include <vector>

#include "ltoco/types.hpp"

namespace ltoco {

enum class ConstraintKind { StaticAffine, TimeVaryingAffine };

// Time-indexed affine constraints g_t(x) = A_t x - b_t, t = 1..T.
//
// The static kind keeps a single (A, b) pair for every step; the time-varying
// kind stores one pair per step. Only affine rows are supported. Everything
// downstream goes through evaluate() / weighted_violation_subgradient(), so a
// general convex block only has to provide those two operations plus a
// Lipschitz bound.
class ConstraintBlock {
 public:
  static ConstraintBlock static_affine(Matrix A, Vector b, long horizon);
  static ConstraintBlock time_varying(std::vector<Matrix> A, std::vector<Vector> b);

  ConstraintKind kind() const noexcept { return kind_; }
  bool is_static() const noexcept { return kind_ == ConstraintKind::StaticAffine; }
  Index num_constraints() const noexcept { return m_; }
  Index dim() const noexcept { return p_; }
  long horizon() const noexcept { return horizon_; }

  // t is 1-based.
  const Matrix& matrix(long t) const;
  const Vector& offset(long t) const;

  // A_t x - b_t.
  Vector evaluate(long t, const Vector& x) const;

  // <w, [g_t(x)]_+>.
  double weighted_violation(long t, const Vector& x, const Vector& w) const;

  // sum_j w_j s_j with s_j = row j of A_t when g_t^j(x) > 0 and 0 otherwise
  // (the kink g_t^j(x) = 0 takes the zero branch).
  Vector weighted_violation_subgradient(long t, const Vector& x, const Vector& w) const;

 private:
  ConstraintBlock() = default;
  Index slot(long t) const;

  ConstraintKind kind_ = ConstraintKind::StaticAffine;
  Index m_ = 0;
  Index p_ = 0;
  long horizon_ = 0;
  std::vector<Matrix> A_;
  std::vector<Vector> b_;
};

}  // namespace ltoco
