#include "ltoco/constraints.hpp"

#include <string>
#include <utility>

#include "ltoco/errors.hpp"

namespace ltoco {

namespace {

void check_pair(const Matrix& A, const Vector& b, Index m, Index p) {
  if (A.rows() != m || A.cols() != p || b.size() != m) {
    throw InvalidInput("ConstraintBlock: inconsistent A/b shapes");
  }
  if (!A.allFinite() || !b.allFinite()) throw InvalidInput("ConstraintBlock: non-finite data");
}

}  // namespace

ConstraintBlock ConstraintBlock::static_affine(Matrix A, Vector b, long horizon) {
  if (horizon < 1) throw InvalidInput("ConstraintBlock: horizon must be >= 1");
  if (A.rows() < 1 || A.cols() < 1) throw InvalidInput("ConstraintBlock: empty matrix");
  ConstraintBlock g;
  g.kind_ = ConstraintKind::StaticAffine;
  g.m_ = A.rows();
  g.p_ = A.cols();
  g.horizon_ = horizon;
  check_pair(A, b, g.m_, g.p_);
  g.A_.push_back(std::move(A));
  g.b_.push_back(std::move(b));
  return g;
}

ConstraintBlock ConstraintBlock::time_varying(std::vector<Matrix> A, std::vector<Vector> b) {
  if (A.empty() || A.size() != b.size()) {
    throw InvalidInput("ConstraintBlock: need one (A_t, b_t) pair per step");
  }
  if (A.front().rows() < 1 || A.front().cols() < 1) {
    throw InvalidInput("ConstraintBlock: empty matrix");
  }
  ConstraintBlock g;
  g.kind_ = ConstraintKind::TimeVaryingAffine;
  g.m_ = A.front().rows();
  g.p_ = A.front().cols();
  g.horizon_ = static_cast<long>(A.size());
  for (std::size_t i = 0; i < A.size(); ++i) check_pair(A[i], b[i], g.m_, g.p_);
  g.A_ = std::move(A);
  g.b_ = std::move(b);
  return g;
}

Index ConstraintBlock::slot(long t) const {
  if (t < 1 || t > horizon_) {
    throw InvalidInput("ConstraintBlock: step " + std::to_string(t) + " outside 1.." +
                       std::to_string(horizon_));
  }
  return is_static() ? 0 : static_cast<Index>(t - 1);
}

const Matrix& ConstraintBlock::matrix(long t) const { return A_[slot(t)]; }
const Vector& ConstraintBlock::offset(long t) const { return b_[slot(t)]; }

Vector ConstraintBlock::evaluate(long t, const Vector& x) const {
  if (x.size() != p_) throw InvalidInput("ConstraintBlock::evaluate: dimension mismatch");
  const Index s = slot(t);
  return A_[s] * x - b_[s];
}

double ConstraintBlock::weighted_violation(long t, const Vector& x, const Vector& w) const {
  if (w.size() != m_) throw InvalidInput("ConstraintBlock: weight dimension mismatch");
  return w.dot(evaluate(t, x).cwiseMax(0.0));
}

Vector ConstraintBlock::weighted_violation_subgradient(long t, const Vector& x,
                                                       const Vector& w) const {
  if (w.size() != m_) throw InvalidInput("ConstraintBlock: weight dimension mismatch");
  if ((w.array() < 0.0).any()) throw InvalidInput("ConstraintBlock: weights must be >= 0");
  const Vector g = evaluate(t, x);
  const Index s = slot(t);
  Vector out = Vector::Zero(p_);
  for (Index j = 0; j < m_; ++j) {
    if (g[j] > 0.0) out.noalias() += w[j] * A_[s].row(j).transpose();
  }
  return out;
}

}  // namespace ltoco
