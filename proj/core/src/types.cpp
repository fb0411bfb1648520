#include "ltoco/types.hpp"

#include <utility>

#include "ltoco/errors.hpp"

namespace ltoco {

bool all_finite(const Vector& v) { return v.allFinite(); }

DecisionVector::DecisionVector(Vector coords) : coords_(std::move(coords)) {
  if (coords_.size() < 1) throw InvalidInput("DecisionVector needs dimension >= 1");
  if (!coords_.allFinite()) throw InvalidInput("DecisionVector has non-finite coordinates");
}

LinearCost::LinearCost(Vector gradient) : gradient_(std::move(gradient)) {
  if (gradient_.size() < 1) throw InvalidInput("LinearCost needs dimension >= 1");
  if (!gradient_.allFinite()) throw InvalidInput("LinearCost gradient is not finite");
}

double LinearCost::value(const Vector& x) const {
  if (x.size() != gradient_.size()) throw InvalidInput("LinearCost::value: dimension mismatch");
  return gradient_.dot(x);
}

Vector positive_part(const Vector& v) { return v.cwiseMax(0.0); }

}  // namespace ltoco
