#include "ltoco/queue.hpp"

#include "ltoco/errors.hpp"

namespace ltoco {

namespace {

void check_increment(double gamma, const Vector& violation, Index m) {
  if (violation.size() != m) throw InvalidInput("VirtualQueue: dimension mismatch");
  if (!(gamma >= 0.0)) throw InvalidParameter("VirtualQueue: gamma must be >= 0");
  if ((violation.array() < 0.0).any()) {
    throw InvalidInput("VirtualQueue: increments must be nonnegative");
  }
}

}  // namespace

VirtualQueue::VirtualQueue(Index m) : q_(Vector::Zero(m)), q_hat_(Vector::Zero(m)) {
  if (m < 1) throw InvalidInput("VirtualQueue: need at least one constraint");
}

void VirtualQueue::accumulate(double gamma, const Vector& violation) {
  check_increment(gamma, violation, size());
  q_ += gamma * violation;
}

void VirtualQueue::set_lookahead(double gamma, const Vector& violation) {
  check_increment(gamma, violation, size());
  q_hat_ = q_ + gamma * violation;
}

}  // namespace ltoco
