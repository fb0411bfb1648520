#pragma once

#include "ltoco/types.hpp"

namespace ltoco {

// Virtual queues q_t and q_hat_t. Both start at zero and only ever grow by
// nonnegative increments gamma * [g]_+.
class VirtualQueue {
 public:
  explicit VirtualQueue(Index m);

  const Vector& q() const noexcept { return q_; }
  const Vector& q_hat() const noexcept { return q_hat_; }
  Index size() const noexcept { return q_.size(); }

  // q <- q + gamma * violation
  void accumulate(double gamma, const Vector& violation);

  // q_hat <- q + gamma * violation (look-ahead copy; q itself is untouched)
  void set_lookahead(double gamma, const Vector& violation);

 private:
  Vector q_;
  Vector q_hat_;
};

}  // namespace ltoco
