#pragma once

#include <stdexcept>
#include <string>

namespace ltoco {

// Base for every error raised by the library. Callers that only care about
// "something in ltoco rejected the input" can catch this one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dimension mismatch or malformed vector/matrix argument.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Numeric parameter outside its admissible range (e.g. c_exp not in (0,1)).
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

// Incompatible combination of otherwise valid pieces (baseline engine on a
// time-varying environment, predictor horizon mismatch, bad config file).
class InvalidConfiguration : public Error {
 public:
  using Error::Error;
};

// A generated environment violates its declared bounds.
class GenerationError : public Error {
 public:
  GenerationError(const std::string& what, long step)
      : Error(what + " (step " + std::to_string(step) + ")"), step_(step) {}

  long step() const noexcept { return step_; }

 private:
  long step_;
};

class UnsupportedDimension : public Error {
 public:
  using Error::Error;
};

}  // namespace ltoco
