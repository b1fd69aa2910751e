#pragma once

#include <stdexcept>
#include <string>

namespace modelscale {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller-supplied argument violates an operation's precondition.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// A computed quantity is not finite.
class NumericError : public Error {
 public:
  using Error::Error;
};

// An iterative solver hit its iteration cap.
class NonConvergenceError : public Error {
 public:
  using Error::Error;
};

// A modelling assumption required by an operation does not hold.
class AssumptionError : public Error {
 public:
  using Error::Error;
};

}  // namespace modelscale
