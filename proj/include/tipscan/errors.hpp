#ifndef TIPSCAN_ERRORS_HPP
#define TIPSCAN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace tipscan {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid numerical parameters (non-positive tolerances, bad grids, ...).
class InvalidParams : public Error {
 public:
  using Error::Error;
};

// The adaptive integrator needed a step below the resolvable scale.
class StepUnderflow : public Error {
 public:
  using Error::Error;
};

// A path declared as a transition does not settle to constant tails.
class NonConvergentTails : public Error {
 public:
  using Error::Error;
};

// Breakpoints of a path fail the positive-minimum-gap requirement.
class NonDisperseBreakpoints : public Error {
 public:
  using Error::Error;
};

// A diagnostic window does not fit inside the trajectory time range.
class WindowOutOfRange : public Error {
 public:
  using Error::Error;
};

// A trajectory has too few nodes for finite-difference work.
class DegenerateTrajectory : public Error {
 public:
  using Error::Error;
};

// The bisection bracket endpoints classify on the wrong sides.
class BracketFailure : public Error {
 public:
  using Error::Error;
};

// A monotone root search found no sign change on its search range.
class NoBracket : public Error {
 public:
  using Error::Error;
};

// The base equation x' = -x^2 + p(t) lacks an attractor-repeller pair,
// so hull-level constructions are meaningless.
class HypothesisViolated : public Error {
 public:
  using Error::Error;
};

// Malformed run configuration (CLI / JSON layer).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace tipscan

#endif  // TIPSCAN_ERRORS_HPP
