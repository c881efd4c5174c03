#pragma once

#include <stdexcept>
#include <string>

namespace mixfd {

/// Caller passed something outside an operation's domain.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A configuration (plan, network, CLI file) failed validation.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Least-squares input has too few distinct abscissae or is rank deficient.
class DegenerateInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Fitted parabola opens upward (or is flat) so it has no capacity vertex.
class NonConcaveFitError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A simulation invariant broke during stepping (collision, conflict, starvation).
class SimulationFault : public std::runtime_error {
 public:
  SimulationFault(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace mixfd
