#pragma once

#include <stdexcept>
#include <string>

namespace loopzeta {

// Invalid model, parameter or input file.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A series or quadrature failed to reach its target tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double achieved)
      : std::runtime_error(what + " (achieved tolerance " + std::to_string(achieved) + ")"),
        achieved_(achieved) {}

  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

// Evaluation requested exactly at a pole of the continued zeta function.
class PoleError : public std::domain_error {
 public:
  PoleError(const std::string& what, double location)
      : std::domain_error(what), location_(location) {}

  double location() const { return location_; }

 private:
  double location_;
};

// A truncation would drop more mass than the requested threshold.
class TailBoundError : public std::runtime_error {
 public:
  TailBoundError(const std::string& what, double bound)
      : std::runtime_error(what + " (tail bound " + std::to_string(bound) + ")"), bound_(bound) {}

  double bound() const { return bound_; }

 private:
  double bound_;
};

}  // namespace loopzeta
