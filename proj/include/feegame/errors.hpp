#pragma once

#include <stdexcept>
#include <string>

namespace feegame {

// Argument outside the domain of a function (strategy out of range,
// non-stochastic matrix, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Shapes or indexing conventions that do not line up.
class ConfigurationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotReadyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Requested payoff target lies outside the controllable interval.
class InfeasibleTargetError : public std::out_of_range {
 public:
  InfeasibleTargetError(const std::string& what, double lo, double hi)
      : std::out_of_range(what), lo_(lo), hi_(hi) {}
  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  double lo_;
  double hi_;
};

// Reading or writing a file failed.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// No nonzero ZD coefficient keeps the policy inside [0,1].
class DegenerateTargetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace feegame
