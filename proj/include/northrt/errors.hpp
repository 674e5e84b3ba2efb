#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace northrt {

// Precondition violated by the caller (bad sizes, nonpositive parameters, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computation exceeded a configured cap (hyperperiod, grid size).
class ResourceLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Linear algebra or evaluation produced something unusable.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The schedulability oracle itself failed. Never means "unschedulable".
class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Residuals could not be evaluated at a point (e.g. response times undefined).
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RoundingInfeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Heuristic starting point is not schedulable; carries the probed point.
class InitialInfeasible : public std::runtime_error {
 public:
  InitialInfeasible(const std::string& what, std::vector<double> point)
      : std::runtime_error(what), point_(std::move(point)) {}
  const std::vector<double>& point() const { return point_; }

 private:
  std::vector<double> point_;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace northrt
