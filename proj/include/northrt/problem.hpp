#pragma once

#include <functional>
#include <optional>
#include <string>

#include "northrt/numcore.hpp"
#include "northrt/oracle.hpp"
#include "northrt/taskmodel.hpp"

namespace northrt {

// min sum_i F_i(x)^2 subject to lb <= x <= ub and Sched(x, P). The oracle is
// not owned and must outlive the problem.
class Problem {
 public:
  virtual ~Problem() = default;
  Problem(const Problem&) = delete;
  Problem& operator=(const Problem&) = delete;

  virtual std::string name() const = 0;

  std::size_t dimension() const { return box_.dimension(); }
  std::size_t terms() const { return terms_; }
  const Box& box() const { return box_; }
  SchedulabilityOracle& oracle() const { return oracle_; }

  const PriorityAssignment& priorities() const { return priorities_; }
  void set_priorities(PriorityAssignment p);

  // Throws EvaluationError where the residuals are undefined.
  virtual Vector residuals(const Vector& x) = 0;
  double objective(const Vector& x) { return residuals(x).squaredNorm(); }

  // One oracle query under the current priorities (fewer if cached).
  virtual bool schedulable(const Vector& x);
  // Box check first; no query for points outside the box.
  bool feasible(const Vector& x);

  // Residuals bound to the current priorities.
  ResidualSystem residual_system();

  // True when residuals read response times, i.e. the objective may rise when
  // a variable moves toward feasibility (descent-mode elimination tests).
  virtual bool depends_on_response_times() const { return false; }

  // Response times of (x, p), nullopt when unschedulable. Needs an oracle
  // derived from ResponseTimeOracle.
  virtual std::optional<ResponseTimeVector> response_times(const Vector& x,
                                                           const PriorityAssignment& p);
  virtual std::vector<double> deadlines(const Vector& x);

  // Objective written as H(x, r). The default ignores r.
  virtual double cost(const Vector& x, const ResponseTimeVector& r);
  // dH/dr at fixed x. The default is zero.
  virtual std::vector<double> cost_gradient(const Vector& x, const ResponseTimeVector& r);

 protected:
  Problem(Box box, std::size_t terms, SchedulabilityOracle& oracle, PriorityAssignment p);

  ResponseTimeOracle& response_time_oracle() const;

 private:
  Box box_;
  std::size_t terms_;
  SchedulabilityOracle& oracle_;
  PriorityAssignment priorities_;
};

// Residuals given as a plain function of x.
class FunctionProblem : public Problem {
 public:
  using Residuals = std::function<Vector(const Vector&)>;

  FunctionProblem(std::string name, Box box, std::size_t terms, Residuals residuals,
                  SchedulabilityOracle& oracle, PriorityAssignment p);

  std::string name() const override { return name_; }
  Vector residuals(const Vector& x) override { return residuals_(x); }

 private:
  std::string name_;
  Residuals residuals_;
};

}  // namespace northrt
