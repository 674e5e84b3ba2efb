#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

#include "northrt/oracle.hpp"
#include "northrt/problem.hpp"

namespace northrt {

struct EnergyModelParams {
  double alpha = 1.76;  // W / GHz^3
  double gamma = 3.0;
  double beta = 0.5;    // static power; dropped by the simplified model
  bool simplified = false;
};

// H / T_i per task. H falls back to 1 when the hyperperiod is not an integer
// below 10^12; the weights then differ from the exact ones by the factor H.
std::vector<double> energy_weights(const TaskSet& ts);

// E_i(f) for one task at frequency f.
double task_energy(const Task& t, double f, double weight, const EnergyModelParams& params);

// sqrt(E_i) per task; f holds one frequency per task.
Vector energy_residuals(const TaskSet& ts, std::span<const double> f,
                        const EnergyModelParams& params);

class EnergyProblem : public Problem {
 public:
  // mapping must be a frequency mapping and match the oracle's binding.
  EnergyProblem(TaskSet ts, DesignMapping mapping, EnergyModelParams params, Box box,
                SchedulabilityOracle& oracle, PriorityAssignment p);

  std::string name() const override { return "energy"; }
  Vector residuals(const Vector& x) override;

  std::vector<double> task_frequencies(const Vector& x) const;

 private:
  TaskSet ts_;
  DesignMapping mapping_;
  EnergyModelParams params_;
  std::vector<double> weights_;
  std::vector<int> variable_of_task_;
};

struct ControlWeights {
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 0.0;
};

// alpha T + beta r + gamma r^2; values in [-1e-12, 0) become 0, anything
// lower throws NumericError.
double control_cost_argument(const ControlWeights& w, double period, double response);

// sqrt of the cost argument per task.
Vector control_residuals(std::span<const double> periods, std::span<const double> response,
                         std::span<const ControlWeights> weights);

// Periods are the design variables (one per DAG), response times come from the
// oracle under the current priorities. Residuals are undefined (EvaluationError)
// where the design is unschedulable.
class ControlProblem : public Problem {
 public:
  ControlProblem(std::vector<ControlWeights> weights, Box box, ResponseTimeOracle& oracle,
                 PriorityAssignment p);

  std::string name() const override { return "control"; }
  Vector residuals(const Vector& x) override;
  bool schedulable(const Vector& x) override;
  bool depends_on_response_times() const override { return true; }

  std::optional<ResponseTimeVector> response_times(const Vector& x,
                                                   const PriorityAssignment& p) override;
  double cost(const Vector& x, const ResponseTimeVector& r) override;
  std::vector<double> cost_gradient(const Vector& x, const ResponseTimeVector& r) override;

  const std::vector<ControlWeights>& weights() const { return weights_; }
  // Unsnapped period of every task at x.
  std::vector<double> task_periods(const Vector& x) const;

 private:
  ResponseTimeOracle& rt_oracle_;
  std::vector<ControlWeights> weights_;
  std::vector<int> variable_of_task_;
  std::map<std::pair<std::vector<int>, std::vector<double>>, std::optional<ResponseTimeVector>>
      memo_;
};

// Per dimension: round down to the largest allowed value <= T_j when the
// oracle accepts it (later dimensions held at their rounded-up values), else
// round up. The result is checked once more; RoundingInfeasible if it fails.
std::vector<double> round_periods(std::span<const double> periods,
                                  std::span<const double> allowed,
                                  SchedulabilityOracle& oracle, const PriorityAssignment& p);

// Cost of a rounded period vector, nullopt when it is not schedulable.
using RoundingCost = std::function<std::optional<double>(const std::vector<double>&)>;

// Cheapest of all floor/ceiling combinations when at most max_exhaustive
// dimensions have two choices; the greedy rule above otherwise. The winner is
// re-checked with the oracle; RoundingInfeasible if nothing qualifies.
std::vector<double> round_periods(std::span<const double> periods,
                                  std::span<const double> allowed,
                                  SchedulabilityOracle& oracle, const PriorityAssignment& p,
                                  const RoundingCost& cost, std::size_t max_exhaustive = 10);

// {1,2,3,4,5,6,8} x {100,1000,10000}, sorted.
std::vector<double> default_period_set();

void to_json(nlohmann::json& j, const EnergyModelParams& p);
void from_json(const nlohmann::json& j, EnergyModelParams& p);
void to_json(nlohmann::json& j, const ControlWeights& w);
void from_json(const nlohmann::json& j, ControlWeights& w);

}  // namespace northrt
