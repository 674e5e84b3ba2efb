#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "northrt/north.hpp"

namespace northrt {

// Failed priority moves per (task, rank). Counts only grow.
class FailureLedger {
 public:
  explicit FailureLedger(int threshold = 1) : threshold_(threshold) {}

  int threshold() const { return threshold_; }
  int count(int task, std::size_t rank) const;
  void record_failure(int task, std::size_t rank) { ++counts_[{task, rank}]; }
  // A move from this rank may still be tried.
  bool allows(int task, std::size_t rank) const { return count(task, rank) <= threshold_; }

 private:
  int threshold_;
  std::map<std::pair<int, std::size_t>, int> counts_;
};

struct ResponseCost {
  std::function<double(std::span<const double>)> value;
  std::function<std::vector<double>(std::span<const double>)> gradient;
};

struct BarrierValue {
  double value = 0.0;
  std::vector<double> gradient;
  bool infinite = false;  // some r_i >= D_i
};

// Z = H(r) - w sum log(D_i - r_i); dZ/dr_i = dH/dr_i + w / (D_i - r_i).
BarrierValue barrier_value_and_gradient(const ResponseCost& h, std::span<const double> r,
                                        std::span<const double> deadlines, double w);

enum class MoveDirection { kRaise, kLower };

struct PriorityMove {
  PriorityAssignment priorities;
  bool noop = false;
};

// Swaps the task with its neighbour one rank up (raise) or down (lower).
PriorityMove change_task_priority_by_one(const PriorityAssignment& p, int task,
                                         MoveDirection direction);

struct PriorityOutcome {
  PriorityAssignment priorities;
  int accepted_moves = 0;
  int attempted_moves = 0;
  double cost = 0.0;
};

// One pass of the priority adjustment. Tasks are visited by |delta_r|
// descending; delta_r_i < 0 asks for a raise, > 0 for a lower. A move is kept
// only when H strictly drops and the result stays schedulable.
PriorityOutcome optimize_priorities(Problem& problem, const Vector& x, const PriorityAssignment& p,
                                    std::span<const double> delta_r, FailureLedger& ledger);

struct NorthPlusOptions {
  NorthOptions north;
  double initial_weight = 1e7;
  double weight_floor = 1e-9;
  double step_scale = 1.0;  // eta
  int max_iterations = 100;
  int ledger_threshold = 1;
};

struct NorthPlusTrace {
  std::vector<double> objective;  // at start, then after each outer iteration
  std::vector<std::uint64_t> queries;
  std::vector<int> accepted_moves;
  std::vector<double> descent;
  int elimination_rounds = 0;
  int iterations = 0;
  bool stopped = false;
};

struct NorthPlusResult {
  VariableSpace space;
  PriorityAssignment priorities;
  NorthPlusTrace trace;
};

// Alternates NMBO at fixed priorities, one barrier-gradient step on r,
// priority adjustment and variable elimination. The problem's priorities are
// left at the returned assignment.
NorthPlusResult northplus_optimize(Problem& problem, const Vector& x0, const PriorityAssignment& p0,
                                   const NorthPlusOptions& options = {});

}  // namespace northrt
