#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

namespace northrt {

// Periodic task or DAG node. Times are in abstract time units.
struct Task {
  int id = 0;
  double period = 1.0;
  double deadline = 1.0;
  double c_fix = 0.0;  // frequency-independent part of the WCET
  double c_var = 0.0;  // frequency-dependent part, scaled by 1/f
  double c_org = 0.0;  // WCET at frequency 1 (simplified energy model)
  std::optional<int> dag_id;

  bool operator==(const Task&) const = default;
};

struct TaskSet {
  std::vector<Task> tasks;
  std::vector<std::pair<int, int>> edges;  // (from, to) precedence
  int cores = 1;
  bool preemptive = true;

  std::size_t size() const { return tasks.size(); }
  bool operator==(const TaskSet&) const = default;

  // Throws InvalidArgument when any structural invariant is broken: ids equal
  // positions, positive timing, edges in range and acyclic, one period per DAG.
  void validate() const;

  // Predecessor lists indexed by task id.
  std::vector<std::vector<int>> predecessors() const;

  // Distinct DAG ids in order of first appearance; empty for plain task sets.
  std::vector<int> dag_ids() const;
};

// Total order over task ids, highest priority first. rank() is 1-based.
class PriorityAssignment {
 public:
  PriorityAssignment() = default;
  explicit PriorityAssignment(std::vector<int> order);

  static PriorityAssignment identity(std::size_t n);

  const std::vector<int>& order() const { return order_; }
  std::size_t size() const { return order_.size(); }
  std::size_t rank(int task) const;
  bool contains(int task) const;

  bool operator==(const PriorityAssignment& o) const { return order_ == o.order_; }

 private:
  std::vector<int> order_;
  std::vector<std::size_t> rank_;
};

enum class PeriodDistribution { kLogUniform, kDiscreteSet };

struct GeneratorConfig {
  enum class Mode { kPeriodic, kDag };
  Mode mode = Mode::kPeriodic;
  int task_count = 5;  // periodic mode
  int dag_count = 3;   // DAG mode
  double total_utilization = 0.5;
  PeriodDistribution period_distribution = PeriodDistribution::kLogUniform;
  double period_min = 1e2;
  double period_max = 1e5;
  bool integral_periods = true;
  std::vector<double> period_set;
  double edge_probability = 0.0;
  int nodes_min = 1;
  int nodes_max = 20;
  int cores = 1;
  bool preemptive = true;
  // Share of each WCET that does not scale with frequency.
  double fixed_fraction = 0.0;
  std::uint64_t seed = 0;
};

// UUniFast: n utilizations uniform on the simplex summing to u_total.
std::vector<double> uunifast(int n, double u_total, std::mt19937_64& rng);
std::vector<double> uunifast(int n, double u_total, std::uint64_t seed);

// UUniFast resampled until every share is <= 1 (at most 10^4 draws).
std::vector<double> uunifast_capped(int n, double u_total, std::mt19937_64& rng);
std::vector<double> uunifast_capped(int n, double u_total, std::uint64_t seed);

// Precedence edges over node indices [0, count): each pair (a < b) gets an
// edge a -> b with the given probability. Acyclic by construction.
std::vector<std::pair<int, int>> random_dag_edges(int count, double probability,
                                                  std::mt19937_64& rng);

TaskSet generate_taskset(const GeneratorConfig& cfg);

inline constexpr std::uint64_t kNoHyperperiodCap = std::numeric_limits<std::uint64_t>::max();

// LCM of the periods. Non-integral period -> InvalidArgument; result above
// `cap` -> ResourceLimitError.
std::uint64_t hyperperiod(std::span<const double> periods, std::uint64_t cap = kNoHyperperiodCap);
std::uint64_t hyperperiod(const TaskSet& ts, std::uint64_t cap = kNoHyperperiodCap);

// Shorter period first; ties go to the lower task id.
PriorityAssignment rate_monotonic_priorities(const TaskSet& ts);

void to_json(nlohmann::json& j, const Task& t);
void from_json(const nlohmann::json& j, Task& t);
void to_json(nlohmann::json& j, const TaskSet& ts);
void from_json(const nlohmann::json& j, TaskSet& ts);

}  // namespace northrt
