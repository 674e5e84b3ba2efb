#pragma once

#include <chrono>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "northrt/taskmodel.hpp"

namespace northrt {

// Per-task worst-case response times indexed by task id. kDiverged marks a
// task whose fixed-point iteration left the analysis horizon.
using ResponseTimeVector = std::vector<double>;
inline constexpr double kDiverged = std::numeric_limits<double>::infinity();

// What the entries of a design vector stand for.
enum class VariableKind { kWcet, kFrequency, kPeriod };

// Binds a design vector x onto the timing parameters of a task set. Entry j
// drives every task listed in targets[j] (DAG nodes share one period).
struct DesignMapping {
  VariableKind kind = VariableKind::kWcet;
  std::vector<std::vector<int>> targets;
  // Frequency variables: exec = c_org / f instead of c_fix + c_var / f.
  bool simplified_energy = false;
  // Period variables: snap each period up into this sorted set before the
  // analysis runs. Empty means periods are used as given.
  std::vector<double> allowed_periods;

  static DesignMapping per_task(VariableKind kind, std::size_t task_count);
  // One variable per DAG; tasks without a dag_id get their own variable.
  static DesignMapping per_dag(VariableKind kind, const TaskSet& ts);

  std::size_t dimension() const { return targets.size(); }
};

struct TimingParameters {
  std::vector<double> exec;
  std::vector<double> period;
  std::vector<double> deadline;
};

// WCET at frequency 1.
double nominal_wcet(const Task& t);

// Smallest allowed value >= value; the largest allowed value if none is.
double snap_up(double value, std::span<const double> allowed);

TimingParameters apply_design(const TaskSet& ts, const DesignMapping& mapping,
                              std::span<const double> x);
// Same, writing into `out` and reusing its storage.
void apply_design(const TaskSet& ts, const DesignMapping& mapping, std::span<const double> x,
                  TimingParameters& out);

// Least fixed point of r_i = c_i + sum_{j in hp(i)} ceil(r_i / T_j) c_j for a
// single-core preemptive set. Iteration starts from warm[i] when given (the
// caller guarantees warm[i] does not exceed the true fixed point) and stops
// with kDiverged once the iterate exceeds horizon[i] (default: the deadline).
ResponseTimeVector rta_response_times(const TimingParameters& params, const PriorityAssignment& p,
                                      std::span<const double> warm = {},
                                      std::span<const double> horizon = {});
ResponseTimeVector rta_response_times(const TaskSet& ts, std::span<const double> exec,
                                      const PriorityAssignment& p,
                                      std::span<const double> warm = {});

struct SimulationOptions {
  std::uint64_t hyperperiod_cap = 10'000'000;
  // Abort at the first job finishing past its deadline.
  bool stop_on_miss = false;
};

struct SimulationTrace {
  ResponseTimeVector worst_response;
  std::vector<double> core_busy;
  std::uint64_t hyperperiod = 0;
  std::size_t jobs_completed = 0;
  bool deadline_missed = false;
  // Smallest observed response time per task (>= its execution time).
  std::vector<double> best_response;
};

// Global non-preemptive fixed-priority scheduling of all jobs released in one
// hyperperiod, DAGs released synchronously at t = 0. A node job becomes
// eligible when its predecessors of the same release have finished. Among
// eligible jobs: higher priority, then earlier release, then lower task id.
SimulationTrace simulate_np_multicore_trace(const TaskSet& ts, const TimingParameters& params,
                                            const PriorityAssignment& p, int cores,
                                            const SimulationOptions& options = {});
ResponseTimeVector simulate_np_multicore(const TaskSet& ts, std::span<const double> exec,
                                         const PriorityAssignment& p, int cores);

bool meets_deadlines(std::span<const double> response, std::span<const double> deadline);

// Black-box Sched(x, P). Every call to is_schedulable or to a response-time
// query adds exactly one to query_count().
class SchedulabilityOracle {
 public:
  virtual ~SchedulabilityOracle() = default;

  bool is_schedulable(std::span<const double> x, const PriorityAssignment& p);
  std::uint64_t query_count() const { return queries_; }
  virtual std::string name() const = 0;

 protected:
  void count_query() { ++queries_; }
  virtual bool query(std::span<const double> x, const PriorityAssignment& p) = 0;

 private:
  std::uint64_t queries_ = 0;
};

// Oracle backed by an analysis that can also report response times.
class ResponseTimeOracle : public SchedulabilityOracle {
 public:
  ResponseTimeOracle(TaskSet ts, DesignMapping mapping);

  ResponseTimeVector response_times(std::span<const double> x, const PriorityAssignment& p);
  // Response times when (x, p) is schedulable, nullopt otherwise.
  std::optional<ResponseTimeVector> schedulable_response_times(std::span<const double> x,
                                                               const PriorityAssignment& p);

  const TaskSet& taskset() const { return ts_; }
  const DesignMapping& mapping() const { return mapping_; }
  TimingParameters timing(std::span<const double> x) const;

  // Same analysis and binding, zero queries and empty caches.
  virtual std::unique_ptr<ResponseTimeOracle> fresh() const = 0;

 protected:
  // Full response times; with stop_early the analysis may abandon work once a
  // miss is certain (the returned vector then fails meets_deadlines).
  virtual ResponseTimeVector analyze(const TimingParameters& params, const PriorityAssignment& p,
                                     bool stop_early) = 0;
  bool query(std::span<const double> x, const PriorityAssignment& p) override;

 private:
  TaskSet ts_;
  DesignMapping mapping_;
  TimingParameters scratch_;
};

// Analytic RTA with a warm-start cache. The cache is reused only when the
// priority order and periods are unchanged and no execution time decreased.
class RtaOracle : public ResponseTimeOracle {
 public:
  RtaOracle(TaskSet ts, DesignMapping mapping);

  std::string name() const override { return "rta"; }
  std::unique_ptr<ResponseTimeOracle> fresh() const override;

  void set_warm_start(bool enabled) { warm_enabled_ = enabled; }
  std::uint64_t warm_hits() const { return warm_hits_; }

 protected:
  ResponseTimeVector analyze(const TimingParameters& params, const PriorityAssignment& p,
                             bool stop_early) override;

 private:
  struct Cache {
    PriorityAssignment priorities;
    std::vector<double> exec;
    std::vector<double> period;
    ResponseTimeVector response;
  };
  bool warm_enabled_ = true;
  std::optional<Cache> cache_;
  std::uint64_t warm_hits_ = 0;
};

class SimulationOracle : public ResponseTimeOracle {
 public:
  SimulationOracle(TaskSet ts, DesignMapping mapping, SimulationOptions options = {});

  std::string name() const override { return "sim"; }
  std::unique_ptr<ResponseTimeOracle> fresh() const override;

 protected:
  ResponseTimeVector analyze(const TimingParameters& params, const PriorityAssignment& p,
                             bool stop_early) override;

 private:
  SimulationOptions options_;
};

// Runs `command` through /bin/sh and talks the line protocol over its
// stdin/stdout: request "x_1 ... x_N\n" then "id_1 ... id_N\n" (highest
// priority first), reply "0\n" (schedulable) or "1\n" (unschedulable).
class ExternalProcessOracle : public SchedulabilityOracle {
 public:
  ExternalProcessOracle(const std::string& command, std::chrono::milliseconds timeout);
  ~ExternalProcessOracle() override;
  ExternalProcessOracle(const ExternalProcessOracle&) = delete;
  ExternalProcessOracle& operator=(const ExternalProcessOracle&) = delete;

  std::string name() const override { return "exec:" + command_; }

 protected:
  bool query(std::span<const double> x, const PriorityAssignment& p) override;

 private:
  std::string read_line();
  void shutdown();

  std::string command_;
  std::chrono::milliseconds timeout_;
  int pid_ = -1;
  int fd_ = -1;
  bool broken_ = false;
  std::string pending_;
};

// Serializes one request in the wire format (12 significant digits).
std::string format_oracle_request(std::span<const double> x, const PriorityAssignment& p);

std::unique_ptr<SchedulabilityOracle> spawn_external_oracle(
    const std::string& command,
    std::chrono::milliseconds timeout = std::chrono::milliseconds(10'000));

}  // namespace northrt
