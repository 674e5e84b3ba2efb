#include "northrt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <string>

#include "northrt/errors.hpp"

namespace northrt {

DesignMapping DesignMapping::per_task(VariableKind kind, std::size_t task_count) {
  DesignMapping m;
  m.kind = kind;
  for (std::size_t i = 0; i < task_count; ++i) m.targets.push_back({static_cast<int>(i)});
  return m;
}

DesignMapping DesignMapping::per_dag(VariableKind kind, const TaskSet& ts) {
  DesignMapping m;
  m.kind = kind;
  std::map<int, std::size_t> slot;
  for (const Task& t : ts.tasks) {
    if (!t.dag_id) {
      m.targets.push_back({t.id});
      continue;
    }
    auto [it, inserted] = slot.try_emplace(*t.dag_id, m.targets.size());
    if (inserted) m.targets.emplace_back();
    m.targets[it->second].push_back(t.id);
  }
  return m;
}

double nominal_wcet(const Task& t) {
  const double full = t.c_fix + t.c_var;
  return full > 0 ? full : t.c_org;
}

double snap_up(double value, std::span<const double> allowed) {
  if (allowed.empty()) return value;
  auto it = std::lower_bound(allowed.begin(), allowed.end(), value);
  return it == allowed.end() ? allowed.back() : *it;
}

void apply_design(const TaskSet& ts, const DesignMapping& mapping, std::span<const double> x,
                  TimingParameters& params) {
  if (x.size() != mapping.dimension()) {
    throw InvalidArgument("design vector has " + std::to_string(x.size()) + " entries, mapping " +
                          std::to_string(mapping.dimension()));
  }
  const std::size_t n = ts.size();
  params.exec.resize(n);
  params.period.resize(n);
  params.deadline.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    params.exec[i] = nominal_wcet(ts.tasks[i]);
    params.period[i] = ts.tasks[i].period;
    params.deadline[i] = ts.tasks[i].deadline;
  }
  for (std::size_t j = 0; j < mapping.dimension(); ++j) {
    const double value = x[j];
    for (int id : mapping.targets[j]) {
      if (id < 0 || static_cast<std::size_t>(id) >= n) {
        throw InvalidArgument("mapping references missing task " + std::to_string(id));
      }
      const Task& t = ts.tasks[id];
      switch (mapping.kind) {
        case VariableKind::kWcet:
          params.exec[id] = value;
          break;
        case VariableKind::kFrequency:
          if (!(value > 0)) throw InvalidArgument("frequency must be positive");
          params.exec[id] = mapping.simplified_energy ? t.c_org / value : t.c_fix + t.c_var / value;
          break;
        case VariableKind::kPeriod: {
          const double period = snap_up(value, mapping.allowed_periods);
          if (!(period > 0)) throw InvalidArgument("period must be positive");
          params.period[id] = period;
          params.deadline[id] = period;
          break;
        }
      }
    }
  }
}

TimingParameters apply_design(const TaskSet& ts, const DesignMapping& mapping,
                              std::span<const double> x) {
  TimingParameters params;
  apply_design(ts, mapping, x, params);
  return params;
}

ResponseTimeVector rta_response_times(const TimingParameters& params, const PriorityAssignment& p,
                                      std::span<const double> warm,
                                      std::span<const double> horizon) {
  const std::size_t n = params.exec.size();
  if (p.size() != n) throw InvalidArgument("priority assignment does not cover the task set");
  for (double c : params.exec) {
    if (!(c > 0)) throw InvalidArgument("RTA needs positive execution times");
  }
  if (horizon.empty()) horizon = params.deadline;
  ResponseTimeVector r(n, kDiverged);
  const std::vector<int>& order = p.order();
  for (std::size_t pos = 0; pos < n; ++pos) {
    const int i = order[pos];
    const double c = params.exec[i];
    auto demand = [&](double window) {
      double total = c;
      for (std::size_t hp = 0; hp < pos; ++hp) {
        const int j = order[hp];
        total += std::ceil(window / params.period[j]) * params.exec[j];
      }
      return total;
    };
    double current = c;
    if (!warm.empty() && std::isfinite(warm[i]) && warm[i] > c) current = warm[i];
    while (true) {
      const double next = demand(current);
      if (next > horizon[i]) {
        current = kDiverged;
        break;
      }
      if (next == current) break;
      if (next < current) {
        // Warm value was above the fixed point; restart from c.
        current = c;
        continue;
      }
      current = next;
    }
    r[i] = current;
  }
  return r;
}

ResponseTimeVector rta_response_times(const TaskSet& ts, std::span<const double> exec,
                                      const PriorityAssignment& p, std::span<const double> warm) {
  if (ts.cores != 1 || !ts.preemptive || !ts.edges.empty()) {
    throw InvalidArgument("RTA applies to single-core preemptive independent tasks");
  }
  if (exec.size() != ts.size()) throw InvalidArgument("one execution time per task required");
  TimingParameters params;
  params.exec.assign(exec.begin(), exec.end());
  for (const Task& t : ts.tasks) {
    params.period.push_back(t.period);
    params.deadline.push_back(t.deadline);
  }
  return rta_response_times(params, p, warm);
}

bool meets_deadlines(std::span<const double> response, std::span<const double> deadline) {
  for (std::size_t i = 0; i < response.size(); ++i) {
    if (!(response[i] <= deadline[i])) return false;
  }
  return true;
}

namespace {

struct ReadyJob {
  std::size_t rank;
  double release;
  int task;
  std::size_t index;
};

struct ReadyOrder {
  // priority_queue pops the largest; "larger" means scheduled first.
  bool operator()(const ReadyJob& a, const ReadyJob& b) const {
    if (a.rank != b.rank) return a.rank > b.rank;
    if (a.release != b.release) return a.release > b.release;
    return a.task > b.task;
  }
};

struct Finish {
  double time;
  int core;
  int task;
  std::size_t index;
  bool operator>(const Finish& o) const {
    if (time != o.time) return time > o.time;
    return core > o.core;
  }
};

struct Release {
  double time;
  int task;
  bool operator>(const Release& o) const {
    if (time != o.time) return time > o.time;
    return task > o.task;
  }
};

}  // namespace

SimulationTrace simulate_np_multicore_trace(const TaskSet& ts, const TimingParameters& params,
                                            const PriorityAssignment& p, int cores,
                                            const SimulationOptions& options) {
  const std::size_t n = ts.size();
  if (cores < 1) throw InvalidArgument("simulation needs at least one core");
  if (params.exec.size() != n || p.size() != n) {
    throw InvalidArgument("simulation inputs do not match the task set");
  }
  for (double c : params.exec) {
    if (!(c >= 0) || !std::isfinite(c)) throw InvalidArgument("execution times must be finite and >= 0");
  }
  for (const auto& [from, to] : ts.edges) {
    if (params.period[from] != params.period[to]) {
      throw InvalidArgument("precedence between tasks of different periods");
    }
  }

  SimulationTrace trace;
  trace.hyperperiod = hyperperiod(params.period, options.hyperperiod_cap);
  trace.worst_response.assign(n, 0.0);
  trace.best_response.assign(n, kDiverged);
  trace.core_busy.assign(cores, 0.0);
  const double horizon = static_cast<double>(trace.hyperperiod);

  std::vector<std::vector<int>> successors(n);
  std::vector<int> pred_count(n, 0);
  for (const auto& [from, to] : ts.edges) {
    successors[from].push_back(to);
    ++pred_count[to];
  }
  std::vector<std::vector<int>> pending(n);
  std::vector<std::vector<char>> released(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto jobs = static_cast<std::size_t>(horizon / std::round(params.period[i]));
    pending[i].assign(jobs, pred_count[i]);
    released[i].assign(jobs, 0);
  }

  std::priority_queue<Release, std::vector<Release>, std::greater<>> releases;
  std::priority_queue<Finish, std::vector<Finish>, std::greater<>> finishes;
  std::priority_queue<ReadyJob, std::vector<ReadyJob>, ReadyOrder> ready;
  for (std::size_t i = 0; i < n; ++i) releases.push({0.0, static_cast<int>(i)});
  std::vector<char> busy(cores, 0);
  int idle = cores;

  auto make_ready = [&](int task, std::size_t index) {
    ready.push({p.rank(task), static_cast<double>(index) * params.period[task], task, index});
  };

  while (!releases.empty() || !finishes.empty() || !ready.empty()) {
    double now = kDiverged;
    if (!releases.empty()) now = releases.top().time;
    if (!finishes.empty()) now = std::min(now, finishes.top().time);

    while (!finishes.empty() && finishes.top().time <= now) {
      const Finish f = finishes.top();
      finishes.pop();
      busy[f.core] = 0;
      ++idle;
      ++trace.jobs_completed;
      const double release = static_cast<double>(f.index) * params.period[f.task];
      const double response = f.time - release;
      trace.worst_response[f.task] = std::max(trace.worst_response[f.task], response);
      trace.best_response[f.task] = std::min(trace.best_response[f.task], response);
      if (!(response <= params.deadline[f.task])) {
        trace.deadline_missed = true;
        if (options.stop_on_miss) return trace;
      }
      for (int s : successors[f.task]) {
        if (--pending[s][f.index] == 0 && released[s][f.index]) make_ready(s, f.index);
      }
    }
    while (!releases.empty() && releases.top().time <= now) {
      const Release rel = releases.top();
      releases.pop();
      const auto index = static_cast<std::size_t>(std::llround(rel.time / params.period[rel.task]));
      released[rel.task][index] = 1;
      if (pending[rel.task][index] == 0) make_ready(rel.task, index);
      const double next = rel.time + params.period[rel.task];
      if (next < horizon) releases.push({next, rel.task});
    }
    while (idle > 0 && !ready.empty()) {
      const ReadyJob job = ready.top();
      ready.pop();
      const int core = static_cast<int>(std::find(busy.begin(), busy.end(), 0) - busy.begin());
      busy[core] = 1;
      --idle;
      const double c = params.exec[job.task];
      trace.core_busy[core] += c;
      finishes.push({now + c, core, job.task, job.index});
    }
  }
  return trace;
}

ResponseTimeVector simulate_np_multicore(const TaskSet& ts, std::span<const double> exec,
                                         const PriorityAssignment& p, int cores) {
  if (exec.size() != ts.size()) throw InvalidArgument("one execution time per task required");
  TimingParameters params;
  params.exec.assign(exec.begin(), exec.end());
  for (const Task& t : ts.tasks) {
    params.period.push_back(t.period);
    params.deadline.push_back(t.deadline);
  }
  return simulate_np_multicore_trace(ts, params, p, cores).worst_response;
}

bool SchedulabilityOracle::is_schedulable(std::span<const double> x, const PriorityAssignment& p) {
  count_query();
  return query(x, p);
}

ResponseTimeOracle::ResponseTimeOracle(TaskSet ts, DesignMapping mapping)
    : ts_(std::move(ts)), mapping_(std::move(mapping)) {
  ts_.validate();
  std::sort(mapping_.allowed_periods.begin(), mapping_.allowed_periods.end());
}

TimingParameters ResponseTimeOracle::timing(std::span<const double> x) const {
  return apply_design(ts_, mapping_, x);
}

ResponseTimeVector ResponseTimeOracle::response_times(std::span<const double> x,
                                                      const PriorityAssignment& p) {
  count_query();
  return analyze(timing(x), p, false);
}

std::optional<ResponseTimeVector> ResponseTimeOracle::schedulable_response_times(
    std::span<const double> x, const PriorityAssignment& p) {
  count_query();
  const TimingParameters params = timing(x);
  ResponseTimeVector r = analyze(params, p, true);
  if (!meets_deadlines(r, params.deadline)) return std::nullopt;
  return r;
}

bool ResponseTimeOracle::query(std::span<const double> x, const PriorityAssignment& p) {
  apply_design(ts_, mapping_, x, scratch_);
  return meets_deadlines(analyze(scratch_, p, true), scratch_.deadline);
}

RtaOracle::RtaOracle(TaskSet ts, DesignMapping mapping)
    : ResponseTimeOracle(std::move(ts), std::move(mapping)) {
  const TaskSet& set = taskset();
  if (set.cores != 1 || !set.preemptive || !set.edges.empty()) {
    throw InvalidArgument("RTA oracle needs a single-core preemptive set without precedence");
  }
}

std::unique_ptr<ResponseTimeOracle> RtaOracle::fresh() const {
  auto copy = std::make_unique<RtaOracle>(taskset(), mapping());
  copy->set_warm_start(warm_enabled_);
  return copy;
}

ResponseTimeVector RtaOracle::analyze(const TimingParameters& params, const PriorityAssignment& p,
                                      bool /*stop_early*/) {
  std::span<const double> warm;
  if (warm_enabled_ && cache_ && cache_->priorities == p && cache_->period == params.period) {
    bool valid = true;
    for (std::size_t i = 0; i < params.exec.size() && valid; ++i) {
      valid = params.exec[i] >= cache_->exec[i];
    }
    if (valid) {
      warm = cache_->response;
      ++warm_hits_;
    }
  }
  ResponseTimeVector r = rta_response_times(params, p, warm);
  if (warm_enabled_) {
    if (!cache_) {
      cache_ = Cache{p, params.exec, params.period, r};
    } else {
      if (!(cache_->priorities == p)) cache_->priorities = p;
      cache_->exec.assign(params.exec.begin(), params.exec.end());
      cache_->period.assign(params.period.begin(), params.period.end());
      cache_->response.assign(r.begin(), r.end());
    }
  }
  return r;
}

SimulationOracle::SimulationOracle(TaskSet ts, DesignMapping mapping, SimulationOptions options)
    : ResponseTimeOracle(std::move(ts), std::move(mapping)), options_(options) {}

std::unique_ptr<ResponseTimeOracle> SimulationOracle::fresh() const {
  return std::make_unique<SimulationOracle>(taskset(), mapping(), options_);
}

ResponseTimeVector SimulationOracle::analyze(const TimingParameters& params,
                                             const PriorityAssignment& p, bool stop_early) {
  SimulationOptions opts = options_;
  opts.stop_on_miss = stop_early;
  return simulate_np_multicore_trace(taskset(), params, p, taskset().cores, opts).worst_response;
}

}  // namespace northrt
