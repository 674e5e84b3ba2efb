#include "northrt/taskmodel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "northrt/errors.hpp"

namespace northrt {

namespace {

constexpr int kMaxCappedDraws = 10000;

bool is_acyclic(std::size_t n, const std::vector<std::pair<int, int>>& edges) {
  std::vector<std::vector<int>> succ(n);
  std::vector<int> indegree(n, 0);
  for (const auto& [from, to] : edges) {
    succ[from].push_back(to);
    ++indegree[to];
  }
  std::vector<int> ready;
  for (std::size_t i = 0; i < n; ++i) {
    if (indegree[i] == 0) ready.push_back(static_cast<int>(i));
  }
  std::size_t visited = 0;
  while (!ready.empty()) {
    const int v = ready.back();
    ready.pop_back();
    ++visited;
    for (int w : succ[v]) {
      if (--indegree[w] == 0) ready.push_back(w);
    }
  }
  return visited == n;
}

double draw_period(const GeneratorConfig& cfg, std::mt19937_64& rng) {
  double period = 0.0;
  if (cfg.period_distribution == PeriodDistribution::kDiscreteSet) {
    if (cfg.period_set.empty()) throw InvalidArgument("discrete period set is empty");
    std::uniform_int_distribution<std::size_t> pick(0, cfg.period_set.size() - 1);
    period = cfg.period_set[pick(rng)];
  } else {
    std::uniform_real_distribution<double> u(std::log(cfg.period_min), std::log(cfg.period_max));
    period = std::exp(u(rng));
    if (cfg.integral_periods) period = std::max(1.0, std::round(period));
  }
  return period;
}

Task make_task(int id, double period, double wcet, double fixed_fraction,
               std::optional<int> dag_id) {
  Task t;
  t.id = id;
  t.period = period;
  t.deadline = period;
  t.c_org = wcet;
  t.c_fix = fixed_fraction * wcet;
  t.c_var = wcet - t.c_fix;
  t.dag_id = dag_id;
  return t;
}

}  // namespace

void TaskSet::validate() const {
  if (cores < 1) throw InvalidArgument("core count must be positive");
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const Task& t = tasks[i];
    if (t.id != static_cast<int>(i)) {
      throw InvalidArgument("task ids must equal their positions (task " + std::to_string(i) + ")");
    }
    if (!(t.period > 0) || !(t.deadline > 0)) {
      throw InvalidArgument("task " + std::to_string(i) + " needs positive period and deadline");
    }
    if (t.c_fix < 0 || t.c_var < 0 || t.c_org < 0) {
      throw InvalidArgument("task " + std::to_string(i) + " has a negative execution time");
    }
  }
  for (const auto& [from, to] : edges) {
    const int n = static_cast<int>(tasks.size());
    if (from < 0 || from >= n || to < 0 || to >= n || from == to) {
      throw InvalidArgument("edge (" + std::to_string(from) + "," + std::to_string(to) +
                            ") references a missing task");
    }
  }
  if (!is_acyclic(tasks.size(), edges)) throw InvalidArgument("precedence edges contain a cycle");
  for (const Task& a : tasks) {
    if (!a.dag_id) continue;
    for (const Task& b : tasks) {
      if (b.dag_id == a.dag_id && b.period != a.period) {
        throw InvalidArgument("nodes of DAG " + std::to_string(*a.dag_id) +
                              " have different periods");
      }
    }
  }
}

std::vector<std::vector<int>> TaskSet::predecessors() const {
  std::vector<std::vector<int>> pred(tasks.size());
  for (const auto& [from, to] : edges) pred[to].push_back(from);
  return pred;
}

std::vector<int> TaskSet::dag_ids() const {
  std::vector<int> ids;
  for (const Task& t : tasks) {
    if (t.dag_id && std::find(ids.begin(), ids.end(), *t.dag_id) == ids.end()) {
      ids.push_back(*t.dag_id);
    }
  }
  return ids;
}

PriorityAssignment::PriorityAssignment(std::vector<int> order) : order_(std::move(order)) {
  rank_.assign(order_.size(), 0);
  for (std::size_t pos = 0; pos < order_.size(); ++pos) {
    const int id = order_[pos];
    if (id < 0 || static_cast<std::size_t>(id) >= order_.size() || rank_[id] != 0) {
      throw InvalidArgument("priority order is not a permutation of task ids");
    }
    rank_[id] = pos + 1;
  }
}

PriorityAssignment PriorityAssignment::identity(std::size_t n) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  return PriorityAssignment(std::move(order));
}

bool PriorityAssignment::contains(int task) const {
  return task >= 0 && static_cast<std::size_t>(task) < rank_.size();
}

std::size_t PriorityAssignment::rank(int task) const {
  if (!contains(task)) throw InvalidArgument("unknown task id " + std::to_string(task));
  return rank_[task];
}

std::vector<double> uunifast(int n, double u_total, std::mt19937_64& rng) {
  if (n <= 0) throw InvalidArgument("uunifast: n must be positive");
  if (!(u_total > 0)) throw InvalidArgument("uunifast: total utilization must be positive");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> shares(n);
  double remaining = u_total;
  for (int i = 0; i < n - 1; ++i) {
    const double next = remaining * std::pow(unit(rng), 1.0 / static_cast<double>(n - 1 - i));
    shares[i] = remaining - next;
    remaining = next;
  }
  shares[n - 1] = remaining;
  return shares;
}

std::vector<double> uunifast(int n, double u_total, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return uunifast(n, u_total, rng);
}

std::vector<double> uunifast_capped(int n, double u_total, std::mt19937_64& rng) {
  if (n > 0 && u_total > n) {
    throw InvalidArgument("uunifast_capped: total utilization exceeds task count");
  }
  for (int attempt = 0; attempt < kMaxCappedDraws; ++attempt) {
    std::vector<double> shares = uunifast(n, u_total, rng);
    if (std::all_of(shares.begin(), shares.end(), [](double u) { return u <= 1.0; })) {
      return shares;
    }
  }
  throw ResourceLimitError("uunifast_capped: no draw with all shares <= 1 after 10^4 attempts");
}

std::vector<double> uunifast_capped(int n, double u_total, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return uunifast_capped(n, u_total, rng);
}

std::vector<std::pair<int, int>> random_dag_edges(int count, double probability,
                                                  std::mt19937_64& rng) {
  std::bernoulli_distribution coin(probability);
  std::vector<std::pair<int, int>> edges;
  for (int a = 0; a < count; ++a) {
    for (int b = a + 1; b < count; ++b) {
      if (coin(rng)) edges.emplace_back(a, b);
    }
  }
  return edges;
}

TaskSet generate_taskset(const GeneratorConfig& cfg) {
  if (cfg.cores < 1) throw InvalidArgument("generator: core count must be positive");
  if (!(cfg.total_utilization > 0) || cfg.total_utilization > cfg.cores) {
    throw InvalidArgument("generator: utilization must lie in (0, cores]");
  }
  if (cfg.edge_probability < 0 || cfg.edge_probability > 1) {
    throw InvalidArgument("generator: edge probability outside [0, 1]");
  }
  if (cfg.fixed_fraction < 0 || cfg.fixed_fraction > 1) {
    throw InvalidArgument("generator: fixed fraction outside [0, 1]");
  }
  std::mt19937_64 rng(cfg.seed);
  TaskSet ts;
  ts.cores = cfg.cores;
  ts.preemptive = cfg.preemptive;

  if (cfg.mode == GeneratorConfig::Mode::kPeriodic) {
    if (cfg.task_count < 1) throw InvalidArgument("generator: task count must be positive");
    const std::vector<double> utils = cfg.total_utilization <= 1.0
                                          ? uunifast(cfg.task_count, cfg.total_utilization, rng)
                                          : uunifast_capped(cfg.task_count, cfg.total_utilization, rng);
    for (int i = 0; i < cfg.task_count; ++i) {
      const double period = draw_period(cfg, rng);
      ts.tasks.push_back(make_task(i, period, utils[i] * period, cfg.fixed_fraction, std::nullopt));
    }
    return ts;
  }

  if (cfg.dag_count < 1) throw InvalidArgument("generator: DAG count must be positive");
  if (cfg.nodes_min < 1 || cfg.nodes_max < cfg.nodes_min) {
    throw InvalidArgument("generator: invalid nodes-per-DAG range");
  }
  const std::vector<double> dag_utils = uunifast_capped(cfg.dag_count, cfg.total_utilization, rng);
  std::uniform_int_distribution<int> node_count(cfg.nodes_min, cfg.nodes_max);
  for (int dag = 0; dag < cfg.dag_count; ++dag) {
    const int count = node_count(rng);
    const double period = draw_period(cfg, rng);
    const std::vector<double> node_utils = uunifast_capped(count, dag_utils[dag], rng);
    const int base = static_cast<int>(ts.tasks.size());
    for (int k = 0; k < count; ++k) {
      ts.tasks.push_back(
          make_task(base + k, period, node_utils[k] * period, cfg.fixed_fraction, dag));
    }
    for (const auto& [a, b] : random_dag_edges(count, cfg.edge_probability, rng)) {
      ts.edges.emplace_back(base + a, base + b);
    }
  }
  return ts;
}

std::uint64_t hyperperiod(std::span<const double> periods, std::uint64_t cap) {
  if (periods.empty()) throw InvalidArgument("hyperperiod of an empty task set");
  std::uint64_t lcm = 1;
  for (double p : periods) {
    const double rounded = std::round(p);
    if (!(p > 0) || std::abs(p - rounded) > 1e-9 * std::max(1.0, p) ||
        rounded > static_cast<double>(std::numeric_limits<std::int64_t>::max())) {
      throw InvalidArgument("hyperperiod needs positive integral periods");
    }
    const auto value = static_cast<std::uint64_t>(rounded);
    const std::uint64_t step = value / std::gcd(lcm, value);
    if (step != 0 && lcm > std::numeric_limits<std::uint64_t>::max() / step) {
      throw ResourceLimitError("hyperperiod overflows 64 bits");
    }
    lcm *= step;
    if (lcm > cap) throw ResourceLimitError("hyperperiod " + std::to_string(lcm) + " exceeds cap");
  }
  return lcm;
}

std::uint64_t hyperperiod(const TaskSet& ts, std::uint64_t cap) {
  std::vector<double> periods;
  periods.reserve(ts.size());
  for (const Task& t : ts.tasks) periods.push_back(t.period);
  return hyperperiod(periods, cap);
}

PriorityAssignment rate_monotonic_priorities(const TaskSet& ts) {
  std::vector<int> order(ts.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return ts.tasks[a].period < ts.tasks[b].period;
  });
  return PriorityAssignment(std::move(order));
}

void to_json(nlohmann::json& j, const Task& t) {
  j = nlohmann::json{{"id", t.id},       {"period", t.period}, {"deadline", t.deadline},
                     {"c_fix", t.c_fix}, {"c_var", t.c_var},   {"c_org", t.c_org}};
  j["dag_id"] = t.dag_id ? nlohmann::json(*t.dag_id) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, Task& t) {
  j.at("id").get_to(t.id);
  j.at("period").get_to(t.period);
  t.deadline = j.value("deadline", t.period);
  t.c_fix = j.value("c_fix", 0.0);
  t.c_var = j.value("c_var", 0.0);
  t.c_org = j.value("c_org", 0.0);
  if (j.contains("dag_id") && !j.at("dag_id").is_null()) {
    t.dag_id = j.at("dag_id").get<int>();
  } else {
    t.dag_id.reset();
  }
}

void to_json(nlohmann::json& j, const TaskSet& ts) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [from, to] : ts.edges) edges.push_back({from, to});
  j = nlohmann::json{
      {"tasks", ts.tasks}, {"edges", edges}, {"cores", ts.cores}, {"preemptive", ts.preemptive}};
}

void from_json(const nlohmann::json& j, TaskSet& ts) {
  j.at("tasks").get_to(ts.tasks);
  ts.edges.clear();
  if (j.contains("edges")) {
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2) throw InvalidArgument("edges must be [from, to] pairs");
      ts.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
  }
  ts.cores = j.value("cores", 1);
  ts.preemptive = j.value("preemptive", true);
}

}  // namespace northrt
