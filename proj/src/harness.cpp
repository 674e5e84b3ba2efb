#include "northrt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>
#include <tuple>

#include "northrt/errors.hpp"

namespace northrt {

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::vector<double> kDagPeriodSet = {1, 2, 5, 10, 20, 50, 100};

std::string kind_name(VariableKind k) {
  switch (k) {
    case VariableKind::kWcet: return "wcet";
    case VariableKind::kFrequency: return "frequency";
    case VariableKind::kPeriod: return "period";
  }
  return "wcet";
}

VariableKind parse_kind(const std::string& s) {
  if (s == "wcet") return VariableKind::kWcet;
  if (s == "frequency") return VariableKind::kFrequency;
  if (s == "period") return VariableKind::kPeriod;
  throw ConfigError("unknown variable kind '" + s + "'");
}

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> to_std(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Box constant_box(std::size_t n, double lo, double hi) {
  return Box(Vector::Constant(static_cast<Eigen::Index>(n), lo),
             Vector::Constant(static_cast<Eigen::Index>(n), hi));
}

Instance energy_rm(std::uint64_t seed, const PresetParams& params, std::mt19937_64& rng) {
  Instance inst;
  inst.preset = "energy-rm";
  inst.n = params.n;
  inst.utilization = params.utilization.value_or(std::uniform_real_distribution<double>(0.5, 0.9)(rng));
  GeneratorConfig cfg;
  cfg.mode = GeneratorConfig::Mode::kPeriodic;
  cfg.task_count = params.n;
  cfg.total_utilization = inst.utilization;
  cfg.period_distribution = PeriodDistribution::kLogUniform;
  cfg.period_min = 1e2;
  cfg.period_max = 1e5;
  cfg.seed = seed;
  inst.ts = generate_taskset(cfg);
  inst.mapping = DesignMapping::per_task(VariableKind::kFrequency, inst.ts.size());
  inst.mapping.simplified_energy = true;
  inst.box = constant_box(inst.ts.size(), 0.5, 1.0);
  inst.priorities = rate_monotonic_priorities(inst.ts);
  inst.energy.simplified = true;
  inst.default_oracle = "rta";
  return inst;
}

Instance energy_dag(std::uint64_t seed, const PresetParams& params, std::mt19937_64& rng) {
  Instance inst;
  inst.preset = "energy-dag";
  inst.n = params.n;
  inst.utilization =
      params.utilization.value_or(4.0 * std::uniform_real_distribution<double>(0.1, 0.9)(rng));
  GeneratorConfig cfg;
  cfg.mode = GeneratorConfig::Mode::kDag;
  cfg.dag_count = params.n;
  cfg.total_utilization = inst.utilization;
  cfg.period_distribution = PeriodDistribution::kDiscreteSet;
  cfg.period_set = kDagPeriodSet;
  cfg.edge_probability = 0.2;
  cfg.nodes_min = params.nodes_min;
  cfg.nodes_max = params.nodes_max;
  cfg.cores = 4;
  cfg.preemptive = false;
  cfg.fixed_fraction = 0.2;
  cfg.seed = seed;
  inst.ts = generate_taskset(cfg);
  inst.mapping = DesignMapping::per_task(VariableKind::kFrequency, inst.ts.size());
  inst.box = constant_box(inst.ts.size(), 0.5, 1.0);
  inst.priorities = rate_monotonic_priorities(inst.ts);
  inst.relative_tolerance = 1e-3;
  inst.default_oracle = "sim";
  return inst;
}

Instance control_dag(const PresetParams& params, std::mt19937_64& rng) {
  Instance inst;
  inst.preset = "control-dag";
  inst.n = params.n;
  inst.objective = "control";
  inst.ts.cores = 4;
  inst.ts.preemptive = false;
  std::uniform_int_distribution<int> node_count(params.nodes_min, params.nodes_max);
  std::uniform_real_distribution<double> exec(1.0, 100.0);
  double total = 0.0;
  for (int dag = 0; dag < params.n; ++dag) {
    const int count = node_count(rng);
    const int base = static_cast<int>(inst.ts.tasks.size());
    for (int k = 0; k < count; ++k) {
      const double c = exec(rng);
      total += c;
      inst.ts.tasks.push_back({base + k, 1.0, 1.0, 0.0, c, c, dag});
    }
    for (const auto& [a, b] : random_dag_edges(count, 0.2, rng)) {
      inst.ts.edges.emplace_back(base + a, base + b);
    }
  }
  const auto allowed = default_period_set();
  const double period = snap_up(std::ceil(5.0 * total / 1000.0) * 1000.0, allowed);
  for (Task& t : inst.ts.tasks) {
    t.period = period;
    t.deadline = period;
  }
  inst.utilization = total / period;
  inst.mapping = DesignMapping::per_dag(VariableKind::kPeriod, inst.ts);
  inst.mapping.allowed_periods = allowed;
  inst.box = constant_box(inst.mapping.dimension(), allowed.front(), period);
  inst.priorities = rate_monotonic_priorities(inst.ts);
  std::uniform_real_distribution<double> alpha(1.0, 1e3);
  std::uniform_real_distribution<double> beta(1.0, 1e4);
  for (std::size_t i = 0; i < inst.ts.size(); ++i) {
    ControlWeights w;
    w.alpha = alpha(rng);
    w.beta = beta(rng);
    // Keeps alpha T + beta r + gamma r^2 >= 0 for every r <= T <= period.
    const double floor = std::max(-10.0, -(w.alpha + w.beta) / period);
    w.gamma = std::uniform_real_distribution<double>(floor, 10.0)(rng);
    inst.control.push_back(w);
  }
  inst.default_oracle = "sim";
  return inst;
}

double safe_objective(Problem& problem, const Vector& x) {
  try {
    return problem.objective(x);
  } catch (const EvaluationError&) {
    return kNaN;
  }
}

template <typename T>
T field(const json& config, const char* key, const T& fallback) {
  if (!config.contains(key)) return fallback;
  try {
    return config.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

std::vector<std::uint64_t> parse_seeds(const json& config) {
  if (!config.contains("seeds")) return {0};
  const json& s = config.at("seeds");
  try {
    if (s.is_array()) return s.get<std::vector<std::uint64_t>>();
    if (s.is_object() && s.contains("first") && s.contains("last")) {
      const auto first = s.at("first").get<std::uint64_t>();
      const auto last = s.at("last").get<std::uint64_t>();
      if (last < first) throw ConfigError("config field 'seeds': last < first");
      std::vector<std::uint64_t> out;
      for (auto v = first; v <= last; ++v) out.push_back(v);
      return out;
    }
    if (s.is_number_unsigned()) return {s.get<std::uint64_t>()};
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field 'seeds': ") + e.what());
  }
  throw ConfigError("config field 'seeds': expected a list, a number or {first, last}");
}

std::vector<int> parse_sizes(const json& config) {
  if (!config.contains("n")) return {5};
  const json& n = config.at("n");
  std::vector<int> out;
  try {
    out = n.is_array() ? n.get<std::vector<int>>() : std::vector<int>{n.get<int>()};
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field 'n': ") + e.what());
  }
  for (int v : out) {
    if (v < 1) throw ConfigError("config field 'n': sizes must be positive");
  }
  return out;
}

const std::vector<std::string> kMethods = {"north", "northplus", "sa", "brute"};

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string to_string(Preset p) {
  switch (p) {
    case Preset::kEnergyRm: return "energy-rm";
    case Preset::kEnergyDag: return "energy-dag";
    case Preset::kControlDag: return "control-dag";
  }
  return "energy-rm";
}

Preset parse_preset(const std::string& name) {
  if (name == "energy-rm") return Preset::kEnergyRm;
  if (name == "energy-dag") return Preset::kEnergyDag;
  if (name == "control-dag") return Preset::kControlDag;
  throw ConfigError("unknown preset '" + name + "' (energy-rm, energy-dag, control-dag)");
}

Instance generate_instance(Preset preset, std::uint64_t seed, const PresetParams& params) {
  if (params.n < 1) throw InvalidArgument("instance size must be positive");
  std::mt19937_64 rng(seed ^ 0x6a09e667f3bcc909ULL);
  switch (preset) {
    case Preset::kEnergyRm: return energy_rm(seed, params, rng);
    case Preset::kEnergyDag: return energy_dag(seed, params, rng);
    case Preset::kControlDag: return control_dag(params, rng);
  }
  throw InvalidArgument("unknown preset");
}

void to_json(json& j, const Instance& inst) {
  j = inst.ts;
  j["preset"] = inst.preset;
  j["n"] = inst.n;
  j["utilization"] = inst.utilization;
  j["priorities"] = inst.priorities.order();
  j["variables"] = {{"kind", kind_name(inst.mapping.kind)},
                    {"targets", inst.mapping.targets},
                    {"lower", to_std(inst.box.lower)},
                    {"upper", to_std(inst.box.upper)},
                    {"allowed_periods", inst.mapping.allowed_periods}};
  json objective = {{"kind", inst.objective}};
  if (inst.objective == "energy") {
    objective["energy"] = inst.energy;
  } else {
    objective["weights"] = inst.control;
  }
  j["objective"] = objective;
  j["solver"] = {{"initial_tolerance", inst.initial_tolerance},
                 {"relative_tolerance", inst.relative_tolerance},
                 {"oracle", inst.default_oracle}};
}

void from_json(const json& j, Instance& inst) {
  try {
    inst.ts = j.get<TaskSet>();
    inst.preset = j.value("preset", std::string("custom"));
    inst.utilization = j.value("utilization", 0.0);
    const json& vars = j.at("variables");
    inst.mapping.kind = parse_kind(vars.at("kind").get<std::string>());
    inst.mapping.targets = vars.at("targets").get<std::vector<std::vector<int>>>();
    inst.mapping.allowed_periods = vars.value("allowed_periods", std::vector<double>{});
    inst.box = Box(to_vector(vars.at("lower").get<std::vector<double>>()),
                   to_vector(vars.at("upper").get<std::vector<double>>()));
    inst.n = j.value("n", static_cast<int>(inst.mapping.dimension()));
    inst.priorities = j.contains("priorities")
                          ? PriorityAssignment(j.at("priorities").get<std::vector<int>>())
                          : rate_monotonic_priorities(inst.ts);
    const json& objective = j.at("objective");
    inst.objective = objective.at("kind").get<std::string>();
    if (inst.objective == "energy") {
      inst.energy = objective.value("energy", EnergyModelParams{});
      inst.mapping.simplified_energy = inst.energy.simplified;
    } else if (inst.objective == "control") {
      inst.control = objective.at("weights").get<std::vector<ControlWeights>>();
    } else {
      throw ConfigError("objective kind must be 'energy' or 'control'");
    }
    const json solver = j.value("solver", json::object());
    inst.initial_tolerance = solver.value("initial_tolerance", 1e-5);
    inst.relative_tolerance = solver.value("relative_tolerance", 1e-5);
    inst.default_oracle = solver.value("oracle", std::string("rta"));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("instance document: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("instance document: ") + e.what());
  }
  if (inst.box.dimension() != inst.mapping.dimension()) {
    throw ConfigError("instance document: bounds and variable targets differ in size");
  }
}

Session open_session(const Instance& inst, const std::string& oracle_spec) {
  const std::string spec = oracle_spec.empty() ? inst.default_oracle : oracle_spec;
  Session s;
  if (spec == "rta") {
    s.oracle = std::make_unique<RtaOracle>(inst.ts, inst.mapping);
  } else if (spec == "sim") {
    s.oracle = std::make_unique<SimulationOracle>(inst.ts, inst.mapping);
  } else if (spec.rfind("exec:", 0) == 0 && spec.size() > 5) {
    s.oracle = spawn_external_oracle(spec.substr(5));
  } else {
    throw ConfigError("unknown oracle '" + spec + "' (rta, sim, exec:<cmd>)");
  }
  if (inst.objective == "energy") {
    s.problem = std::make_unique<EnergyProblem>(inst.ts, inst.mapping, inst.energy, inst.box,
                                                *s.oracle, inst.priorities);
  } else if (inst.objective == "control") {
    auto* rt = dynamic_cast<ResponseTimeOracle*>(s.oracle.get());
    if (!rt) throw ConfigError("control objective needs an oracle that reports response times");
    s.problem = std::make_unique<ControlProblem>(inst.control, inst.box, *rt, inst.priorities);
  } else {
    throw ConfigError("unknown objective '" + inst.objective + "'");
  }
  return s;
}

Vector initial_solution(Problem& problem, VariableKind kind) {
  const Vector x = kind == VariableKind::kWcet ? problem.box().lower : problem.box().upper;
  if (!problem.schedulable(x)) {
    throw InitialInfeasible("heuristic initial solution is not schedulable", to_std(x));
  }
  return x;
}

double relative_gap(double baseline, double reference) {
  if (!(reference > 0)) throw InvalidArgument("relative gap needs a positive reference");
  return (baseline - reference) / reference * 100.0;
}

RunOutcome run_method(const Instance& inst, const std::string& method,
                      const std::string& oracle_spec, std::uint64_t seed, double time_limit_s,
                      const MethodSettings& settings) {
  if (std::find(kMethods.begin(), kMethods.end(), method) == kMethods.end()) {
    throw ConfigError("unknown method '" + method + "' (north, northplus, sa, brute)");
  }
  Session session = open_session(inst, oracle_spec);
  Problem& problem = *session.problem;
  RunOutcome out;
  const auto start = Clock::now();
  std::function<bool()> stop;
  if (time_limit_s > 0) {
    const auto deadline = start + std::chrono::duration_cast<Clock::duration>(
                                      std::chrono::duration<double>(time_limit_s));
    stop = [deadline] { return Clock::now() >= deadline; };
  }
  auto finish = [&] {
    out.oracle_calls = session.oracle->query_count();
    out.priorities = problem.priorities().order();
    out.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  };

  Vector x0;
  try {
    x0 = initial_solution(problem, inst.mapping.kind);
  } catch (const InitialInfeasible& e) {
    out.x = e.point();
    out.obj_init = safe_objective(problem, to_vector(e.point()));
    out.obj_final = out.obj_init;
    out.note = "initial solution infeasible";
    finish();
    return out;
  }
  out.obj_init = problem.objective(x0);

  Vector x = x0;
  if (method == "north" || method == "northplus") {
    NorthPlusOptions opts = settings.northplus;
    opts.north.initial_tolerance = std::max(inst.initial_tolerance, opts.north.granularity);
    opts.north.lm.relative_tolerance = inst.relative_tolerance;
    opts.north.stop = stop;
    if (method == "north") {
      auto res = north_optimize(problem, x0, opts.north);
      x = res.space.x();
      out.elim_rounds = res.trace.elimination_rounds;
      out.timeout = res.trace.stopped;
    } else {
      auto res = northplus_optimize(problem, x0, problem.priorities(), opts);
      x = res.space.x();
      out.elim_rounds = res.trace.elimination_rounds;
      out.timeout = res.trace.stopped;
    }
  } else if (method == "sa") {
    SAConfig cfg = settings.sa;
    cfg.seed = seed;
    cfg.stop = stop;
    auto res = simulated_annealing(problem, x0, cfg);
    x = res.best;
    out.timeout = res.stopped;
  } else {
    try {
      auto res = brute_force_optimum(problem, settings.brute_resolution);
      if (res.x) x = *res.x;
    } catch (const ResourceLimitError& e) {
      out.note = e.what();
    }
  }

  if (inst.mapping.kind == VariableKind::kPeriod && !inst.mapping.allowed_periods.empty()) {
    try {
      const RoundingCost cost = [&](const std::vector<double>& periods) -> std::optional<double> {
        const Vector candidate = to_vector(periods);
        if (!problem.schedulable(candidate)) return std::nullopt;
        return problem.objective(candidate);
      };
      x = to_vector(round_periods(to_std(x), inst.mapping.allowed_periods, *session.oracle,
                                  problem.priorities(), cost));
    } catch (const RoundingInfeasible&) {
      out.note = "rounding infeasible; continuous periods kept";
    }
  }
  if (out.timeout) {
    x = x0;
    out.note = "time limit reached; initial solution reported";
  }
  out.obj_final = problem.objective(x);
  out.feasible = problem.feasible(x);
  out.x = to_std(x);
  finish();
  return out;
}

nlohmann::json parse_config(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
}

std::vector<ExperimentRecord> run_experiment(const json& config) {
  if (!config.is_object()) throw ConfigError("config must be a JSON object");
  if (!config.contains("preset")) throw ConfigError("config field 'preset' is required");
  const Preset preset = parse_preset(field<std::string>(config, "preset", ""));
  const std::string oracle = field<std::string>(config, "oracle", "");
  const auto sizes = parse_sizes(config);
  const auto seeds = parse_seeds(config);
  if (!config.contains("methods")) throw ConfigError("config field 'methods' is required");
  const auto methods = field<std::vector<std::string>>(config, "methods", {});
  if (methods.empty()) throw ConfigError("config field 'methods': list is empty");
  for (const auto& m : methods) {
    if (std::find(kMethods.begin(), kMethods.end(), m) == kMethods.end()) {
      throw ConfigError("config field 'methods': unknown method '" + m + "'");
    }
  }
  const double time_limit = field<double>(config, "time_limit", 600.0);
  const std::string gap_reference = field<std::string>(config, "gap_reference", "initial");
  if (gap_reference != "initial" &&
      std::find(methods.begin(), methods.end(), gap_reference) == methods.end()) {
    throw ConfigError("config field 'gap_reference': must be 'initial' or a listed method");
  }
  PresetParams params;
  if (config.contains("utilization")) params.utilization = field<double>(config, "utilization", 0.0);
  params.nodes_min = field<int>(config, "nodes_min", params.nodes_min);
  params.nodes_max = field<int>(config, "nodes_max", params.nodes_max);
  if (params.nodes_min < 1 || params.nodes_max < params.nodes_min) {
    throw ConfigError("config fields 'nodes_min'/'nodes_max': invalid range");
  }
  MethodSettings settings;
  if (config.contains("sa")) {
    const json& sa = config.at("sa");
    settings.sa.iterations = field<std::int64_t>(sa, "iterations", settings.sa.iterations);
    settings.sa.cooling = field<double>(sa, "cooling", settings.sa.cooling);
    settings.sa.initial_temperature = field<double>(sa, "initial_temperature", settings.sa.initial_temperature);
    settings.sa.step_scale = field<double>(sa, "step_scale", settings.sa.step_scale);
  }
  if (config.contains("brute")) {
    settings.brute_resolution = field<int>(config.at("brute"), "resolution", settings.brute_resolution);
  }
  if (config.contains("northplus")) {
    const json& np = config.at("northplus");
    settings.northplus.max_iterations = field<int>(np, "max_iterations", settings.northplus.max_iterations);
    settings.northplus.initial_weight = field<double>(np, "initial_weight", settings.northplus.initial_weight);
  }
  int threads = field<int>(config, "threads", static_cast<int>(std::thread::hardware_concurrency()));
  threads = std::max(1, threads);

  struct Job {
    int n;
    std::uint64_t seed;
    std::string method;
  };
  std::vector<Job> jobs;
  for (int n : sizes) {
    for (auto seed : seeds) {
      for (const auto& m : methods) jobs.push_back({n, seed, m});
    }
  }
  std::vector<ExperimentRecord> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t k = next.fetch_add(1);
      if (k >= jobs.size()) return;
      const Job& job = jobs[k];
      try {
        PresetParams p = params;
        p.n = job.n;
        const Instance inst = generate_instance(preset, job.seed, p);
        const RunOutcome o = run_method(inst, job.method, oracle, job.seed, time_limit, settings);
        ExperimentRecord& r = rows[k];
        r.method = job.method;
        r.seed = job.seed;
        r.n = job.n;
        r.util = inst.utilization;
        r.obj_init = o.obj_init;
        r.obj_final = o.obj_final;
        r.oracle_calls = o.oracle_calls;
        r.elim_rounds = o.elim_rounds;
        r.wall_ms = o.wall_ms;
        r.feasible = o.feasible;
        r.timeout = o.timeout;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = jobs.size();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < threads && t < static_cast<int>(jobs.size()); ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  std::map<std::pair<int, std::uint64_t>, double> reference;
  for (const auto& r : rows) {
    if (gap_reference == "initial") {
      reference[{r.n, r.seed}] = r.obj_init;
    } else if (r.method == gap_reference) {
      reference[{r.n, r.seed}] = r.obj_final;
    }
  }
  for (auto& r : rows) {
    const double ref = reference.count({r.n, r.seed}) ? reference[{r.n, r.seed}] : kNaN;
    r.gap_pct = ref > 0 && std::isfinite(r.obj_final) ? relative_gap(r.obj_final, ref) : kNaN;
  }
  std::sort(rows.begin(), rows.end(), [](const ExperimentRecord& a, const ExperimentRecord& b) {
    return std::tie(a.n, a.seed, a.method) < std::tie(b.n, b.seed, b.method);
  });
  return rows;
}

void write_csv(std::ostream& out, const std::vector<ExperimentRecord>& rows) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.method << ',' << r.seed << ',' << r.n << ',' << format_double(r.util) << ','
        << format_double(r.obj_init) << ',' << format_double(r.obj_final) << ','
        << format_double(r.gap_pct) << ',' << r.oracle_calls << ',' << r.elim_rounds << ','
        << format_double(r.wall_ms) << ',' << (r.feasible ? "true" : "false") << ','
        << (r.timeout ? "true" : "false") << '\n';
  }
}

std::vector<ExperimentRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw ConfigError("CSV header does not match '" + std::string(kCsvHeader) + "'");
  }
  std::vector<ExperimentRecord> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 12) {
      throw ConfigError("CSV line " + std::to_string(line_no) + ": expected 12 columns");
    }
    auto boolean = [&](const std::string& s) {
      if (s == "true") return true;
      if (s == "false") return false;
      throw ConfigError("CSV line " + std::to_string(line_no) + ": bad boolean '" + s + "'");
    };
    try {
      ExperimentRecord r;
      r.method = cells[0];
      r.seed = std::stoull(cells[1]);
      r.n = std::stoi(cells[2]);
      r.util = std::stod(cells[3]);
      r.obj_init = std::stod(cells[4]);
      r.obj_final = std::stod(cells[5]);
      r.gap_pct = std::stod(cells[6]);
      r.oracle_calls = std::stoull(cells[7]);
      r.elim_rounds = std::stoi(cells[8]);
      r.wall_ms = std::stod(cells[9]);
      r.feasible = boolean(cells[10]);
      r.timeout = boolean(cells[11]);
      rows.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw ConfigError("CSV line " + std::to_string(line_no) + ": malformed number");
    }
  }
  return rows;
}

}  // namespace northrt
