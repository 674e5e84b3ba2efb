#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "northrt/baselines.hpp"
#include "northrt/northplus.hpp"
#include "northrt/objectives.hpp"

namespace northrt {

enum class Preset { kEnergyRm, kEnergyDag, kControlDag };

std::string to_string(Preset p);
Preset parse_preset(const std::string& name);  // ConfigError on unknown names

struct PresetParams {
  int n = 5;                          // tasks (energy-rm) or DAGs (DAG presets)
  std::optional<double> utilization;  // drawn from the seed when absent
  int nodes_min = 1;
  int nodes_max = 20;
};

// Everything needed to rebuild a problem: task set, variable binding, box,
// starting priorities and objective constants.
struct Instance {
  std::string preset;
  int n = 0;
  double utilization = 0.0;
  TaskSet ts;
  DesignMapping mapping;
  Box box;
  PriorityAssignment priorities;
  std::string objective = "energy";  // "energy" or "control"
  EnergyModelParams energy;
  std::vector<ControlWeights> control;
  double initial_tolerance = 1e-5;
  double relative_tolerance = 1e-5;
  std::string default_oracle = "rta";
};

Instance generate_instance(Preset preset, std::uint64_t seed, const PresetParams& params = {});

void to_json(nlohmann::json& j, const Instance& inst);
void from_json(const nlohmann::json& j, Instance& inst);

// Oracle plus the problem bound to it.
struct Session {
  std::unique_ptr<SchedulabilityOracle> oracle;
  std::unique_ptr<Problem> problem;
};

// oracle_spec: "rta", "sim" or "exec:<shell command>"; empty picks the
// instance default.
Session open_session(const Instance& inst, const std::string& oracle_spec = "");

// Maximum frequency, minimum WCET or maximum period, checked with one query.
// Throws InitialInfeasible carrying the point when it is not schedulable.
Vector initial_solution(Problem& problem, VariableKind kind);

// (baseline - reference) / reference * 100.
double relative_gap(double baseline, double reference);

struct MethodSettings {
  SAConfig sa;
  int brute_resolution = 50;
  NorthPlusOptions northplus;  // .north configures plain NORTH as well
};

struct RunOutcome {
  std::vector<double> x;
  std::vector<int> priorities;
  double obj_init = 0.0;
  double obj_final = 0.0;
  std::uint64_t oracle_calls = 0;
  int elim_rounds = 0;
  double wall_ms = 0.0;
  bool feasible = false;
  bool timeout = false;
  std::string note;  // why a run fell back to the initial point
};

// method: north | northplus | sa | brute. time_limit_s <= 0 disables the limit.
RunOutcome run_method(const Instance& inst, const std::string& method,
                      const std::string& oracle_spec, std::uint64_t seed, double time_limit_s,
                      const MethodSettings& settings = {});

struct ExperimentRecord {
  std::string method;
  std::uint64_t seed = 0;
  int n = 0;
  double util = 0.0;
  double obj_init = 0.0;
  double obj_final = 0.0;
  double gap_pct = 0.0;
  std::uint64_t oracle_calls = 0;
  int elim_rounds = 0;
  double wall_ms = 0.0;
  bool feasible = false;
  bool timeout = false;

  bool operator==(const ExperimentRecord&) const = default;
};

inline constexpr const char* kCsvHeader =
    "method,seed,n,util,obj_init,obj_final,gap_pct,oracle_calls,elim_rounds,wall_ms,feasible,"
    "timeout";

// Throws ConfigError naming the offending field.
std::vector<ExperimentRecord> run_experiment(const nlohmann::json& config);
// Parses JSON text first; syntax errors report line and column.
nlohmann::json parse_config(const std::string& text);

void write_csv(std::ostream& out, const std::vector<ExperimentRecord>& rows);
std::vector<ExperimentRecord> read_csv(std::istream& in);

}  // namespace northrt
