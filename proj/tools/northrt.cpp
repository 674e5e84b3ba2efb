#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "northrt/errors.hpp"
#include "northrt/harness.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw northrt::ConfigError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Design optimization under black-box schedulability constraints"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  int threads = 0;
  auto* run = app.add_subcommand("run", "Run an experiment config and write CSV rows");
  run->add_option("--config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--out", out_path, "Output CSV path")->required();
  run->add_option("--threads", threads, "Worker threads (overrides the config)");

  std::string taskset_path, method = "north", oracle;
  std::uint64_t seed = 0;
  double time_limit = 600.0;
  int resolution = 50;
  auto* solve = app.add_subcommand("solve", "Optimize one instance document");
  solve->add_option("--taskset", taskset_path, "Instance document written by 'gen'")->required();
  solve->add_option("--method", method, "north | northplus | sa | brute")
      ->check(CLI::IsMember({"north", "northplus", "sa", "brute"}));
  solve->add_option("--oracle", oracle, "rta | sim | exec:<cmd> (default: from the document)");
  solve->add_option("--seed", seed, "Seed for stochastic methods");
  solve->add_option("--time-limit", time_limit, "Seconds; 0 disables the limit");
  solve->add_option("--resolution", resolution, "Grid points per dimension for brute");

  std::string preset;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  northrt::PresetParams params;
  double util = 0.0;
  auto* gen = app.add_subcommand("gen", "Generate an instance document");
  gen->add_option("--preset", preset, "energy-rm | energy-dag | control-dag")
      ->required()
      ->check(CLI::IsMember({"energy-rm", "energy-dag", "control-dag"}));
  gen->add_option("--seed", gen_seed, "Generator seed");
  gen->add_option("--out", gen_out, "Output path")->required();
  gen->add_option("--n", params.n, "Tasks (energy-rm) or DAGs");
  auto* util_opt = gen->add_option("--util", util, "Total utilization");
  gen->add_option("--nodes-max", params.nodes_max, "Largest DAG size");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      nlohmann::json config = northrt::parse_config(read_file(config_path));
      if (threads > 0) config["threads"] = threads;
      const auto rows = northrt::run_experiment(config);
      std::ofstream out(out_path);
      if (!out) throw northrt::ConfigError("cannot write '" + out_path + "'");
      northrt::write_csv(out, rows);
      std::cerr << rows.size() << " rows written to " << out_path << '\n';
    } else if (*solve) {
      const auto inst = northrt::parse_config(read_file(taskset_path)).get<northrt::Instance>();
      northrt::MethodSettings settings;
      settings.brute_resolution = resolution;
      const auto o = northrt::run_method(inst, method, oracle, seed, time_limit, settings);
      nlohmann::json report = {{"method", method},       {"x", o.x},
                               {"priorities", o.priorities},
                               {"obj_init", o.obj_init}, {"obj_final", o.obj_final},
                               {"oracle_calls", o.oracle_calls},
                               {"elim_rounds", o.elim_rounds},
                               {"wall_ms", o.wall_ms},   {"feasible", o.feasible},
                               {"timeout", o.timeout}};
      if (!o.note.empty()) report["note"] = o.note;
      std::cout << report.dump(2) << '\n';
    } else if (*gen) {
      if (util_opt->count() > 0) params.utilization = util;
      const auto inst = northrt::generate_instance(northrt::parse_preset(preset), gen_seed, params);
      std::ofstream out(gen_out);
      if (!out) throw northrt::ConfigError("cannot write '" + gen_out + "'");
      out << nlohmann::json(inst).dump(2) << '\n';
    }
  } catch (const northrt::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
