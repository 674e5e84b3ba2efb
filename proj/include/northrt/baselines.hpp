#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "northrt/problem.hpp"

namespace northrt {

struct SAConfig {
  double cooling = 0.99;
  double initial_temperature = 1e5;
  std::int64_t iterations = 1'000'000;
  double step_scale = 0.02;  // proposal half-width as a share of the box width
  std::uint64_t seed = 0;
  std::function<bool()> stop;  // polled every 256 iterations
};

struct SAResult {
  Vector best;
  double best_objective = 0.0;
  std::vector<double> best_trace;  // best objective after each improvement
  std::int64_t iterations = 0;
  bool stopped = false;
};

// Metropolis search over uniform box-clamped neighbours. Infeasible
// proposals are rejected. Throws InvalidArgument when x0 is infeasible.
SAResult simulated_annealing(Problem& problem, const Vector& x0, const SAConfig& cfg = {});

struct GridOptimum {
  std::optional<Vector> x;  // empty when no grid point is feasible
  double objective = 0.0;
  std::uint64_t points = 0;
};

// Exhaustive grid with `resolution` points per dimension, endpoints included.
// The oracle is consulted only for points that would beat the incumbent; ties
// keep the lexicographically first point. N > 4 -> ResourceLimitError.
GridOptimum brute_force_optimum(Problem& problem, int resolution);

}  // namespace northrt
