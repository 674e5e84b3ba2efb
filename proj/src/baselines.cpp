#include "northrt/baselines.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "northrt/errors.hpp"

namespace northrt {

SAResult simulated_annealing(Problem& problem, const Vector& x0, const SAConfig& cfg) {
  if (!(cfg.cooling > 0 && cfg.cooling < 1)) throw InvalidArgument("cooling rate must lie in (0, 1)");
  if (!(cfg.initial_temperature > 0)) throw InvalidArgument("temperature must be positive");
  if (!problem.feasible(x0)) throw InvalidArgument("initial point is infeasible");

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Box& box = problem.box();
  const Vector half_width = cfg.step_scale * (box.upper - box.lower);

  SAResult out;
  Vector current = x0;
  double current_obj = problem.objective(x0);
  out.best = x0;
  out.best_objective = current_obj;
  out.best_trace.push_back(current_obj);
  double temperature = cfg.initial_temperature;

  for (std::int64_t k = 0; k < cfg.iterations; ++k) {
    if (cfg.stop && (k & 255) == 0 && cfg.stop()) {
      out.stopped = true;
      break;
    }
    ++out.iterations;
    Vector candidate = current;
    for (Eigen::Index j = 0; j < candidate.size(); ++j) {
      candidate[j] += (2 * unit(rng) - 1) * half_width[j];
    }
    candidate = box.clamp(candidate);
    const double u = unit(rng);
    temperature *= cfg.cooling;

    double obj = 0.0;
    try {
      obj = problem.objective(candidate);
    } catch (const EvaluationError&) {
      continue;
    }
    if (!std::isfinite(obj)) continue;
    const double rise = obj - current_obj;
    const bool metropolis = rise <= 0 || (temperature > 0 && u < std::exp(-rise / temperature));
    if (!metropolis) continue;
    if (!problem.schedulable(candidate)) continue;
    current = std::move(candidate);
    current_obj = obj;
    if (obj < out.best_objective) {
      out.best = current;
      out.best_objective = obj;
      out.best_trace.push_back(obj);
    }
  }
  return out;
}

GridOptimum brute_force_optimum(Problem& problem, int resolution) {
  const auto n = static_cast<Eigen::Index>(problem.dimension());
  if (n > 4) throw ResourceLimitError("grid search is limited to 4 dimensions");
  if (resolution < 1) throw InvalidArgument("grid resolution must be positive");
  const Box& box = problem.box();
  auto coordinate = [&](Eigen::Index j, int k) {
    if (resolution == 1) return box.lower[j];
    if (k == resolution - 1) return box.upper[j];
    return box.lower[j] + (box.upper[j] - box.lower[j]) * k / (resolution - 1);
  };

  GridOptimum out;
  out.objective = std::numeric_limits<double>::infinity();
  std::vector<int> index(static_cast<std::size_t>(n), 0);
  Vector x(n);
  while (true) {
    for (Eigen::Index j = 0; j < n; ++j) x[j] = coordinate(j, index[static_cast<std::size_t>(j)]);
    ++out.points;
    try {
      const double obj = problem.objective(x);
      if (obj < out.objective && problem.schedulable(x)) {
        out.objective = obj;
        out.x = x;
      }
    } catch (const EvaluationError&) {
    }
    Eigen::Index j = n - 1;
    while (j >= 0 && ++index[static_cast<std::size_t>(j)] == resolution) {
      index[static_cast<std::size_t>(j)] = 0;
      --j;
    }
    if (j < 0) break;
  }
  if (!out.x) out.objective = std::numeric_limits<double>::quiet_NaN();
  return out;
}

}  // namespace northrt
