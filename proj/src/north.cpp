#include "northrt/north.hpp"

#include "northrt/errors.hpp"

namespace northrt {

VariableSpace::VariableSpace(Vector x, Box box)
    : x_(std::move(x)), box_(std::move(box)), eliminated_(static_cast<std::size_t>(x_.size()), false) {
  if (box_.dimension() != dimension()) throw InvalidArgument("box and point differ in dimension");
  if (!box_.contains(x_)) throw InvalidArgument("point lies outside the box");
}

std::vector<int> VariableSpace::free_dimensions() const {
  std::vector<int> out;
  for (std::size_t j = 0; j < eliminated_.size(); ++j) {
    if (!eliminated_[j]) out.push_back(static_cast<int>(j));
  }
  return out;
}

bool VariableSpace::all_eliminated() const {
  for (bool e : eliminated_) {
    if (!e) return false;
  }
  return true;
}

void VariableSpace::eliminate(int j) { eliminated_.at(static_cast<std::size_t>(j)) = true; }

void VariableSpace::set_x(const Vector& x) {
  if (x.size() != x_.size()) throw InvalidArgument("point has the wrong dimension");
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    if (eliminated_[static_cast<std::size_t>(j)] && x[j] != x_[j]) {
      throw InvalidArgument("eliminated coordinate changed");
    }
  }
  x_ = x;
}

Vector VariableSpace::expand(const Vector& free_values) const {
  Vector full = x_;
  Eigen::Index k = 0;
  for (std::size_t j = 0; j < eliminated_.size(); ++j) {
    if (!eliminated_[j]) full[static_cast<Eigen::Index>(j)] = free_values[k++];
  }
  return full;
}

Vector VariableSpace::restrict(const Vector& full) const {
  const auto free = free_dimensions();
  Vector out(static_cast<Eigen::Index>(free.size()));
  for (std::size_t k = 0; k < free.size(); ++k) out[static_cast<Eigen::Index>(k)] = full[free[k]];
  return out;
}

Box VariableSpace::free_box() const { return Box(restrict(box_.lower), restrict(box_.upper)); }

LMState nmbo_descend(Problem& problem, VariableSpace& space, const LMState& config) {
  LMState state;
  state.lambda = config.lambda;
  state.lambda_floor = config.lambda_floor;
  state.lambda_factor = config.lambda_factor;
  state.step_tolerance = config.step_tolerance;
  state.relative_tolerance = config.relative_tolerance;
  state.max_iterations = config.max_iterations;
  state.max_retries = config.max_retries;
  state.jacobian_step = config.jacobian_step;
  state.stop = config.stop;

  const auto free = space.free_dimensions();
  if (free.empty()) return state;

  state.bounds = space.free_box();
  if (config.on_accept) {
    state.on_accept = [&space, cb = config.on_accept](const Vector& z) { cb(space.expand(z)); };
  }
  ResidualSystem sys(free.size(), problem.terms(),
                     [&](const Vector& z) { return problem.residuals(space.expand(z)); });
  auto accept = [&](const Vector& z) { return problem.feasible(space.expand(z)); };
  const Vector z = lm_minimize(sys, space.restrict(space.x()), accept, state);
  space.set_x(space.expand(z));
  return state;
}

Vector elimination_direction(const LMState& lm, const VariableSpace& space) {
  const auto free = space.free_dimensions();
  Vector reduced = Vector::Zero(static_cast<Eigen::Index>(free.size()));
  if (lm.last_rejected_step && lm.last_rejected_step->size() == reduced.size()) {
    reduced = *lm.last_rejected_step;
  } else if (lm.last_accepted_step && lm.last_accepted_step->size() == reduced.size()) {
    reduced = *lm.last_accepted_step;
  } else if (lm.last_gradient && lm.last_gradient->size() == reduced.size()) {
    reduced = -*lm.last_gradient;
  }
  Vector full = Vector::Zero(space.x().size());
  for (std::size_t k = 0; k < free.size(); ++k) full[free[k]] = reduced[static_cast<Eigen::Index>(k)];
  return full;
}

bool dimension_feasibility_test(Problem& problem, const VariableSpace& space, const Vector& delta,
                                double d, int j, TestMode mode,
                                std::optional<double> base_objective) {
  if (delta[j] == 0.0) return true;
  Vector probe = space.x();
  probe[j] += delta[j] > 0 ? d : -d;
  if (!space.box().contains(probe)) return false;
  if (!problem.schedulable(probe)) return false;
  if (mode == TestMode::kPlain) return true;
  try {
    const double base = base_objective ? *base_objective : problem.objective(space.x());
    return problem.objective(probe) <= base;
  } catch (const EvaluationError&) {
    return false;
  }
}

std::vector<int> select_eliminations(Problem& problem, const VariableSpace& space,
                                     const Vector& delta, EliminationProbe& probe, TestMode mode) {
  const auto free = space.free_dimensions();
  if (free.empty()) return {};
  if (!(probe.tolerance >= probe.granularity) || !(probe.growth > 1.0)) {
    throw InvalidArgument("elimination probe needs d >= h and growth > 1");
  }
  std::optional<double> base;
  if (mode == TestMode::kDescent) base = problem.objective(space.x());
  const double diameter = space.box().diameter();
  while (true) {
    std::vector<int> failing;
    for (int j : free) {
      if (!dimension_feasibility_test(problem, space, delta, probe.tolerance, j, mode, base)) {
        failing.push_back(j);
      }
    }
    if (!failing.empty()) return failing;
    if (probe.tolerance > diameter) return {};
    probe.tolerance *= probe.growth;
    ++probe.growth_steps;
  }
}

NorthResult north_optimize(Problem& problem, const Vector& x0, const NorthOptions& options) {
  if (static_cast<std::size_t>(x0.size()) != problem.dimension()) {
    throw InvalidArgument("initial point has the wrong dimension");
  }
  if (!problem.feasible(x0)) throw InvalidArgument("initial point is infeasible");

  NorthResult result{VariableSpace(x0, problem.box()), {}};
  auto& space = result.space;
  auto& trace = result.trace;
  EliminationProbe probe{options.initial_tolerance, options.granularity, options.growth, 0};
  const TestMode mode = options.mode.value_or(
      problem.depends_on_response_times() ? TestMode::kDescent : TestMode::kPlain);

  LMState config = options.lm;
  if (options.stop) config.stop = options.stop;
  config.on_accept = options.on_accept;

  trace.round_objective.push_back(problem.objective(space.x()));
  trace.round_queries.push_back(problem.oracle().query_count());

  while (!space.all_eliminated()) {
    if (options.stop && options.stop()) {
      trace.stopped = true;
      break;
    }
    const LMState lm = nmbo_descend(problem, space, config);
    trace.descent.insert(trace.descent.end(), lm.trace.begin() + (lm.trace.empty() ? 0 : 1),
                         lm.trace.end());
    if (lm.termination == LMTermination::kStopped) {
      trace.stopped = true;
      trace.round_objective.push_back(problem.objective(space.x()));
      trace.round_queries.push_back(problem.oracle().query_count());
      break;
    }
    const Vector delta = elimination_direction(lm, space);
    const auto eliminated = select_eliminations(problem, space, delta, probe, mode);
    trace.round_objective.push_back(problem.objective(space.x()));
    trace.round_queries.push_back(problem.oracle().query_count());
    if (eliminated.empty()) break;
    for (int j : eliminated) space.eliminate(j);
    trace.eliminated.push_back(eliminated);
    trace.probe_steps.push_back(probe.growth_steps);
    ++trace.elimination_rounds;
  }
  return result;
}

}  // namespace northrt
