#include "northrt/northplus.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "northrt/errors.hpp"

namespace northrt {

int FailureLedger::count(int task, std::size_t rank) const {
  auto it = counts_.find({task, rank});
  return it == counts_.end() ? 0 : it->second;
}

BarrierValue barrier_value_and_gradient(const ResponseCost& h, std::span<const double> r,
                                        std::span<const double> deadlines, double w) {
  if (r.size() != deadlines.size()) throw InvalidArgument("response times and deadlines differ in size");
  if (w < 0) throw InvalidArgument("barrier weight must be nonnegative");
  BarrierValue out;
  out.gradient = h.gradient(r);
  if (out.gradient.size() != r.size()) throw InvalidArgument("cost gradient has the wrong size");
  double log_sum = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double slack = deadlines[i] - r[i];
    if (!(slack > 0)) {
      out.infinite = true;
      if (w > 0) out.gradient[i] = std::numeric_limits<double>::infinity();
      continue;
    }
    log_sum += std::log(slack);
    out.gradient[i] += w / slack;
  }
  out.value = out.infinite && w > 0 ? std::numeric_limits<double>::infinity()
                                    : h.value(r) - w * log_sum;
  return out;
}

PriorityMove change_task_priority_by_one(const PriorityAssignment& p, int task,
                                         MoveDirection direction) {
  if (!p.contains(task)) throw InvalidArgument("unknown task id " + std::to_string(task));
  std::vector<int> order = p.order();
  const std::size_t pos = p.rank(task) - 1;
  if (direction == MoveDirection::kRaise) {
    if (pos == 0) return {p, true};
    std::swap(order[pos], order[pos - 1]);
  } else {
    if (pos + 1 == order.size()) return {p, true};
    std::swap(order[pos], order[pos + 1]);
  }
  return {PriorityAssignment(std::move(order)), false};
}

PriorityOutcome optimize_priorities(Problem& problem, const Vector& x, const PriorityAssignment& p,
                                    std::span<const double> delta_r, FailureLedger& ledger) {
  if (delta_r.size() != p.size()) throw InvalidArgument("delta_r must cover every task");
  PriorityOutcome out{p, 0, 0, 0.0};
  const auto r0 = problem.response_times(x, p);
  if (!r0) throw InvalidArgument("priority adjustment needs a schedulable start");
  out.cost = problem.cost(x, *r0);

  std::vector<int> by_magnitude(p.size());
  std::iota(by_magnitude.begin(), by_magnitude.end(), 0);
  std::stable_sort(by_magnitude.begin(), by_magnitude.end(), [&](int a, int b) {
    return std::abs(delta_r[a]) > std::abs(delta_r[b]);
  });
  std::vector<std::size_t> gradient_rank(p.size());
  for (std::size_t k = 0; k < by_magnitude.size(); ++k) gradient_rank[by_magnitude[k]] = k + 1;

  for (int task : by_magnitude) {
    const double step = delta_r[task];
    if (!(std::abs(step) >= 1e-9)) continue;
    const MoveDirection dir = step < 0 ? MoveDirection::kRaise : MoveDirection::kLower;
    while (true) {
      const std::size_t rank = out.priorities.rank(task);
      if (dir == MoveDirection::kRaise && gradient_rank[task] >= rank) break;
      if (!ledger.allows(task, rank)) break;
      PriorityMove move = change_task_priority_by_one(out.priorities, task, dir);
      if (move.noop) break;
      ++out.attempted_moves;
      bool better = false;
      double cost = 0.0;
      if (auto r = problem.response_times(x, move.priorities)) {
        try {
          cost = problem.cost(x, *r);
          better = cost < out.cost;

        } catch (const NumericError&) {
          better = false;
        }
      }
      if (!better) {
        ledger.record_failure(task, rank);
        break;
      }
      out.priorities = std::move(move.priorities);
      out.cost = cost;
      ++out.accepted_moves;
    }
  }
  return out;
}

NorthPlusResult northplus_optimize(Problem& problem, const Vector& x0, const PriorityAssignment& p0,
                                   const NorthPlusOptions& options) {
  if (static_cast<std::size_t>(x0.size()) != problem.dimension()) {
    throw InvalidArgument("initial point has the wrong dimension");
  }
  problem.set_priorities(p0);
  if (!problem.feasible(x0)) throw InvalidArgument("initial point is infeasible");

  NorthPlusResult result{VariableSpace(x0, problem.box()), p0, {}};
  auto& space = result.space;
  auto& trace = result.trace;
  const auto& north = options.north;
  EliminationProbe probe{north.initial_tolerance, north.granularity, north.growth, 0};
  const TestMode mode = north.mode.value_or(
      problem.depends_on_response_times() ? TestMode::kDescent : TestMode::kPlain);
  FailureLedger ledger(options.ledger_threshold);
  double w = options.initial_weight;

  LMState config = north.lm;
  if (north.stop) config.stop = north.stop;
  config.on_accept = north.on_accept;

  auto record = [&](int moves) {
    trace.objective.push_back(problem.objective(space.x()));
    trace.queries.push_back(problem.oracle().query_count());
    trace.accepted_moves.push_back(moves);
  };
  record(0);

  for (int it = 0; it < options.max_iterations; ++it) {
    if (north.stop && north.stop()) {
      trace.stopped = true;
      break;
    }
    const LMState lm = nmbo_descend(problem, space, config);
    trace.descent.insert(trace.descent.end(), lm.trace.begin() + (lm.trace.empty() ? 0 : 1),
                         lm.trace.end());
    if (lm.termination == LMTermination::kStopped) {
      trace.stopped = true;
      record(0);
      break;
    }

    const Vector& x = space.x();
    const auto r = problem.response_times(x, problem.priorities());
    if (!r) throw OracleError("oracle rejected a point it accepted before");
    const auto deadlines = problem.deadlines(x);
    ResponseCost h{[&](std::span<const double> rr) {
                     return problem.cost(x, ResponseTimeVector(rr.begin(), rr.end()));
                   },
                   [&](std::span<const double> rr) {
                     return problem.cost_gradient(x, ResponseTimeVector(rr.begin(), rr.end()));
                   }};
    const BarrierValue barrier = barrier_value_and_gradient(h, *r, deadlines, w);
    std::vector<double> delta_r(barrier.gradient.size());
    for (std::size_t i = 0; i < delta_r.size(); ++i) delta_r[i] = -options.step_scale * barrier.gradient[i];

    const PriorityOutcome moved = optimize_priorities(problem, x, problem.priorities(), delta_r, ledger);
    problem.set_priorities(moved.priorities);
    result.priorities = moved.priorities;

    if (!space.all_eliminated()) {
      const Vector delta = elimination_direction(lm, space);
      auto eliminated = select_eliminations(problem, space, delta, probe, mode);
      if (eliminated.empty()) eliminated = space.free_dimensions();
      for (int j : eliminated) space.eliminate(j);
      ++trace.elimination_rounds;
    }
    w = std::max(w / 2, options.weight_floor);
    ++trace.iterations;
    record(moved.accepted_moves);
    if (space.all_eliminated() && moved.accepted_moves == 0) break;
  }
  return result;
}

}  // namespace northrt
