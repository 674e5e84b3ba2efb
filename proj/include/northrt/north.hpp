#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "northrt/numcore.hpp"
#include "northrt/problem.hpp"

namespace northrt {

// Design point plus the set of coordinates already frozen.
class VariableSpace {
 public:
  VariableSpace(Vector x, Box box);

  const Vector& x() const { return x_; }
  const Box& box() const { return box_; }
  std::size_t dimension() const { return static_cast<std::size_t>(x_.size()); }

  bool is_eliminated(int j) const { return eliminated_.at(static_cast<std::size_t>(j)); }
  std::vector<int> free_dimensions() const;
  bool all_eliminated() const;
  void eliminate(int j);

  // Writes free coordinates; eliminated ones must keep their value.
  void set_x(const Vector& x);

  Vector expand(const Vector& free_values) const;
  Vector restrict(const Vector& full) const;
  Box free_box() const;

 private:
  Vector x_;
  Box box_;
  std::vector<bool> eliminated_;
};

struct EliminationProbe {
  double tolerance = 1e-5;    // current d; carried over between rounds
  double granularity = 1e-5;  // h, lower bound on d
  double growth = 1.5;
  int growth_steps = 0;       // d = d0 * growth^growth_steps
};

enum class TestMode { kPlain, kDescent };

// Feasibility-guarded LM over the free coordinates of `space`, acceptance =
// in box and schedulable. `config` supplies the LM settings; its progress
// fields are ignored. Updates space in place and returns the LM state.
LMState nmbo_descend(Problem& problem, VariableSpace& space, const LMState& config = {});

// Direction for elimination tests: last rejected LM step, else last accepted
// step, else minus the gradient; zero on eliminated coordinates.
Vector elimination_direction(const LMState& lm, const VariableSpace& space);

// Probes x moved by sign(delta_j) * d along j. delta_j == 0 passes. Descent
// mode also needs objective(probe) <= base_objective.
bool dimension_feasibility_test(Problem& problem, const VariableSpace& space, const Vector& delta,
                                double d, int j, TestMode mode,
                                std::optional<double> base_objective = std::nullopt);

// Grows probe.tolerance until some free dimension fails and returns all that
// fail at that d. Empty result: d passed the box diameter with no failure.
std::vector<int> select_eliminations(Problem& problem, const VariableSpace& space,
                                     const Vector& delta, EliminationProbe& probe, TestMode mode);

struct NorthOptions {
  LMState lm;
  double initial_tolerance = 1e-5;
  double granularity = 1e-5;
  double growth = 1.5;
  std::optional<TestMode> mode;  // default: descent iff residuals read response times
  std::function<bool()> stop;
  std::function<void(const Vector&)> on_accept;  // every accepted full point
};

struct NorthTrace {
  std::vector<double> round_objective;  // at x0, then after each round
  std::vector<std::uint64_t> round_queries;
  std::vector<double> descent;          // objective at every accepted NMBO step
  std::vector<std::vector<int>> eliminated;
  std::vector<int> probe_steps;         // growth_steps at each elimination
  int elimination_rounds = 0;
  bool stopped = false;
};

struct NorthResult {
  VariableSpace space;
  NorthTrace trace;
};

// NMBO and variable elimination alternate until every coordinate is frozen.
// Throws InvalidArgument when x0 is infeasible.
NorthResult north_optimize(Problem& problem, const Vector& x0, const NorthOptions& options = {});

}  // namespace northrt
