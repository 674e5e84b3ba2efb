#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace northrt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Axis-aligned bounds lb <= x <= ub.
struct Box {
  Vector lower;
  Vector upper;

  Box() = default;
  Box(Vector lower, Vector upper);

  std::size_t dimension() const { return static_cast<std::size_t>(lower.size()); }
  bool contains(const Vector& x) const;
  Vector clamp(const Vector& x) const;
  double diameter() const { return (upper - lower).norm(); }
};

// x -> F(x); the objective is sum_i F_i(x)^2. The evaluator throws
// EvaluationError where F is undefined.
class ResidualSystem {
 public:
  using Evaluator = std::function<Vector(const Vector&)>;

  ResidualSystem(std::size_t dimension, std::size_t terms, Evaluator evaluator);

  std::size_t dimension() const { return dimension_; }
  std::size_t terms() const { return terms_; }
  Vector operator()(const Vector& x) const;
  double objective(const Vector& x) const { return (*this)(x).squaredNorm(); }

 private:
  std::size_t dimension_;
  std::size_t terms_;
  Evaluator evaluator_;
};

// Central differences with step h. Next to a bound the difference becomes
// one-sided so probes stay inside `bounds`. Entries whose probe fails to
// evaluate, or come out non-finite, are 0.
Matrix numerical_jacobian(const ResidualSystem& sys, const Vector& x, double h,
                          const std::optional<Box>& bounds = std::nullopt);

// Solves (J^T J + lambda diag(J^T J)) delta = -J^T F. Zero diagonal entries of
// J^T J get 1e-12 added. Throws NumericError if the solve is inaccurate.
Vector lm_step(const Matrix& jacobian, const Vector& residuals, double lambda);

enum class LMTermination {
  kNotStarted,
  kRelativeTolerance,
  kSmallStep,
  kRetriesExhausted,
  kIterationCap,
  kStopped,
  kZeroObjective,
};

std::string to_string(LMTermination t);

// Configuration and progress of one lm_minimize run.
struct LMState {
  double lambda = 1e3;
  double lambda_floor = 1e-9;
  double lambda_factor = 10.0;
  double step_tolerance = 1e-5;
  double relative_tolerance = 1e-5;
  int max_iterations = 1000;
  int max_retries = 20;
  double jacobian_step = 1e-5;
  std::optional<Box> bounds;
  // Polled between iterations; returning true ends the run (kStopped).
  std::function<bool()> stop;
  // Called with every accepted point.
  std::function<void(const Vector&)> on_accept;

  int iteration = 0;
  int accepted = 0;
  int rejected = 0;
  std::vector<double> trace;  // objective after x0 and after each accepted step
  std::optional<Vector> last_accepted_step;
  std::optional<Vector> last_rejected_step;  // raw LM step, before clamping
  std::optional<Vector> last_gradient;       // J^T F at the last linearization
  LMTermination termination = LMTermination::kNotStarted;
};

// Feasibility-guarded Levenberg-Marquardt. A step is taken only when the
// objective decreases and accept(x + delta) holds; each rejection multiplies
// lambda by 10, each acceptance divides it by 10 (floored). Throws
// InvalidArgument when accept(x0) is false.
Vector lm_minimize(const ResidualSystem& sys, const Vector& x0,
                   const std::function<bool(const Vector&)>& accept, LMState& state);

}  // namespace northrt
