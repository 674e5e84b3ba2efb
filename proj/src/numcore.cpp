#include "northrt/numcore.hpp"

#include <cmath>

#include "northrt/errors.hpp"

namespace northrt {

Box::Box(Vector lower_bounds, Vector upper_bounds)
    : lower(std::move(lower_bounds)), upper(std::move(upper_bounds)) {
  if (lower.size() != upper.size()) throw InvalidArgument("box bounds differ in size");
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (!(lower[i] <= upper[i])) throw InvalidArgument("box lower bound exceeds upper bound");
  }
}

bool Box::contains(const Vector& x) const {
  if (x.size() != lower.size()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(x[i] >= lower[i] && x[i] <= upper[i])) return false;
  }
  return true;
}

Vector Box::clamp(const Vector& x) const { return x.cwiseMax(lower).cwiseMin(upper); }

ResidualSystem::ResidualSystem(std::size_t dimension, std::size_t terms, Evaluator evaluator)
    : dimension_(dimension), terms_(terms), evaluator_(std::move(evaluator)) {
  if (!evaluator_) throw InvalidArgument("residual system needs an evaluator");
}

Vector ResidualSystem::operator()(const Vector& x) const {
  if (static_cast<std::size_t>(x.size()) != dimension_) {
    throw InvalidArgument("residual system evaluated with wrong dimension");
  }
  Vector f = evaluator_(x);
  if (static_cast<std::size_t>(f.size()) != terms_) {
    throw InvalidArgument("residual evaluator returned " + std::to_string(f.size()) +
                          " terms, expected " + std::to_string(terms_));
  }
  return f;
}

Matrix numerical_jacobian(const ResidualSystem& sys, const Vector& x, double h,
                          const std::optional<Box>& bounds) {
  if (!(h > 0)) throw InvalidArgument("jacobian step must be positive");
  const auto n = static_cast<Eigen::Index>(sys.dimension());
  const auto m = static_cast<Eigen::Index>(sys.terms());
  Matrix jac = Matrix::Zero(m, n);
  std::optional<Vector> center;
  auto at_center = [&]() -> const Vector& {
    if (!center) center = sys(x);
    return *center;
  };
  for (Eigen::Index j = 0; j < n; ++j) {
    double hi = x[j] + h;
    double lo = x[j] - h;
    bool use_center_hi = false;
    bool use_center_lo = false;
    if (bounds) {
      if (hi > bounds->upper[j]) use_center_hi = true;
      if (lo < bounds->lower[j]) use_center_lo = true;
      if (use_center_hi && use_center_lo) continue;  // box thinner than 2h
    }
    try {
      Vector plus = x;
      Vector minus = x;
      double span = 2 * h;
      if (use_center_hi) {
        plus = x;
        span = h;
      } else {
        plus[j] = hi;
      }
      if (use_center_lo) {
        minus = x;
        span = h;
      } else {
        minus[j] = lo;
      }
      const Vector f_plus = use_center_hi ? at_center() : sys(plus);
      const Vector f_minus = use_center_lo ? at_center() : sys(minus);
      for (Eigen::Index i = 0; i < m; ++i) {
        const double d = (f_plus[i] - f_minus[i]) / span;
        jac(i, j) = std::isfinite(d) ? d : 0.0;
      }
    } catch (const EvaluationError&) {
      jac.col(j).setZero();
    }
  }
  return jac;
}

Vector lm_step(const Matrix& jacobian, const Vector& residuals, double lambda) {
  if (!(lambda >= 0)) throw InvalidArgument("damping must be nonnegative");
  if (jacobian.rows() != residuals.size()) throw InvalidArgument("jacobian/residual size mismatch");
  const Matrix normal = jacobian.transpose() * jacobian;
  const Vector gradient = jacobian.transpose() * residuals;
  Matrix damped = normal;
  for (Eigen::Index i = 0; i < damped.rows(); ++i) {
    damped(i, i) += lambda * normal(i, i);
    if (normal(i, i) == 0.0) damped(i, i) += 1e-12;
  }
  const double scale = gradient.norm();
  if (scale == 0.0) return Vector::Zero(gradient.size());
  auto accurate = [&](const Vector& delta) {
    return delta.allFinite() && (damped * delta + gradient).norm() <= 1e-9 * scale;
  };
  Vector delta = damped.ldlt().solve(-gradient);
  if (accurate(delta)) return delta;
  delta = damped.colPivHouseholderQr().solve(-gradient);
  if (accurate(delta)) return delta;
  throw NumericError("damped normal equations are singular");
}

std::string to_string(LMTermination t) {
  switch (t) {
    case LMTermination::kNotStarted: return "not-started";
    case LMTermination::kRelativeTolerance: return "relative-tolerance";
    case LMTermination::kSmallStep: return "small-step";
    case LMTermination::kRetriesExhausted: return "retries-exhausted";
    case LMTermination::kIterationCap: return "iteration-cap";
    case LMTermination::kStopped: return "stopped";
    case LMTermination::kZeroObjective: return "zero-objective";
  }
  return "unknown";
}

Vector lm_minimize(const ResidualSystem& sys, const Vector& x0,
                   const std::function<bool(const Vector&)>& accept, LMState& state) {
  if (static_cast<std::size_t>(x0.size()) != sys.dimension()) {
    throw InvalidArgument("initial point has the wrong dimension");
  }
  if (!x0.allFinite()) throw InvalidArgument("initial point is not finite");
  if (!accept(x0)) throw InvalidArgument("initial point is not feasible");

  Vector x = x0;
  Vector residuals = sys(x);
  double objective = residuals.squaredNorm();
  state.trace.push_back(objective);

  for (; state.iteration < state.max_iterations; ++state.iteration) {
    if (state.stop && state.stop()) {
      state.termination = LMTermination::kStopped;
      return x;
    }
    if (objective == 0.0) {
      state.termination = LMTermination::kZeroObjective;
      return x;
    }
    const Matrix jac = numerical_jacobian(sys, x, state.jacobian_step, state.bounds);
    state.last_gradient = jac.transpose() * residuals;

    bool moved = false;
    double relative_change = 0.0;
    for (int attempt = 0; attempt <= state.max_retries; ++attempt) {
      const Vector delta = lm_step(jac, residuals, state.lambda);
      const Vector candidate = state.bounds ? state.bounds->clamp(x + delta) : Vector(x + delta);
      if ((candidate - x).norm() < state.step_tolerance) {
        state.termination = LMTermination::kSmallStep;
        return x;
      }
      bool improved = false;
      Vector candidate_residuals;
      try {
        candidate_residuals = sys(candidate);
        improved = candidate_residuals.squaredNorm() < objective;
      } catch (const EvaluationError&) {
        improved = false;
      }
      if (improved && accept(candidate)) {
        const double next = candidate_residuals.squaredNorm();
        relative_change = (objective - next) / objective;
        state.last_accepted_step = candidate - x;
        x = candidate;
        residuals = std::move(candidate_residuals);
        objective = next;
        state.trace.push_back(objective);
        state.lambda = std::max(state.lambda / state.lambda_factor, state.lambda_floor);
        ++state.accepted;
        if (state.on_accept) state.on_accept(x);
        moved = true;
        break;
      }
      state.last_rejected_step = delta;
      state.lambda *= state.lambda_factor;
      ++state.rejected;
    }
    if (!moved) {
      state.termination = LMTermination::kRetriesExhausted;
      return x;
    }
    if (relative_change <= state.relative_tolerance) {
      ++state.iteration;
      state.termination = LMTermination::kRelativeTolerance;
      return x;
    }
  }
  state.termination = LMTermination::kIterationCap;
  return x;
}

}  // namespace northrt
