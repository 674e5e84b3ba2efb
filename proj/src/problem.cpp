#include "northrt/problem.hpp"

#include "northrt/errors.hpp"

namespace northrt {

Problem::Problem(Box box, std::size_t terms, SchedulabilityOracle& oracle, PriorityAssignment p)
    : box_(std::move(box)), terms_(terms), oracle_(oracle), priorities_(std::move(p)) {}

void Problem::set_priorities(PriorityAssignment p) {
  if (p.size() != priorities_.size()) {
    throw InvalidArgument("priority assignment covers a different number of tasks");
  }
  priorities_ = std::move(p);
}

bool Problem::schedulable(const Vector& x) {
  return oracle_.is_schedulable(std::span<const double>(x.data(), x.size()), priorities_);
}

bool Problem::feasible(const Vector& x) { return box_.contains(x) && schedulable(x); }

ResidualSystem Problem::residual_system() {
  return ResidualSystem(dimension(), terms_, [this](const Vector& x) { return residuals(x); });
}

ResponseTimeOracle& Problem::response_time_oracle() const {
  auto* rt = dynamic_cast<ResponseTimeOracle*>(&oracle_);
  if (!rt) throw InvalidArgument("oracle '" + oracle_.name() + "' does not report response times");
  return *rt;
}

std::optional<ResponseTimeVector> Problem::response_times(const Vector& x,
                                                          const PriorityAssignment& p) {
  return response_time_oracle().schedulable_response_times(
      std::span<const double>(x.data(), x.size()), p);
}

std::vector<double> Problem::deadlines(const Vector& x) {
  return response_time_oracle().timing(std::span<const double>(x.data(), x.size())).deadline;
}

double Problem::cost(const Vector& x, const ResponseTimeVector&) { return objective(x); }

std::vector<double> Problem::cost_gradient(const Vector&, const ResponseTimeVector& r) {
  return std::vector<double>(r.size(), 0.0);
}

FunctionProblem::FunctionProblem(std::string name, Box box, std::size_t terms, Residuals residuals,
                                 SchedulabilityOracle& oracle, PriorityAssignment p)
    : Problem(std::move(box), terms, oracle, std::move(p)),
      name_(std::move(name)),
      residuals_(std::move(residuals)) {
  if (!residuals_) throw InvalidArgument("function problem needs a residual function");
}

}  // namespace northrt
