#include "northrt/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "northrt/errors.hpp"

namespace northrt {

namespace {

constexpr std::uint64_t kEnergyHyperperiodCap = 1'000'000'000'000ULL;

std::span<const double> as_span(const Vector& x) {
  return std::span<const double>(x.data(), static_cast<std::size_t>(x.size()));
}

}  // namespace

std::vector<double> energy_weights(const TaskSet& ts) {
  double h = 1.0;
  try {
    h = static_cast<double>(hyperperiod(ts, kEnergyHyperperiodCap));
  } catch (const InvalidArgument&) {
  } catch (const ResourceLimitError&) {
  }
  std::vector<double> w;
  w.reserve(ts.size());
  for (const Task& t : ts.tasks) w.push_back(h / t.period);
  return w;
}

double task_energy(const Task& t, double f, double weight, const EnergyModelParams& params) {
  if (!(f > 0)) throw InvalidArgument("frequency must be positive");
  if (params.simplified) return weight * params.alpha * f * f * t.c_org;
  const double exec = t.c_fix + t.c_var / f;
  const double power = params.gamma == 3.0 ? f * f * f : std::pow(f, params.gamma);
  return weight * (params.beta + params.alpha * power) * exec;
}

Vector energy_residuals(const TaskSet& ts, std::span<const double> f,
                        const EnergyModelParams& params) {
  if (f.size() != ts.size()) throw InvalidArgument("one frequency per task expected");
  const auto w = energy_weights(ts);
  Vector out(static_cast<Eigen::Index>(ts.size()));
  for (std::size_t i = 0; i < ts.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = std::sqrt(task_energy(ts.tasks[i], f[i], w[i], params));
  }
  return out;
}

EnergyProblem::EnergyProblem(TaskSet ts, DesignMapping mapping, EnergyModelParams params, Box box,
                             SchedulabilityOracle& oracle, PriorityAssignment p)
    : Problem(std::move(box), ts.size(), oracle, std::move(p)),
      ts_(std::move(ts)),
      mapping_(std::move(mapping)),
      params_(params),
      weights_(energy_weights(ts_)),
      variable_of_task_(ts_.size(), -1) {
  if (mapping_.kind != VariableKind::kFrequency) {
    throw InvalidArgument("energy problem needs frequency variables");
  }
  if (mapping_.dimension() != dimension()) throw InvalidArgument("mapping and box differ in size");
  for (std::size_t j = 0; j < mapping_.dimension(); ++j) {
    for (int id : mapping_.targets[j]) variable_of_task_.at(static_cast<std::size_t>(id)) = static_cast<int>(j);
  }
  if (!(params_.alpha > 0) || !(params_.gamma > 0) || params_.beta < 0) {
    throw InvalidArgument("energy model needs alpha, gamma > 0 and beta >= 0");
  }
}

std::vector<double> EnergyProblem::task_frequencies(const Vector& x) const {
  std::vector<double> f(ts_.size(), 1.0);
  for (std::size_t j = 0; j < mapping_.dimension(); ++j) {
    for (int id : mapping_.targets[j]) f[static_cast<std::size_t>(id)] = x[static_cast<Eigen::Index>(j)];
  }
  return f;
}

Vector EnergyProblem::residuals(const Vector& x) {
  Vector out(static_cast<Eigen::Index>(ts_.size()));
  for (std::size_t i = 0; i < ts_.size(); ++i) {
    const int j = variable_of_task_[i];
    const double f = j >= 0 ? x[j] : 1.0;
    out[static_cast<Eigen::Index>(i)] = std::sqrt(task_energy(ts_.tasks[i], f, weights_[i], params_));
  }
  return out;
}

double control_cost_argument(const ControlWeights& w, double period, double response) {
  const double arg = w.alpha * period + w.beta * response + w.gamma * response * response;
  if (arg >= 0) return arg;
  if (arg >= -1e-12) return 0.0;
  throw NumericError("negative control cost argument");
}

Vector control_residuals(std::span<const double> periods, std::span<const double> response,
                         std::span<const ControlWeights> weights) {
  if (periods.size() != response.size() || weights.size() != response.size()) {
    throw InvalidArgument("control residuals need one period, response and weight per task");
  }
  Vector out(static_cast<Eigen::Index>(response.size()));
  for (std::size_t i = 0; i < response.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] =
        std::sqrt(control_cost_argument(weights[i], periods[i], response[i]));
  }
  return out;
}

ControlProblem::ControlProblem(std::vector<ControlWeights> weights, Box box,
                               ResponseTimeOracle& oracle, PriorityAssignment p)
    : Problem(std::move(box), oracle.taskset().size(), oracle, std::move(p)),
      rt_oracle_(oracle),
      weights_(std::move(weights)),
      variable_of_task_(oracle.taskset().size(), -1) {
  const auto& mapping = oracle.mapping();
  if (mapping.kind != VariableKind::kPeriod) throw InvalidArgument("control problem needs period variables");
  if (mapping.dimension() != dimension()) throw InvalidArgument("mapping and box differ in size");
  if (weights_.size() != terms()) throw InvalidArgument("one control weight triple per task expected");
  for (std::size_t j = 0; j < mapping.dimension(); ++j) {
    for (int id : mapping.targets[j]) variable_of_task_.at(static_cast<std::size_t>(id)) = static_cast<int>(j);
  }
}

std::vector<double> ControlProblem::task_periods(const Vector& x) const {
  const auto& ts = rt_oracle_.taskset();
  std::vector<double> out(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    out[i] = variable_of_task_[i] >= 0 ? x[variable_of_task_[i]] : ts.tasks[i].period;
  }
  return out;
}

std::optional<ResponseTimeVector> ControlProblem::response_times(const Vector& x,
                                                                 const PriorityAssignment& p) {
  auto key = std::make_pair(p.order(), std::vector<double>(x.data(), x.data() + x.size()));
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  auto r = rt_oracle_.schedulable_response_times(as_span(x), p);
  if (memo_.size() >= (1u << 16)) memo_.clear();
  memo_.emplace(std::move(key), r);
  return r;
}

bool ControlProblem::schedulable(const Vector& x) {
  return response_times(x, priorities()).has_value();
}

double ControlProblem::cost(const Vector& x, const ResponseTimeVector& r) {
  return control_residuals(task_periods(x), r, weights_).squaredNorm();
}

std::vector<double> ControlProblem::cost_gradient(const Vector&, const ResponseTimeVector& r) {
  std::vector<double> g(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) g[i] = weights_[i].beta + 2 * weights_[i].gamma * r[i];
  return g;
}

Vector ControlProblem::residuals(const Vector& x) {
  const auto r = response_times(x, priorities());
  if (!r) throw EvaluationError("response times undefined at an unschedulable design");
  return control_residuals(task_periods(x), *r, weights_);
}

namespace {

struct PeriodBrackets {
  std::vector<double> down, up;
  std::vector<std::size_t> ambiguous;  // dimensions with two distinct choices
};

PeriodBrackets bracket_periods(std::span<const double> periods, std::span<const double> allowed) {
  if (allowed.empty()) throw InvalidArgument("allowed period set is empty");
  if (!std::is_sorted(allowed.begin(), allowed.end())) throw InvalidArgument("allowed period set is not sorted");
  const std::size_t n = periods.size();
  PeriodBrackets b{std::vector<double>(n), std::vector<double>(n), {}};
  for (std::size_t j = 0; j < n; ++j) {
    auto hi = std::lower_bound(allowed.begin(), allowed.end(), periods[j]);
    auto lo = std::upper_bound(allowed.begin(), allowed.end(), periods[j]);
    const bool has_up = hi != allowed.end();
    const bool has_down = lo != allowed.begin();
    b.up[j] = has_up ? *hi : *std::prev(lo);
    b.down[j] = has_down ? *std::prev(lo) : b.up[j];
    if (has_up && has_down && b.down[j] != b.up[j]) b.ambiguous.push_back(j);
  }
  return b;
}

}  // namespace

std::vector<double> round_periods(std::span<const double> periods,
                                  std::span<const double> allowed,
                                  SchedulabilityOracle& oracle, const PriorityAssignment& p) {
  const PeriodBrackets b = bracket_periods(periods, allowed);
  std::vector<double> out = b.up;
  for (std::size_t j : b.ambiguous) {
    std::vector<double> candidate = out;
    candidate[j] = b.down[j];
    if (oracle.is_schedulable(candidate, p)) out = std::move(candidate);
  }
  if (!oracle.is_schedulable(out, p)) throw RoundingInfeasible("no schedulable rounding of the periods");
  return out;
}

std::vector<double> round_periods(std::span<const double> periods,
                                  std::span<const double> allowed,
                                  SchedulabilityOracle& oracle, const PriorityAssignment& p,
                                  const RoundingCost& cost, std::size_t max_exhaustive) {
  const PeriodBrackets b = bracket_periods(periods, allowed);
  if (b.ambiguous.size() > max_exhaustive) return round_periods(periods, allowed, oracle, p);
  std::optional<std::vector<double>> best;
  double best_cost = std::numeric_limits<double>::infinity();
  const std::uint64_t combos = std::uint64_t{1} << b.ambiguous.size();
  for (std::uint64_t mask = 0; mask < combos; ++mask) {
    std::vector<double> candidate = b.up;
    for (std::size_t k = 0; k < b.ambiguous.size(); ++k) {
      if (mask >> k & 1) candidate[b.ambiguous[k]] = b.down[b.ambiguous[k]];
    }
    const auto value = cost(candidate);
    if (value && *value < best_cost) {
      best_cost = *value;
      best = std::move(candidate);
    }
  }
  if (!best || !oracle.is_schedulable(*best, p)) {
    throw RoundingInfeasible("no schedulable rounding of the periods");
  }
  return *best;
}

std::vector<double> default_period_set() {
  std::vector<double> out;
  for (double scale : {100.0, 1000.0, 10000.0}) {
    for (double m : {1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0}) out.push_back(m * scale);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void to_json(nlohmann::json& j, const EnergyModelParams& p) {
  j = {{"alpha", p.alpha}, {"gamma", p.gamma}, {"beta", p.beta}, {"simplified", p.simplified}};
}

void from_json(const nlohmann::json& j, EnergyModelParams& p) {
  p.alpha = j.value("alpha", 1.76);
  p.gamma = j.value("gamma", 3.0);
  p.beta = j.value("beta", 0.5);
  p.simplified = j.value("simplified", false);
}

void to_json(nlohmann::json& j, const ControlWeights& w) {
  j = {{"alpha", w.alpha}, {"beta", w.beta}, {"gamma", w.gamma}};
}

void from_json(const nlohmann::json& j, ControlWeights& w) {
  j.at("alpha").get_to(w.alpha);
  j.at("beta").get_to(w.beta);
  j.at("gamma").get_to(w.gamma);
}

}  // namespace northrt
