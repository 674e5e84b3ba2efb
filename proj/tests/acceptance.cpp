// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "fixtures.hpp"
#include "northrt/baselines.hpp"
#include "northrt/errors.hpp"
#include "northrt/harness.hpp"

using namespace northrt;
using fixtures::vec;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
  std::printf("%s  %s: %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

bool non_increasing(const std::vector<double>& v) {
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (v[k] > v[k - 1]) return false;
  }
  return true;
}

// Independent single-core preemptive fixed-priority response-time test.
bool rta_schedulable(const std::vector<double>& exec, const std::vector<double>& period,
                     const std::vector<double>& deadline, const std::vector<int>& order) {
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const int i = order[pos];
    double r = exec[i];
    while (true) {
      double next = exec[i];
      for (std::size_t k = 0; k < pos; ++k) {
        const int j = order[k];
        next += std::ceil(r / period[j]) * exec[j];
      }
      if (next > deadline[i]) return false;
      if (next == r) break;
      r = next;
    }
  }
  return true;
}

// Schedulability of a frequency design of a simplified-energy RM instance.
bool frequency_design_schedulable(const Instance& inst, const Vector& f,
                                  const PriorityAssignment& p) {
  const auto& tasks = inst.ts.tasks;
  std::vector<double> exec(tasks.size()), period(tasks.size()), deadline(tasks.size());
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    period[i] = tasks[i].period;
    deadline[i] = tasks[i].deadline;
  }
  for (std::size_t j = 0; j < inst.mapping.targets.size(); ++j) {
    for (int id : inst.mapping.targets[j]) exec[id] = tasks[id].c_org / f[static_cast<Eigen::Index>(j)];
  }
  return rta_schedulable(exec, period, deadline, p.order());
}

// Closed-form energy of a simplified-energy instance: sum (H/T) 1.76 f^2 c.
double analytic_energy(const Instance& inst, const Vector& f) {
  const auto w = energy_weights(inst.ts);
  double e = 0;
  for (std::size_t j = 0; j < inst.mapping.targets.size(); ++j) {
    for (int id : inst.mapping.targets[j]) {
      const double fj = f[static_cast<Eigen::Index>(j)];
      e += w[id] * inst.energy.alpha * std::pow(fj, inst.energy.gamma) * inst.ts.tasks[id].c_org / fj;
    }
  }
  return e;
}

template <class F>
void parallel_for(int count, F&& body) {
  const int threads = std::max(1u, std::thread::hardware_concurrency());
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

// ---------------------------------------------------------------------------

void worked_examples() {
  // First LM iterate. Hand-derived: J = diag(-1/2, -1), F = (2, 1), so
  // (1 + lambda) * diag(1/4, 1) * delta = (1, 1).
  {
    fixtures::TwoTask f;
    const auto t0 = Clock::now();
    const auto sys = f.problem.residual_system();
    const Vector x0 = vec({4, 1});
    const Matrix J = numerical_jacobian(sys, x0, 1e-5, f.problem.box());
    const Vector x1 = x0 + lm_step(J, sys(x0), 1e3);
    const double ms = ms_since(t0);
    const Vector expect = x0 + vec({4.0 / 1001.0, 1.0 / 1001.0});
    const bool ok = std::abs(x1[0] - 4.004) <= 1e-3 && std::abs(x1[1] - 1.001) <= 1e-3 &&
                    (x1 - expect).norm() <= 1e-6 && ms < 1.0;
    report("example LM first iterate", ok,
           fmt("x1 = (%.6f, %.6f), hand value (%.6f, %.6f), %.3f ms", x1[0], x1[1], expect[0], expect[1], ms));
  }
  {
    fixtures::TwoTask f;
    VariableSpace space(vec({4, 1}), f.problem.box());
    nmbo_descend(f.problem, space);
    const Vector& x = space.x();
    report("example NMBO stop", std::abs(x[0] - 5.999) <= 0.02 && std::abs(x[1] - 1.499) <= 0.02,
           fmt("NMBO ends at (%.6f, %.6f)", x[0], x[1]));
  }
  {
    fixtures::TwoTask f;
    VariableSpace space(vec({5.999, 1.499}), f.problem.box());
    EliminationProbe probe;
    const auto first = select_eliminations(f.problem, space, vec({1, 1}), probe, TestMode::kPlain);
    const int first_steps = probe.growth_steps;
    for (int j : first) space.eliminate(j);
    const LMState lm = nmbo_descend(f.problem, space);
    const auto second =
        select_eliminations(f.problem, space, elimination_direction(lm, space), probe, TestMode::kPlain);
    const bool ok = first == std::vector<int>{0} && first_steps == 12 &&
                    second == std::vector<int>{1} && probe.growth_steps == 23;
    report("example elimination exponents", ok,
           fmt("first {c%d} at 1.5^%d, second {c%d} at 1.5^%d", first.empty() ? -1 : first[0] + 1,
               first_steps, second.empty() ? -1 : second[0] + 1, probe.growth_steps));
  }
  {
    fixtures::TwoTask f;
    const auto t0 = Clock::now();
    const auto res = north_optimize(f.problem, vec({4, 1}));
    const double ms = ms_since(t0);
    const Vector& x = res.space.x();
    const double obj = f.problem.objective(x);
    fixtures::TwoTask g;
    const auto grid = brute_force_optimum(g.problem, 79);  // grid contains (6, 16)
    const double analytic = 64.0 / 36.0 + 1.0 / 256.0;
    const bool grid_ok = grid.x && std::abs((*grid.x)[0] - 6) < 1e-12 &&
                         std::abs((*grid.x)[1] - 16) < 1e-12 &&
                         std::abs(grid.objective - analytic) < 1e-12;
    const double gap = (obj - analytic) / analytic;
    const bool ok = std::abs(x[0] - 5.999) <= 0.02 && std::abs(x[1] - 15.89) <= 0.05 &&
                    std::abs(gap) <= 0.005 && grid_ok && ms < 100;
    report("example NORTH end to end", ok,
           fmt("x = (%.6f, %.6f), objective %.6f vs grid optimum %.6f at (6, 16) (%+.3f%%), %.2f ms",
               x[0], x[1], obj, grid.objective, 100 * gap, ms));
  }
  {
    TimingParameters p{{4, 1}, {10, 6}, {10, 6}};
    const auto r = rta_response_times(p, PriorityAssignment::identity(2));
    RtaOracle oracle(fixtures::two_task_set(), DesignMapping::per_task(VariableKind::kWcet, 2));
    const std::vector<double> x{5.999, 15.89};
    const auto r2 = oracle.response_times(x, PriorityAssignment::identity(2));
    const bool ok = r == ResponseTimeVector{4, 5} && r2[1] >= 39.88 && r2[1] <= 39.90;
    report("example response times", ok, fmt("r = (%g, %g); r2 at (5.999, 15.89) = %.4f", r[0], r[1], r2[1]));
  }
}

struct RunChecks {
  std::mutex m;
  int runs = 0;
  int infeasible_outputs = 0;
  int bound_violations = 0;
  int non_monotone = 0;
  std::string first_problem;
  void flag(int& counter, const std::string& what) {
    ++counter;
    if (first_problem.empty()) first_problem = what;
  }
};

void feasibility_suite(RunChecks& checks) {
  const auto t0 = Clock::now();
  std::atomic<int> skipped{0};
  parallel_for(500, [&](int k) {
    const std::uint64_t seed = 1000 + static_cast<std::uint64_t>(k);
    std::mt19937_64 rng(seed);
    PresetParams params;
    params.n = 5 + static_cast<int>(rng() % 16);
    params.utilization = std::uniform_real_distribution<double>(0.5, 0.9)(rng);
    const Instance inst = generate_instance(Preset::kEnergyRm, seed, params);
    Session a = open_session(inst, "rta");
    Vector x0;
    try {
      x0 = initial_solution(*a.problem, VariableKind::kFrequency);
    } catch (const InitialInfeasible&) {
      ++skipped;
      return;
    }
    const auto north = north_optimize(*a.problem, x0);
    Session b = open_session(inst, "rta");
    const auto plus = northplus_optimize(*b.problem, x0, inst.priorities);

    std::lock_guard lock(checks.m);
    checks.runs += 2;
    const std::string tag = fmt("seed %llu", static_cast<unsigned long long>(seed));
    if (!frequency_design_schedulable(inst, north.space.x(), inst.priorities) || !inst.box.contains(north.space.x())) {
      checks.flag(checks.infeasible_outputs, tag + " NORTH");
    }
    if (!frequency_design_schedulable(inst, plus.space.x(), plus.priorities) || !inst.box.contains(plus.space.x())) {
      checks.flag(checks.infeasible_outputs, tag + " NORTH+");
    }
    if (north.trace.elimination_rounds > params.n) checks.flag(checks.bound_violations, tag + " NORTH");
    if (plus.trace.elimination_rounds > params.n) checks.flag(checks.bound_violations, tag + " NORTH+");
    if (!non_increasing(north.trace.round_objective) || !non_increasing(north.trace.descent)) {
      checks.flag(checks.non_monotone, tag + " NORTH");
    }
    if (!non_increasing(plus.trace.objective) || !non_increasing(plus.trace.descent)) {
      checks.flag(checks.non_monotone, tag + " NORTH+");
    }
  });
  const double s = ms_since(t0) / 1000;
  report("feasibility invariant", checks.infeasible_outputs == 0 && s < 120,
         fmt("%d NORTH/NORTH+ outputs on %d sets checked by an independent RTA, %d infeasible; "
             "%d sets skipped (initial point unschedulable); %.1f s",
             checks.runs, checks.runs / 2, checks.infeasible_outputs, skipped.load(), s));
}

void oracle_equivalence(RunChecks& checks) {
  const auto t0 = Clock::now();
  std::vector<double> gaps(50, NAN);
  std::vector<int> sizes(50, 0);
  std::atomic<int> skipped{0};
  parallel_for(50, [&](int k) {
    const std::uint64_t seed = 5000 + static_cast<std::uint64_t>(k);
    PresetParams params;
    params.n = 1 + k % 3;
    const Instance inst = generate_instance(Preset::kEnergyRm, seed, params);
    Session a = open_session(inst, "rta");
    Vector x0;
    try {
      x0 = initial_solution(*a.problem, VariableKind::kFrequency);
    } catch (const InitialInfeasible&) {
      ++skipped;
      return;
    }
    const auto north = north_optimize(*a.problem, x0);
    Session b = open_session(inst, "rta");
    const auto grid = brute_force_optimum(*b.problem, 200);
    if (!grid.x) return;
    const double obj = analytic_energy(inst, north.space.x());
    const double ref = analytic_energy(inst, *grid.x);
    gaps[k] = (obj - ref) / ref * 100;
    sizes[k] = params.n;
    std::lock_guard lock(checks.m);
    ++checks.runs;
    if (north.trace.elimination_rounds > params.n) checks.flag(checks.bound_violations, fmt("seed %llu", (unsigned long long)seed));
    if (!non_increasing(north.trace.round_objective) || !non_increasing(north.trace.descent)) {
      checks.flag(checks.non_monotone, fmt("seed %llu", (unsigned long long)seed));
    }
  });
  const double s = ms_since(t0) / 1000;
  int compared = 0;
  double worst = -INFINITY;
  for (double g : gaps) {
    if (std::isnan(g)) continue;
    ++compared;
    worst = std::max(worst, g);
  }
  report("oracle equivalence", compared > 0 && worst <= 5.0 && s < 60,
         fmt("%d instances (N <= 3), worst NORTH gap to the 200/dim grid optimum %+.3f%%, "
             "%d skipped, %.1f s",
             compared, worst, 50 - compared, s));
}

void annealing_monotonicity(RunChecks& checks) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    PresetParams params;
    params.n = 5 + static_cast<int>(seed % 6);
    const Instance inst = generate_instance(Preset::kEnergyRm, 9000 + seed, params);
    Session s = open_session(inst, "rta");
    Vector x0;
    try {
      x0 = initial_solution(*s.problem, VariableKind::kFrequency);
    } catch (const InitialInfeasible&) {
      continue;
    }
    SAConfig cfg;
    cfg.iterations = 20000;
    cfg.seed = seed;
    const auto res = simulated_annealing(*s.problem, x0, cfg);
    ++checks.runs;
    if (!non_increasing(res.best_trace)) checks.flag(checks.non_monotone, "SA");
    if (!frequency_design_schedulable(inst, res.best, inst.priorities)) checks.flag(checks.infeasible_outputs, "SA");
  }
}

void northplus_vs_north(RunChecks& checks) {
  const auto t0 = Clock::now();
  const int count = 100;
  std::vector<double> gaps(count, NAN);
  std::vector<std::string> notes(count);
  parallel_for(count, [&](int k) {
    const std::uint64_t seed = static_cast<std::uint64_t>(k);
    PresetParams params;
    params.n = 3 + k % 6;
    const Instance inst = generate_instance(Preset::kControlDag, seed, params);
    const auto a = run_method(inst, "north", "sim", seed, 600);
    const auto b = run_method(inst, "northplus", "sim", seed, 600);
    if (!a.feasible || !b.feasible || a.timeout || b.timeout) {
      notes[k] = a.note + b.note;
      return;
    }
    gaps[k] = (b.obj_final - a.obj_final) / a.obj_final * 100;
    std::lock_guard lock(checks.m);
    checks.runs += 2;
    if (a.elim_rounds > params.n || b.elim_rounds > params.n) checks.flag(checks.bound_violations, "control");
  });
  const double s = ms_since(t0) / 1000;
  std::vector<double> valid;
  for (double g : gaps) {
    if (!std::isnan(g)) valid.push_back(g);
  }
  std::sort(valid.begin(), valid.end());
  const auto n = static_cast<int>(valid.size());
  const int not_worse = static_cast<int>(std::count_if(valid.begin(), valid.end(), [](double g) { return g <= 0; }));
  const int beyond = static_cast<int>(std::count_if(valid.begin(), valid.end(), [](double g) { return g > 1.0; }));
  const double median = n == 0 ? NAN : (n % 2 ? valid[n / 2] : 0.5 * (valid[n / 2 - 1] + valid[n / 2]));
  const bool ok = n == count && not_worse >= 0.7 * n && beyond == 0 && median <= 0 && s < 600;
  report("NORTH+ vs NORTH", ok,
         fmt("%d/%d control instances compared; NORTH+ <= NORTH on %d (%.0f%%, need >= 70%%); "
             "worse by > 1%% on %d (need 0, worst %+.2f%%); median change %+.3f%% (need <= 0); %.1f s",
             n, count, not_worse, n ? 100.0 * not_worse / n : 0.0, beyond, n ? valid.back() : NAN,
             median, s));
}

void scalability() {
  const std::vector<int> sizes{5, 10, 20, 40};
  const int seeds = 10;
  std::vector<double> mean_calls;
  for (int n : sizes) {
    std::vector<double> calls(seeds, NAN);
    parallel_for(seeds, [&](int k) {
      PresetParams params;
      params.n = n;
      params.utilization = 0.7;
      const Instance inst = generate_instance(Preset::kEnergyRm, 7000 + static_cast<std::uint64_t>(k), params);
      Session s = open_session(inst, "rta");
      try {
        const Vector x0 = initial_solution(*s.problem, VariableKind::kFrequency);
        north_optimize(*s.problem, x0);
        calls[k] = static_cast<double>(s.oracle->query_count());
      } catch (const InitialInfeasible&) {
      }
    });
    double sum = 0;
    int used = 0;
    for (double c : calls) {
      if (!std::isnan(c)) {
        sum += c;
        ++used;
      }
    }
    mean_calls.push_back(used ? sum / used : NAN);
  }
  // Least-squares slope of log(calls) against log(N).
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    mx += std::log(sizes[i]);
    my += std::log(mean_calls[i]);
  }
  mx /= sizes.size();
  my /= sizes.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const double dx = std::log(sizes[i]) - mx;
    sxy += dx * (std::log(mean_calls[i]) - my);
    sxx += dx * dx;
  }
  const double slope = sxy / sxx;
  report("scalability", std::isfinite(slope) && slope <= 2.5,
         fmt("mean oracle calls %.0f / %.0f / %.0f / %.0f at N = 5/10/20/40, log-log slope %.3f",
             mean_calls[0], mean_calls[1], mean_calls[2], mean_calls[3], slope));
}

void initial_heuristic() {
  int agree = 0, total = 0, feasible_sets = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    std::mt19937_64 rng(seed + 31337);
    PresetParams params;
    params.n = 1 + static_cast<int>(seed % 3);
    // Near full load some sets miss deadlines even at f = 1.
    params.utilization = std::uniform_real_distribution<double>(0.7, 1.0)(rng);
    const Instance inst = generate_instance(Preset::kEnergyRm, 11000 + seed, params);
    Session s = open_session(inst, "rta");
    bool heuristic = true;
    try {
      initial_solution(*s.problem, VariableKind::kFrequency);
    } catch (const InitialInfeasible&) {
      heuristic = false;
    }
    // Independent grid scan of the box, 25 points per dimension.
    const int res = 25;
    const auto dim = static_cast<int>(inst.box.dimension());
    bool any = false;
    std::vector<int> idx(dim, 0);
    while (!any) {
      Vector f(dim);
      for (int j = 0; j < dim; ++j) {
        f[j] = inst.box.lower[j] + (inst.box.upper[j] - inst.box.lower[j]) * idx[j] / (res - 1);
      }
      any = frequency_design_schedulable(inst, f, inst.priorities);
      int j = dim - 1;
      while (j >= 0 && ++idx[j] == res) idx[j--] = 0;
      if (j < 0) break;
    }
    ++total;
    if (any) ++feasible_sets;
    if (any == heuristic) ++agree;
  }
  report("initial-solution heuristic", agree == total,
         fmt("%d/%d agree with an independent grid scan (%d sets have a feasible point)", agree, total,
             feasible_sets));
}

void barrier_gradient() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0;
  for (int k = 0; k < 100; ++k) {
    const int n = 1 + static_cast<int>(rng() % 6);
    std::vector<double> beta(n), gamma(n), d(n), r(n);
    for (int i = 0; i < n; ++i) {
      beta[i] = 1 + 1e4 * u(rng);
      gamma[i] = 10 * u(rng);
      d[i] = 100 + 1e4 * u(rng);
      r[i] = d[i] * (0.05 + 0.9 * u(rng));
    }
    const double w = std::pow(10.0, -3 + 10 * u(rng));
    ResponseCost h{[&](std::span<const double> rr) {
                     double s = 0;
                     for (int i = 0; i < n; ++i) s += beta[i] * rr[i] + gamma[i] * rr[i] * rr[i];
                     return s;
                   },
                   [&](std::span<const double> rr) {
                     std::vector<double> g(n);
                     for (int i = 0; i < n; ++i) g[i] = beta[i] + 2 * gamma[i] * rr[i];
                     return g;
                   }};
    const auto b = barrier_value_and_gradient(h, r, d, w);
    for (int i = 0; i < n; ++i) {
      const double step = 1e-6 * std::min(r[i], d[i] - r[i]);
      auto up = r, down = r;
      up[i] += step;
      down[i] -= step;
      // Analytic pieces of the difference quotient, evaluated separately to
      // avoid cancellation in the large absolute value of Z.
      const double dh = (h.value(up) - h.value(down)) / (2 * step);
      const double dbar = -w * (std::log(d[i] - up[i]) - std::log(d[i] - down[i])) / (2 * step);
      const double fd = dh + dbar;
      worst = std::max(worst, std::abs(fd - b.gradient[i]) / std::abs(b.gradient[i]));
    }
  }
  report("barrier gradient", worst <= 1e-5,
         fmt("max relative error vs central differences over 100 points: %.3e", worst));
}

}  // namespace

int main() {
  RunChecks checks;
  worked_examples();
  feasibility_suite(checks);
  oracle_equivalence(checks);
  annealing_monotonicity(checks);
  northplus_vs_north(checks);
  report("elimination bound", checks.bound_violations == 0,
         fmt("%d violations of rounds <= N over the runs above%s", checks.bound_violations,
             checks.first_problem.empty() ? "" : (" (first: " + checks.first_problem + ")").c_str()));
  report("monotonicity", checks.non_monotone == 0 && checks.infeasible_outputs == 0,
         fmt("%d runs with a rising NMBO, NORTH, NORTH+ or SA best-so-far trace", checks.non_monotone));
  scalability();
  initial_heuristic();
  barrier_gradient();
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
