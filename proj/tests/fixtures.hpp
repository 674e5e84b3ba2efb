#pragma once

#include <memory>

#include "northrt/north.hpp"
#include "northrt/oracle.hpp"
#include "northrt/problem.hpp"

namespace fixtures {

// Two preemptive tasks on one core: tau0 {T=10, D=6} above tau1 {T=40, D=40}.
// Variables are the two WCETs in [4, 10] x [1, 40]; residuals (8/c1, 1/c2).
inline northrt::TaskSet two_task_set() {
  northrt::TaskSet ts;
  ts.tasks.push_back({0, 10.0, 6.0, 0.0, 0.0, 4.0, std::nullopt});
  ts.tasks.push_back({1, 40.0, 40.0, 0.0, 0.0, 1.0, std::nullopt});
  return ts;
}

struct TwoTask {
  northrt::RtaOracle oracle{two_task_set(),
                            northrt::DesignMapping::per_task(northrt::VariableKind::kWcet, 2)};
  northrt::FunctionProblem problem{
      "two-task",
      northrt::Box((northrt::Vector(2) << 4.0, 1.0).finished(),
                   (northrt::Vector(2) << 10.0, 40.0).finished()),
      2,
      [](const northrt::Vector& c) {
        return northrt::Vector((northrt::Vector(2) << 8.0 / c[0], 1.0 / c[1]).finished());
      },
      oracle,
      northrt::PriorityAssignment::identity(2)};
};

inline northrt::Vector vec(std::initializer_list<double> v) {
  northrt::Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) out[i++] = d;
  return out;
}

}  // namespace fixtures
