#include <doctest.h>

#include "fixtures.hpp"
#include "northrt/errors.hpp"
#include "northrt/harness.hpp"

using namespace northrt;
using fixtures::vec;

TEST_CASE("NMBO on the two-task example stops at the first boundary") {
  fixtures::TwoTask f;
  VariableSpace space(vec({4, 1}), f.problem.box());
  const LMState lm = nmbo_descend(f.problem, space);
  CHECK(space.x()[0] == doctest::Approx(5.999).epsilon(2e-4));
  CHECK(space.x()[1] == doctest::Approx(1.499).epsilon(2e-3));
  CHECK(lm.accepted > 0);
  CHECK(f.problem.feasible(space.x()));
}

TEST_CASE("NMBO with everything eliminated leaves the point alone") {
  fixtures::TwoTask f;
  VariableSpace space(vec({5, 2}), f.problem.box());
  space.eliminate(0);
  space.eliminate(1);
  const auto before = f.oracle.query_count();
  nmbo_descend(f.problem, space);
  CHECK(space.x() == vec({5, 2}));
  CHECK(f.oracle.query_count() == before);
}

TEST_CASE("NMBO refuses an infeasible start") {
  fixtures::TwoTask f;
  VariableSpace space(vec({7, 1}), f.problem.box());
  CHECK_THROWS_AS(nmbo_descend(f.problem, space), InvalidArgument);
}

TEST_CASE("dimension tests at the NMBO stopping point") {
  fixtures::TwoTask f;
  VariableSpace space(vec({5.999, 1.499}), f.problem.box());
  const Vector up = vec({1, 1});
  CHECK(dimension_feasibility_test(f.problem, space, up, 1e-5, 0, TestMode::kPlain));
  CHECK(dimension_feasibility_test(f.problem, space, up, 1e-5, 1, TestMode::kPlain));
  CHECK_FALSE(dimension_feasibility_test(f.problem, space, up, 1e-1, 0, TestMode::kPlain));
  CHECK(dimension_feasibility_test(f.problem, space, up, 1e-1, 1, TestMode::kPlain));
}

TEST_CASE("dimension test conventions") {
  fixtures::TwoTask f;
  VariableSpace space(vec({5.999, 1.499}), f.problem.box());
  // No movement wanted: passes without a query.
  const auto before = f.oracle.query_count();
  CHECK(dimension_feasibility_test(f.problem, space, vec({0, 0}), 1e-1, 0, TestMode::kPlain));
  CHECK(f.oracle.query_count() == before);
  // Negative direction probes downwards, which is feasible here.
  CHECK(dimension_feasibility_test(f.problem, space, vec({-1, 0}), 1e-1, 0, TestMode::kPlain));
  // Leaving the box fails.
  VariableSpace top(vec({5, 40}), f.problem.box());
  CHECK_FALSE(dimension_feasibility_test(f.problem, top, vec({0, 1}), 1e-5, 1, TestMode::kPlain));
  // Descent mode: moving c0 down raises the objective.
  CHECK_FALSE(dimension_feasibility_test(f.problem, space, vec({-1, 0}), 1e-1, 0, TestMode::kDescent));
  CHECK(dimension_feasibility_test(f.problem, space, vec({0, 1}), 1e-1, 1, TestMode::kDescent));
}

TEST_CASE("elimination picks c0 after twelve growth steps") {
  fixtures::TwoTask f;
  VariableSpace space(vec({5.999, 1.499}), f.problem.box());
  EliminationProbe probe;
  const auto out = select_eliminations(f.problem, space, vec({1, 1}), probe, TestMode::kPlain);
  CHECK(out == std::vector<int>{0});
  CHECK(probe.growth_steps == 12);
  CHECK(probe.tolerance > 0.001);
}

TEST_CASE("second round descends c1 to the boundary and eliminates it at step 23") {
  fixtures::TwoTask f;
  VariableSpace space(vec({5.999, 1.499}), f.problem.box());
  EliminationProbe probe;
  select_eliminations(f.problem, space, vec({1, 1}), probe, TestMode::kPlain);
  space.eliminate(0);
  const LMState lm = nmbo_descend(f.problem, space);
  CHECK(space.x()[0] == 5.999);
  CHECK(space.x()[1] == doctest::Approx(15.89).epsilon(0.05 / 15.89));
  const auto out =
      select_eliminations(f.problem, space, elimination_direction(lm, space), probe, TestMode::kPlain);
  CHECK(out == std::vector<int>{1});
  CHECK(probe.growth_steps == 23);
}

TEST_CASE("a box edge in the wanted direction fails at the first probe") {
  fixtures::TwoTask f;
  VariableSpace space(vec({5, 40}), f.problem.box());
  EliminationProbe probe;
  CHECK(select_eliminations(f.problem, space, vec({0, 1}), probe, TestMode::kPlain) ==
        std::vector<int>{1});
  CHECK(probe.growth_steps == 0);
}

TEST_CASE("no wanted movement ends elimination with an empty set") {
  fixtures::TwoTask f;
  VariableSpace space(vec({5, 2}), f.problem.box());
  EliminationProbe probe;
  CHECK(select_eliminations(f.problem, space, vec({0, 0}), probe, TestMode::kPlain).empty());
  CHECK(probe.tolerance > f.problem.box().diameter());
}

TEST_CASE("NORTH end to end on the two-task example") {
  fixtures::TwoTask f;
  const auto res = north_optimize(f.problem, vec({4, 1}));
  CHECK(res.space.x()[0] == doctest::Approx(5.999).epsilon(0.02 / 5.999));
  CHECK(res.space.x()[1] == doctest::Approx(15.89).epsilon(0.05 / 15.89));
  CHECK(res.space.all_eliminated());
  CHECK(res.trace.elimination_rounds == 2);
  const double obj = f.problem.objective(res.space.x());
  CHECK(obj == doctest::Approx(64.0 / (5.999 * 5.999) + 1.0 / (15.89 * 15.89)).epsilon(2e-3));
  for (std::size_t k = 1; k < res.trace.round_objective.size(); ++k) {
    CHECK(res.trace.round_objective[k] <= res.trace.round_objective[k - 1]);
  }
}

TEST_CASE("NORTH refuses an infeasible start") {
  fixtures::TwoTask f;
  CHECK_THROWS_AS(north_optimize(f.problem, vec({7, 1})), InvalidArgument);
}

TEST_CASE("every accepted NORTH iterate is schedulable") {
  fixtures::TwoTask f;
  RtaOracle check(fixtures::two_task_set(), DesignMapping::per_task(VariableKind::kWcet, 2));
  int seen = 0;
  NorthOptions opts;
  opts.on_accept = [&](const Vector& x) {
    ++seen;
    CHECK(check.is_schedulable(std::span<const double>(x.data(), 2), PriorityAssignment::identity(2)));
  };
  north_optimize(f.problem, vec({4, 1}), opts);
  CHECK(seen > 0);
}

TEST_CASE("eliminated coordinates never move") {
  fixtures::TwoTask f;
  VariableSpace probe_space(vec({4, 1}), f.problem.box());
  nmbo_descend(f.problem, probe_space);
  const double first = probe_space.x()[0];
  const auto res = north_optimize(f.problem, vec({4, 1}));
  REQUIRE(res.trace.eliminated.front() == std::vector<int>{0});
  CHECK(res.space.x()[0] == first);

  VariableSpace space(vec({5, 2}), f.problem.box());
  space.eliminate(0);
  CHECK_THROWS_AS(space.set_x(vec({5.5, 2})), InvalidArgument);
  CHECK_NOTHROW(space.set_x(vec({5, 3})));
}

TEST_CASE("an interior optimum is reached exactly as by plain LM") {
  // Schedulable everywhere in the box; optimum at (6, 2) in the interior.
  fixtures::TwoTask f;
  FunctionProblem quad(
      "quad", Box(vec({4, 1}), vec({5.9, 4})), 2,
      [](const Vector& c) { return Vector(vec({c[0] - 5, c[1] - 2})); }, f.oracle,
      PriorityAssignment::identity(2));
  const auto res = north_optimize(quad, vec({4, 1}));
  LMState lm;
  lm.bounds = quad.box();
  const Vector plain = lm_minimize(quad.residual_system(), vec({4, 1}),
                                   [&](const Vector& x) { return quad.feasible(x); }, lm);
  CHECK((res.space.x() - plain).norm() <= 1e-6);
}

TEST_CASE("NORTH on random energy sets stays within N elimination rounds") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    PresetParams params;
    params.n = 3 + static_cast<int>(seed % 8);
    const Instance inst = generate_instance(Preset::kEnergyRm, seed, params);
    Session s = open_session(inst, "rta");
    Vector x0;
    try {
      x0 = initial_solution(*s.problem, VariableKind::kFrequency);
    } catch (const InitialInfeasible&) {
      continue;
    }
    const auto res = north_optimize(*s.problem, x0);
    CHECK(res.trace.elimination_rounds <= params.n);
    CHECK(s.problem->feasible(res.space.x()));
    CHECK(res.trace.round_queries.back() <= s.oracle->query_count());
    for (std::size_t k = 1; k < res.trace.descent.size(); ++k) {
      CHECK(res.trace.descent[k] <= res.trace.descent[k - 1]);
    }
  }
}

TEST_CASE("NORTH stops on request and keeps a feasible point") {
  fixtures::TwoTask f;
  NorthOptions opts;
  opts.stop = [] { return true; };
  const auto res = north_optimize(f.problem, vec({4, 1}), opts);
  CHECK(res.trace.stopped);
  CHECK(res.space.x() == vec({4, 1}));
}
