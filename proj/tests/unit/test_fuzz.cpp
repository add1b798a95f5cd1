#include <doctest.h>

#include "fixtures.hpp"
#include "homeplan/simulator.hpp"
#include "homeplan/validator.hpp"

using namespace homeplan;

namespace {

// The robot holds at most one object, and it is the one marked as held.
bool gripper_consistent(const WorldState& w, const RobotState& r) {
  std::size_t held = 0;
  for (const auto& [id, obj] : w.objects) {
    if (std::holds_alternative<HeldByRobot>(obj.place)) {
      ++held;
      if (r.held != id) return false;
    }
  }
  return held == (r.held ? 1u : 0u);
}

std::vector<Id> object_ids(const WorldState& w) {
  std::vector<Id> ids;
  for (const auto& [id, obj] : w.objects) ids.push_back(id);
  return ids;
}

}  // namespace

TEST_CASE("fuzzed plans keep the simulator invariants and agree with the validator") {
  const Scenario start = homeplan::testing::house();
  const auto ids = object_ids(start.world);
  std::mt19937_64 rng(777);
  std::size_t completed = 0, static_halts = 0;

  for (int i = 0; i < 10000; ++i) {
    const Plan plan = homeplan::testing::random_world_plan(rng);
    WorldState w = start.world;
    RobotState r = start.robot;
    std::optional<std::size_t> halt;
    for (std::size_t s = 0; s < plan.steps.size(); ++s) {
      const WorldState w0 = w;
      const RobotState r0 = r;
      const auto out = execute_step(w, r, plan.steps[s]);
      if (!out.ok()) {
        REQUIRE(w == w0);
        REQUIRE(r == r0);
        halt = s;
        break;
      }
      REQUIRE(object_ids(w) == ids);
      REQUIRE(gripper_consistent(w, r));
    }

    const auto res = execute_plan(start.world, start.robot, plan);
    REQUIRE(res.trace.halted_at == halt);
    REQUIRE(res.world == w);
    REQUIRE(res.robot == r);
    if (!halt) ++completed;

    const auto rep = validate(plan);
    if (halt) {
      const FailCode code = *res.trace.steps.back().failure;
      if (is_static_failure(code)) {
        ++static_halts;
        REQUIRE_MESSAGE(!rep.errors.empty(), print_canonical(plan));
        REQUIRE_MESSAGE(rep.errors.front().step == *halt, print_canonical(plan));
      } else if (!rep.errors.empty()) {
        REQUIRE_MESSAGE(rep.errors.front().step > *halt, print_canonical(plan));
      }
    } else {
      REQUIRE_MESSAGE(rep.statically_valid(), print_canonical(plan));
    }
  }
  CHECK(completed > 500);
  CHECK(static_halts > 500);
}

TEST_CASE("skipping failed steps explores deep states without breaking invariants") {
  const Scenario start = homeplan::testing::house();
  const auto ids = object_ids(start.world);
  std::mt19937_64 rng(4242);
  std::size_t succeeded = 0;
  for (int i = 0; i < 2000; ++i) {
    const Plan plan = homeplan::testing::random_world_plan(rng, 30);
    WorldState w = start.world;
    RobotState r = start.robot;
    for (const auto& call : plan.steps) {
      const WorldState w0 = w;
      const RobotState r0 = r;
      if (!execute_step(w, r, call).ok()) {
        REQUIRE(w == w0);
        REQUIRE(r == r0);
        continue;
      }
      ++succeeded;
      REQUIRE(object_ids(w) == ids);
      REQUIRE(gripper_consistent(w, r));
    }
  }
  CHECK(succeeded > 5000);
}

