#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "homeplan/perception.hpp"
#include "homeplan/plan.hpp"
#include "homeplan/schema.hpp"
#include "homeplan/world.hpp"

namespace homeplan {

enum class FailCode {
  UnknownAction,
  ArityMismatch,
  UnknownLocation,
  NotFound,
  NoFocus,
  HandFull,
  FocusNotObject,
  NoHeld,
  UnknownSurface,
  UnknownDoor,
  AlreadyInState,
  NoAnswer,
  NoPath,
  EmptyQueue,
};

std::string_view to_string(FailCode code);

/// Failures the static validator is expected to predict: register
/// preconditions plus unknown names and wrong arity. Everything else depends
/// on world content.
bool is_static_failure(FailCode code);

struct StepOutcome {
  ActionCall action;
  std::optional<FailCode> failure;
  std::optional<std::string> utterance;
  std::string state_delta;

  bool ok() const { return !failure.has_value(); }
};

struct ExecutionTrace {
  std::vector<StepOutcome> steps;
  std::optional<std::size_t> halted_at;

  bool completed() const { return !halted_at.has_value(); }
};

struct SimContext {
  const SchemaRegistry* registry = &schema_registry();
  const AttributeRegistry* attributes = &default_attributes();
};

/// Executes one action in place. A failed step leaves both states untouched.
StepOutcome execute_step(WorldState& world, RobotState& robot, const ActionCall& call, const SimContext& ctx = {});

struct ExecutionResult {
  WorldState world;
  RobotState robot;
  ExecutionTrace trace;
};

/// Runs the plan step by step and halts at the first failed step.
ExecutionResult execute_plan(WorldState world, RobotState robot, const Plan& plan, const SimContext& ctx = {});

/// Multi-line text summary of the robot and the objects in the world.
std::string summarize(const WorldState& world, const RobotState& robot);

}  // namespace homeplan
