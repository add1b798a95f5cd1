#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "homeplan/plan.hpp"
#include "homeplan/schema.hpp"

namespace homeplan {

enum class RuleCode {
  UnknownAction,
  ArityMismatch,
  PickupWithoutFocus,
  PlaceWithoutHeld,
  GiveWithoutHeld,
  GiveWithoutFocus,
  AnswerWithoutSource,
  FollowWithoutFocus,
  AskNameWithoutFocus,
  PourWithoutHeld,
  DoubleHold,
};

std::string_view to_string(RuleCode code);

struct Finding {
  std::size_t step = 0;
  RuleCode code = RuleCode::UnknownAction;
  std::string message;
};

struct ValidationReport {
  std::vector<Finding> errors;
  std::vector<Finding> warnings;

  bool statically_valid() const { return errors.empty(); }
};

/// Single forward pass over the plan tracking the Focus/Held/Answer
/// registers. Focus also remembers whether it points at an object or a
/// person, so Pickup on a person and Give_To on an object are flagged.
ValidationReport validate(const Plan& plan, const SchemaRegistry& registry = schema_registry());

}  // namespace homeplan
