#include "homeplan/validator.hpp"

#include <map>

namespace homeplan {

std::string_view to_string(RuleCode code) {
  switch (code) {
    case RuleCode::UnknownAction: return "UnknownAction";
    case RuleCode::ArityMismatch: return "ArityMismatch";
    case RuleCode::PickupWithoutFocus: return "PickupWithoutFocus";
    case RuleCode::PlaceWithoutHeld: return "PlaceWithoutHeld";
    case RuleCode::GiveWithoutHeld: return "GiveWithoutHeld";
    case RuleCode::GiveWithoutFocus: return "GiveWithoutFocus";
    case RuleCode::AnswerWithoutSource: return "AnswerWithoutSource";
    case RuleCode::FollowWithoutFocus: return "FollowWithoutFocus";
    case RuleCode::AskNameWithoutFocus: return "AskNameWithoutFocus";
    case RuleCode::PourWithoutHeld: return "PourWithoutHeld";
    case RuleCode::DoubleHold: return "DoubleHold";
  }
  return "?";
}

namespace {

enum class FocusState { Unset, Object, Person };

struct AbstractRegisters {
  FocusState focus = FocusState::Unset;
  bool held = false;
  bool answer = false;
};

// Which focus kind a Focus-reading action needs, and the code it raises.
struct FocusRule {
  FocusState required;
  RuleCode code;
};

const std::map<std::string, FocusRule>& focus_rules() {
  static const std::map<std::string, FocusRule> rules = {
      {"Pickup", {FocusState::Object, RuleCode::PickupWithoutFocus}},
      {"Give_To", {FocusState::Person, RuleCode::GiveWithoutFocus}},
      {"Follow", {FocusState::Person, RuleCode::FollowWithoutFocus}},
      {"Ask_Name", {FocusState::Person, RuleCode::AskNameWithoutFocus}},
  };
  return rules;
}

const std::map<std::string, RuleCode>& held_rules() {
  static const std::map<std::string, RuleCode> rules = {
      {"Place_On", RuleCode::PlaceWithoutHeld},
      {"Place_Next", RuleCode::PlaceWithoutHeld},
      {"Give_To", RuleCode::GiveWithoutHeld},
      {"Pour_In", RuleCode::PourWithoutHeld},
  };
  return rules;
}

std::string_view focus_name(FocusState f) {
  switch (f) {
    case FocusState::Unset: return "nothing";
    case FocusState::Object: return "an object";
    case FocusState::Person: return "a person";
  }
  return "?";
}

}  // namespace

ValidationReport validate(const Plan& plan, const SchemaRegistry& registry) {
  ValidationReport report;
  AbstractRegisters regs;

  auto error = [&](std::size_t step, RuleCode code, std::string message) {
    report.errors.push_back({step, code, std::move(message)});
  };

  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const ActionCall& call = plan.steps[i];
    const ActionSchema* schema = registry.find(call.name);
    if (!schema) {
      error(i, RuleCode::UnknownAction, "unknown action '" + call.name + "'");
      continue;
    }
    const std::string& name = schema->canonical_name;
    if (call.args.size() != schema->arity()) {
      error(i, RuleCode::ArityMismatch,
            name + " takes " + std::to_string(schema->arity()) + " argument(s), got " +
                std::to_string(call.args.size()));
    }

    if (schema->reads.contains(Register::Held) && !regs.held) {
      error(i, held_rules().at(name), name + " needs a held object, but the gripper is empty");
    }
    if (schema->reads.contains(Register::Focus)) {
      const FocusRule& rule = focus_rules().at(name);
      if (regs.focus != rule.required) {
        error(i, rule.code,
              name + " needs focus on " + std::string(focus_name(rule.required)) + ", but focus is on " +
                  std::string(focus_name(regs.focus)));
      }
    }
    if (schema->reads.contains(Register::Answer) && !regs.answer) {
      error(i, RuleCode::AnswerWithoutSource, "Answer() has no stored answer to report");
    }
    if (schema->writes.contains(Register::Held) && regs.held) {
      error(i, RuleCode::DoubleHold, name + " while already holding an object");
    }

    // Effects apply even when the step was flagged.
    if (schema->clears.contains(Register::Focus)) regs.focus = FocusState::Unset;
    if (schema->clears.contains(Register::Held)) regs.held = false;
    if (schema->clears.contains(Register::Answer)) regs.answer = false;
    if (schema->writes.contains(Register::Focus)) {
      regs.focus = name == "Search_Person" ? FocusState::Person : FocusState::Object;
    }
    if (schema->writes.contains(Register::Held)) regs.held = true;
    if (schema->writes.contains(Register::Answer)) regs.answer = true;
  }
  return report;
}

}  // namespace homeplan
