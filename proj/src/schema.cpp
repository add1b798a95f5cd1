#include "homeplan/schema.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include <json.hpp>

namespace homeplan {

std::string_view to_string(ArgKind kind) {
  switch (kind) {
    case ArgKind::Literal: return "Literal";
    case ArgKind::LocationName: return "LocationName";
    case ArgKind::ObjectName: return "ObjectName";
    case ArgKind::PersonDesc: return "PersonDesc";
    case ArgKind::VlmQuery: return "VlmQuery";
  }
  return "?";
}

std::string_view to_string(Register r) {
  switch (r) {
    case Register::Focus: return "Focus";
    case Register::Held: return "Held";
    case Register::Answer: return "Answer";
  }
  return "?";
}

std::vector<std::string_view> RegisterSet::names() const {
  std::vector<std::string_view> out;
  for (Register r : {Register::Focus, Register::Held, Register::Answer}) {
    if (contains(r)) out.push_back(to_string(r));
  }
  return out;
}

std::vector<ArgKind> ActionSchema::arg_kinds() const {
  std::vector<ArgKind> kinds;
  kinds.reserve(params.size());
  for (const auto& p : params) kinds.push_back(p.kind);
  return kinds;
}

std::string ActionSchema::signature() const {
  std::string out = canonical_name + "(";
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) out += ", ";
    out += params[i].name;
  }
  out += ")";
  return out;
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

SchemaRegistry::SchemaRegistry(std::vector<ActionSchema> schemas) : schemas_(std::move(schemas)) {
  for (std::size_t i = 0; i < schemas_.size(); ++i) {
    for (std::size_t j = i + 1; j < schemas_.size(); ++j) {
      if (ascii_lower(schemas_[i].canonical_name) == ascii_lower(schemas_[j].canonical_name)) {
        throw std::invalid_argument("duplicate action name: " + schemas_[j].canonical_name);
      }
    }
  }
}

const ActionSchema* SchemaRegistry::find(std::string_view name) const {
  auto it = std::find_if(schemas_.begin(), schemas_.end(), [&](const ActionSchema& s) {
    return s.canonical_name.size() == name.size() &&
           std::equal(name.begin(), name.end(), s.canonical_name.begin(), [](char a, char b) {
             return std::tolower(static_cast<unsigned char>(a)) ==
                    std::tolower(static_cast<unsigned char>(b));
           });
  });
  return it == schemas_.end() ? nullptr : &*it;
}

std::string SchemaRegistry::to_json() const {
  nlohmann::ordered_json actions = nlohmann::ordered_json::array();
  for (const auto& s : schemas_) {
    nlohmann::ordered_json params = nlohmann::ordered_json::array();
    for (const auto& p : s.params) {
      params.push_back({{"name", p.name}, {"kind", std::string(to_string(p.kind))}});
    }
    auto regs = [](RegisterSet set) {
      nlohmann::ordered_json arr = nlohmann::ordered_json::array();
      for (auto n : set.names()) arr.push_back(std::string(n));
      return arr;
    };
    actions.push_back({{"name", s.canonical_name},
                       {"signature", s.signature()},
                       {"description", s.description},
                       {"arity", s.arity()},
                       {"params", params},
                       {"reads", regs(s.reads)},
                       {"writes", regs(s.writes)},
                       {"clears", regs(s.clears)}});
  }
  nlohmann::ordered_json doc = {{"actions", actions}};
  return doc.dump(2) + "\n";
}

namespace {

using enum ArgKind;
using enum Register;

std::vector<ActionSchema> builtin_schemas() {
  // Table order matters: prompts and the JSON export list actions in this order.
  return {
      {"Respond", {{"request", Literal}}, "Respond to the user", {}, {}, {}},
      {"Move_To", {{"location", LocationName}}, "Move to a location", {}, {}, {Focus}},
      {"Pour_In", {{"object", Literal}}, "Pour the held object into a container", {Held}, {}, {Held}},
      {"Search_Object",
       {{"name", ObjectName}, {"desc", VlmQuery}},
       "Search for an object",
       {},
       {Focus},
       {}},
      {"Search_Person",
       {{"name", ObjectName}, {"desc", PersonDesc}},
       "Search for a person",
       {},
       {Focus},
       {}},
      {"Pickup", {}, "Pick up the focused object", {Focus}, {Held}, {}},
      {"Place_On", {{"placement", LocationName}}, "Place the held object on a placement", {Held}, {}, {Held}},
      {"Place_Next", {{"object", Literal}}, "Place the held object next to an object", {Held}, {}, {Held}},
      {"Give_To", {}, "Give the held object to the focused person", {Held, Focus}, {}, {Held}},
      {"Open", {{"object", Literal}}, "Open a door", {}, {}, {}},
      {"Close", {{"object", Literal}}, "Close a door", {}, {}, {}},
      {"Vision_Ask", {{"question", VlmQuery}}, "Ask the vision model; result goes to Answer()", {}, {Answer}, {}},
      {"Answer", {}, "Say the stored answer", {Answer}, {}, {}},
      {"Follow", {}, "Follow the focused person", {Focus}, {}, {}},
      {"New_Request", {}, "Take a new request", {}, {}, {Focus, Answer}},
      {"Count_Person", {{"desc", PersonDesc}}, "Count people; result goes to Answer()", {}, {Answer}, {}},
      {"Count_Object",
       {{"name", ObjectName}, {"desc", VlmQuery}},
       "Count objects; result goes to Answer()",
       {},
       {Answer},
       {}},
      {"Ask_Name", {}, "Ask the focused person's name; result goes to Answer()", {Focus}, {Answer}, {}},
      {"What_Time", {}, "Retrieve the time", {}, {Answer}, {}},
      {"What_Day", {}, "Retrieve the date", {}, {Answer}, {}},
      {"What_Tomorrow", {}, "Retrieve tomorrow's date", {}, {Answer}, {}},
  };
}

}  // namespace

const SchemaRegistry& schema_registry() {
  static const SchemaRegistry registry(builtin_schemas());
  return registry;
}

}  // namespace homeplan
