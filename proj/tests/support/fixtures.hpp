#pragma once

// Helpers shared by the unit tests and the acceptance binary.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <random>
#include <string>
#include <vector>

#include "homeplan/plan.hpp"
#include "homeplan/schema.hpp"
#include "homeplan/world.hpp"

namespace homeplan::testing {

inline std::filesystem::path data_dir() { return HOMEPLAN_DATA_DIR; }
inline std::filesystem::path data_path(const std::string& rel) { return data_dir() / rel; }

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Scenario house() { return load_scenario(data_path("house.json")); }

/// Argument text that stresses quoting: quotes, backslashes, separators,
/// parentheses, non-ASCII, padding. No raw newlines, since a string may not
/// span lines, and never whitespace-only, since that normalizes to "".
inline std::string random_literal(std::mt19937_64& rng) {
  static const std::vector<std::string> pieces = {
      "kitchen", "cereal", "wearing black t-shirt", "it's", "a\\b", "(x)", ",", "caf\xC3\xA9",
      "\"quoted\"", " pad ", "Move_To('x')", "\\'", "50%", "t-shirt", "\t"};
  std::uniform_int_distribution<int> count(0, 3);
  std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
  std::string s;
  for (int i = count(rng); i > 0; --i) s += pieces[pick(rng)];
  if (!s.empty() && s.find_first_not_of(" \t\n\r") == std::string::npos) s = "x" + s;
  return s;
}

/// A plan whose calls use canonical names and correct arity.
inline Plan random_schema_plan(std::mt19937_64& rng, std::size_t max_steps = 8) {
  const auto all = schema_registry().all();
  std::uniform_int_distribution<std::size_t> len(0, max_steps);
  std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
  Plan plan;
  for (std::size_t i = len(rng); i > 0; --i) {
    const ActionSchema& s = all[pick(rng)];
    ActionCall call{s.canonical_name, {}, {}};
    for (std::size_t a = 0; a < s.arity(); ++a) call.args.push_back(random_literal(rng));
    plan.steps.push_back(std::move(call));
  }
  return plan;
}

/// A plan drawn from the vocabulary of data/house.json, so that steps
/// succeed often enough to reach deep states. A few calls use unknown names
/// or the wrong arity.
inline Plan random_world_plan(std::mt19937_64& rng, std::size_t max_steps = 10) {
  static const std::vector<std::string> rooms = {"kitchen", "living_room", "dining_room", "bedroom", "hallway",
                                                 "garage"};
  static const std::vector<std::string> objects = {"cereal", "apple", "cup", "bowl", "milk", "book", "banana",
                                                   "plate", "phone", "shoe", "pizza", ""};
  static const std::vector<std::string> descs = {"", "red", "green", "white", "yellow", "wearing black t-shirt",
                                                 "sitting", "standing", "holding apple", "blue jacket"};
  static const std::vector<std::string> names = {"", "", "Alex", "Maria", "Sam", "Jordan", "Nobody"};
  static const std::vector<std::string> surfaces = {"counter", "table", "dining_table", "nightstand",
                                                    "shoe_rack", "fridge_shelf", "roof"};
  static const std::vector<std::string> doors = {"fridge_door", "front_door", "bedroom_door", "window"};
  static const std::vector<std::string> questions = {"what color is it", "how many cups", "how many people",
                                                     "what clothing", "is it raining"};
  static const std::vector<std::string> requests = {"who are you", "what can you do", "what is the weather"};

  auto pick = [&](const std::vector<std::string>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
  };
  static const std::vector<std::string> actions = {
      "Move_To",      "Move_To",     "Search_Object", "Search_Object", "Search_Person", "Search_Person",
      "Pickup",       "Pickup",      "Place_On",      "Place_Next",    "Give_To",       "Pour_In",
      "Open",         "Close",       "Vision_Ask",    "Answer",        "Respond",       "Follow",
      "New_Request",  "Count_Person", "Count_Object", "Ask_Name",      "What_Time",     "What_Day",
      "What_Tomorrow", "Fly_To",     "pickup"};

  Plan plan;
  const std::size_t n = std::uniform_int_distribution<std::size_t>(0, max_steps)(rng);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string a = pick(actions);
    ActionCall c{a, {}, {}};
    if (a == "Move_To") c.args = {pick(rooms)};
    else if (a == "Search_Object" || a == "Count_Object") c.args = {pick(objects), pick(descs)};
    else if (a == "Search_Person") c.args = {pick(names), pick(descs)};
    else if (a == "Place_On") c.args = {pick(surfaces)};
    else if (a == "Place_Next" || a == "Pour_In") c.args = {pick(objects)};
    else if (a == "Open" || a == "Close") c.args = {pick(doors)};
    else if (a == "Vision_Ask") c.args = {pick(questions)};
    else if (a == "Respond") c.args = {pick(requests)};
    else if (a == "Count_Person") c.args = {pick(descs)};
    else if (a == "Fly_To") c.args = {"moon"};
    if (std::uniform_int_distribution<int>(0, 60)(rng) == 0) c.args.push_back("extra");
    plan.steps.push_back(std::move(c));
  }
  return plan;
}

}  // namespace homeplan::testing
