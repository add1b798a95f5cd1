#pragma once

// Deterministic stand-ins for the vision and detection models: description
// matching, object/person search, counting, visual questions, and answers
// grounded in the robot's memory.

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "homeplan/world.hpp"

namespace homeplan {

/// Words dropped from descriptions before matching.
inline constexpr std::string_view kStopwords[] = {"a",    "an",   "the",    "is",     "who",
                                                  "with", "wearing", "person", "people", "someone"};

/// Lowercases, strips punctuation (internal hyphens survive, so "t-shirt"
/// stays one token) and splits on whitespace. No stopword removal.
std::vector<std::string> tokenize(std::string_view text);

struct DescQuery {
  std::string raw;
  TagSet tokens;

  static DescQuery parse(std::string_view raw);
  bool matches_all() const { return tokens.empty(); }
};

/// True iff every query token is one of the entity's tags.
bool match_description(const TagSet& tags, const DescQuery& query);

/// A person's tags plus {holding, <name>} for each object in their hands.
TagSet person_tags(const WorldState& world, const Id& person_id);

/// Objects visibly located in `room` (through surfaces and containers),
/// filtered by class label when `name` is non-empty, sorted by id.
std::vector<Id> find_objects(const WorldState& world, const Id& room, std::string_view name, const DescQuery& query);

/// Persons in `room`, filtered by name when non-empty, sorted by id.
std::vector<Id> find_persons(const WorldState& world, const Id& room, std::string_view name, const DescQuery& query);

struct CountTarget {
  enum class Kind { Object, Person };
  Kind kind = Kind::Person;
  std::string name;  // object class label, or person name filter; may be empty

  static CountTarget object(std::string name) { return {Kind::Object, std::move(name)}; }
  static CountTarget person() { return {Kind::Person, {}}; }
};

std::size_t count_entities(const WorldState& world, const Id& room, const CountTarget& target, const DescQuery& query);

/// Attribute categories the visual-question oracle knows ("color" -> {red, ...}).
struct AttributeRegistry {
  std::map<std::string, TagSet> categories;

  bool operator==(const AttributeRegistry&) const = default;
};

const AttributeRegistry& default_attributes();
AttributeRegistry load_attributes(const std::filesystem::path& path);

/// Answers "what <category> ..." from the focused entity's tags (or from the
/// whole room when nothing is focused) and "how many <name> ..." by counting
/// in `room`. Anything else is "unknown".
std::string vision_ask(const WorldState& world, const Id& room, const std::optional<EntityRef>& focus,
                       std::string_view question, const AttributeRegistry& attributes = default_attributes());

inline constexpr std::string_view kUnknownAnswer = "unknown";
inline constexpr std::string_view kMemoryFallback = "I'm not sure about that.";

/// Routes the request to one memory topic and renders it as a sentence.
std::string respond_from_memory(const MemoryProfile& memory, std::string_view request);

}  // namespace homeplan
