#pragma once

// Household world model and its JSON file format.

#include <chrono>
#include <deque>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace homeplan {

using Id = std::string;
using TagSet = std::set<std::string>;

enum class DoorState { Open, Closed };

struct Door {
  Id room;
  DoorState state = DoorState::Closed;

  bool operator==(const Door&) const = default;
};

struct OnSurface {
  Id surface;
  bool operator==(const OnSurface&) const = default;
};
struct InsideObject {
  Id container;
  bool operator==(const InsideObject&) const = default;
};
struct HeldByPerson {
  Id person;
  bool operator==(const HeldByPerson&) const = default;
};
struct HeldByRobot {
  bool operator==(const HeldByRobot&) const = default;
};

using Place = std::variant<OnSurface, HeldByRobot, HeldByPerson, InsideObject>;

struct Object {
  std::string name;  // class label, e.g. "cereal"
  TagSet tags;
  Place place;

  bool operator==(const Object&) const = default;
};

struct Person {
  std::string name;
  TagSet tags;
  Id room;
  std::vector<Id> path;  // scripted rooms walked on Follow(); empty if none

  bool operator==(const Person&) const = default;
};

struct Clock {
  std::chrono::year_month_day date{std::chrono::year{2024}, std::chrono::month{1}, std::chrono::day{1}};
  std::chrono::minutes time_of_day{0};

  bool operator==(const Clock&) const = default;
};

/// "YYYY-MM-DD"
std::string format_date(std::chrono::year_month_day date);
/// "HH:MM", 24-hour
std::string format_time(std::chrono::minutes time_of_day);

struct WorldState {
  std::set<Id> rooms;
  std::map<Id, Id> surfaces;  // surface -> room
  std::map<Id, Door> doors;
  std::map<Id, Object> objects;
  std::map<Id, Person> persons;
  Clock clock;

  bool operator==(const WorldState&) const = default;
};

struct EntityRef {
  enum class Kind { Object, Person };
  Kind kind = Kind::Object;
  Id id;

  bool operator==(const EntityRef&) const = default;
};

struct MemoryProfile {
  std::map<std::string, std::string> entries;

  bool operator==(const MemoryProfile&) const = default;
};

struct RobotState {
  Id room;
  std::optional<Id> held;
  std::optional<EntityRef> focus;
  std::optional<std::string> answer;
  MemoryProfile memory;
  std::deque<std::string> request_queue;

  bool operator==(const RobotState&) const = default;
};

/// A world together with the robot placed in it, as stored in a world file.
struct Scenario {
  WorldState world;
  RobotState robot;
};

class WorldLoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads a world file. Every reference is resolved and checked; errors name
/// the offending field path and ids.
Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(std::string_view json_text);
WorldState load_world(const std::filesystem::path& path);

/// Referential integrity and robot/world consistency. Throws WorldLoadError.
void check_scenario(const Scenario& scenario);

/// Room an object is visibly located in, following Inside chains down to a
/// surface. Objects in a gripper or a person's hand are not visible.
std::optional<Id> visible_room(const WorldState& world, const Id& object_id);

/// The surface an object ultimately rests on, if any.
std::optional<Id> resting_surface(const WorldState& world, const Id& object_id);

/// Looks up an id exactly, then with case folded and spaces as underscores.
template <typename Map>
auto find_id(Map& map, std::string_view text) -> decltype(map.find(Id{})) {
  auto it = map.find(Id(text));
  if (it != map.end()) return it;
  Id norm;
  for (char c : text) {
    if (c == ' ') norm.push_back('_');
    else norm.push_back(static_cast<char>((c >= 'A' && c <= 'Z') ? c - 'A' + 'a' : c));
  }
  return map.find(norm);
}

std::string describe_place(const Place& place);

}  // namespace homeplan
