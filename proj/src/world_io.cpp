#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "homeplan/schema.hpp"
#include "homeplan/world.hpp"

namespace homeplan {

using nlohmann::json;

std::string format_date(std::chrono::year_month_day date) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buf;
}

std::string format_time(std::chrono::minutes time_of_day) {
  auto total = time_of_day.count();
  char buf[8];
  std::snprintf(buf, sizeof buf, "%02d:%02d", static_cast<int>(total / 60), static_cast<int>(total % 60));
  return buf;
}

std::string describe_place(const Place& place) {
  struct Visitor {
    std::string operator()(const OnSurface& p) const { return "on " + p.surface; }
    std::string operator()(const HeldByRobot&) const { return "in the robot's gripper"; }
    std::string operator()(const HeldByPerson& p) const { return "held by " + p.person; }
    std::string operator()(const InsideObject& p) const { return "inside " + p.container; }
  };
  return std::visit(Visitor{}, place);
}

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw WorldLoadError(where.empty() ? what : where + ": " + what);
}

std::string join(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

void allow_keys(const json& obj, const std::string& where, std::initializer_list<std::string_view> keys) {
  if (!obj.is_object()) fail(where, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (auto k : keys) known = known || k == key;
    if (!known) fail(join(where, key), "unknown key");
  }
}

std::string get_string(const json& v, const std::string& where) {
  if (!v.is_string()) fail(where, "expected a string");
  auto s = v.get<std::string>();
  if (s.empty()) fail(where, "must not be empty");
  return s;
}

std::vector<std::string> get_string_list(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(get_string(v[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

TagSet get_tags(const json& parent, const std::string& where) {
  TagSet tags;
  if (!parent.contains("tags")) return tags;
  for (const auto& t : get_string_list(parent["tags"], join(where, "tags"))) tags.insert(ascii_lower(t));
  return tags;
}

std::chrono::year_month_day parse_date(const std::string& s, const std::string& where) {
  int y = 0;
  unsigned m = 0, d = 0;
  char tail = 0;
  if (std::sscanf(s.c_str(), "%4d-%2u-%2u%c", &y, &m, &d, &tail) != 3 || s.size() != 10) {
    fail(where, "expected a date as YYYY-MM-DD, got '" + s + "'");
  }
  std::chrono::year_month_day date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!date.ok()) fail(where, "invalid calendar date '" + s + "'");
  return date;
}

std::chrono::minutes parse_time(const std::string& s, const std::string& where) {
  int h = -1, m = -1;
  char tail = 0;
  if (std::sscanf(s.c_str(), "%2d:%2d%c", &h, &m, &tail) != 2 || s.size() != 5 || h < 0 || h > 23 || m < 0 ||
      m > 59) {
    fail(where, "expected a time as HH:MM (24-hour), got '" + s + "'");
  }
  return std::chrono::minutes{h * 60 + m};
}

Place parse_place(const json& v, const std::string& where) {
  allow_keys(v, where, {"on", "inside", "held_by", "gripper"});
  if (v.size() != 1) fail(where, "expected exactly one of on, inside, held_by, gripper");
  if (v.contains("on")) return OnSurface{get_string(v["on"], join(where, "on"))};
  if (v.contains("inside")) return InsideObject{get_string(v["inside"], join(where, "inside"))};
  if (v.contains("held_by")) return HeldByPerson{get_string(v["held_by"], join(where, "held_by"))};
  if (!v["gripper"].is_boolean() || !v["gripper"].get<bool>()) fail(join(where, "gripper"), "must be true");
  return HeldByRobot{};
}

Scenario from_json(const json& doc) {
  allow_keys(doc, "", {"rooms", "surfaces", "doors", "objects", "persons", "clock", "robot"});
  Scenario sc;
  WorldState& w = sc.world;

  if (!doc.contains("rooms")) fail("rooms", "required key missing");
  auto rooms = get_string_list(doc["rooms"], "rooms");
  if (rooms.empty()) fail("rooms", "at least one room is required");
  for (const auto& r : rooms) {
    if (!w.rooms.insert(r).second) fail("rooms", "duplicate room '" + r + "'");
  }

  if (doc.contains("surfaces")) {
    const auto& s = doc["surfaces"];
    if (!s.is_object()) fail("surfaces", "expected an object mapping surface id to room id");
    for (const auto& [id, room] : s.items()) w.surfaces[id] = get_string(room, join("surfaces", id));
  }

  if (doc.contains("doors")) {
    const auto& d = doc["doors"];
    if (!d.is_object()) fail("doors", "expected an object");
    for (const auto& [id, v] : d.items()) {
      const std::string where = join("doors", id);
      allow_keys(v, where, {"room", "state"});
      if (!v.contains("room")) fail(join(where, "room"), "required key missing");
      Door door;
      door.room = get_string(v["room"], join(where, "room"));
      std::string state = v.contains("state") ? get_string(v["state"], join(where, "state")) : "closed";
      if (state == "open") door.state = DoorState::Open;
      else if (state == "closed") door.state = DoorState::Closed;
      else fail(join(where, "state"), "expected 'open' or 'closed', got '" + state + "'");
      w.doors[id] = door;
    }
  }

  if (doc.contains("objects")) {
    const auto& o = doc["objects"];
    if (!o.is_object()) fail("objects", "expected an object");
    for (const auto& [id, v] : o.items()) {
      const std::string where = join("objects", id);
      allow_keys(v, where, {"name", "tags", "place"});
      if (!v.contains("name")) fail(join(where, "name"), "required key missing");
      if (!v.contains("place")) fail(join(where, "place"), "required key missing");
      Object obj;
      obj.name = ascii_lower(get_string(v["name"], join(where, "name")));
      obj.tags = get_tags(v, where);
      obj.place = parse_place(v["place"], join(where, "place"));
      w.objects[id] = std::move(obj);
    }
  }

  if (doc.contains("persons")) {
    const auto& p = doc["persons"];
    if (!p.is_object()) fail("persons", "expected an object");
    for (const auto& [id, v] : p.items()) {
      const std::string where = join("persons", id);
      allow_keys(v, where, {"name", "tags", "room", "path"});
      if (!v.contains("name")) fail(join(where, "name"), "required key missing");
      if (!v.contains("room")) fail(join(where, "room"), "required key missing");
      Person person;
      person.name = get_string(v["name"], join(where, "name"));
      person.tags = get_tags(v, where);
      person.room = get_string(v["room"], join(where, "room"));
      if (v.contains("path")) person.path = get_string_list(v["path"], join(where, "path"));
      w.persons[id] = std::move(person);
    }
  }

  if (doc.contains("clock")) {
    const auto& c = doc["clock"];
    allow_keys(c, "clock", {"date", "time"});
    if (c.contains("date")) w.clock.date = parse_date(get_string(c["date"], "clock.date"), "clock.date");
    if (c.contains("time")) w.clock.time_of_day = parse_time(get_string(c["time"], "clock.time"), "clock.time");
  }

  RobotState& r = sc.robot;
  r.room = rooms.front();
  if (doc.contains("robot")) {
    const auto& rv = doc["robot"];
    allow_keys(rv, "robot", {"room", "held", "memory", "request_queue"});
    if (rv.contains("room")) r.room = get_string(rv["room"], "robot.room");
    if (rv.contains("held")) r.held = get_string(rv["held"], "robot.held");
    if (rv.contains("memory")) {
      const auto& m = rv["memory"];
      if (!m.is_object()) fail("robot.memory", "expected an object mapping topic to text");
      for (const auto& [key, value] : m.items()) {
        r.memory.entries[key] = get_string(value, join("robot.memory", key));
      }
    }
    if (rv.contains("request_queue")) {
      for (auto& q : get_string_list(rv["request_queue"], "robot.request_queue")) r.request_queue.push_back(q);
    }
  }

  check_scenario(sc);
  return sc;
}

}  // namespace

void check_scenario(const Scenario& sc) {
  const WorldState& w = sc.world;
  auto need_room = [&](const Id& room, const std::string& where) {
    if (!w.rooms.contains(room)) fail(where, "unknown room '" + room + "'");
  };

  for (const auto& [id, room] : w.surfaces) need_room(room, "surfaces." + id);
  for (const auto& [id, door] : w.doors) need_room(door.room, "doors." + id + ".room");
  for (const auto& [id, p] : w.persons) {
    need_room(p.room, "persons." + id + ".room");
    for (std::size_t i = 0; i < p.path.size(); ++i) {
      need_room(p.path[i], "persons." + id + ".path[" + std::to_string(i) + "]");
    }
  }

  std::optional<Id> in_gripper;
  for (const auto& [id, obj] : w.objects) {
    const std::string where = "objects." + id + ".place";
    if (auto* on = std::get_if<OnSurface>(&obj.place)) {
      if (!w.surfaces.contains(on->surface)) {
        fail(where + ".on", "object '" + id + "' is on unknown surface '" + on->surface + "'");
      }
    } else if (auto* in = std::get_if<InsideObject>(&obj.place)) {
      if (!w.objects.contains(in->container)) {
        fail(where + ".inside", "object '" + id + "' is inside unknown object '" + in->container + "'");
      }
    } else if (auto* hp = std::get_if<HeldByPerson>(&obj.place)) {
      if (!w.persons.contains(hp->person)) {
        fail(where + ".held_by", "object '" + id + "' is held by unknown person '" + hp->person + "'");
      }
    } else {
      if (in_gripper) fail(where, "objects '" + *in_gripper + "' and '" + id + "' are both in the gripper");
      in_gripper = id;
    }
  }

  // Containment must be acyclic: every Inside chain ends within |objects| hops.
  for (const auto& [id, obj] : w.objects) {
    const Place* place = &obj.place;
    std::size_t hops = 0;
    while (auto* in = std::get_if<InsideObject>(place)) {
      if (++hops > w.objects.size()) {
        fail("objects." + id + ".place", "containment cycle through '" + id + "' and '" + in->container + "'");
      }
      place = &w.objects.at(in->container).place;
    }
  }

  const RobotState& r = sc.robot;
  need_room(r.room, "robot.room");
  if (r.held != in_gripper) {
    if (r.held && !w.objects.contains(*r.held)) fail("robot.held", "unknown object '" + *r.held + "'");
    fail("robot.held", "robot.held ('" + r.held.value_or("") + "') must name the object placed in the gripper ('" +
                           in_gripper.value_or("") + "')");
  }
  for (const auto& [key, value] : r.memory.entries) {
    if (value.empty()) fail("robot.memory." + key, "must not be empty");
  }
}

Scenario parse_scenario(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw WorldLoadError(std::string("malformed JSON: ") + e.what());
  }
  return from_json(doc);
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw WorldLoadError("cannot open world file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_scenario(buf.str());
  } catch (const WorldLoadError& e) {
    throw WorldLoadError(path.string() + ": " + e.what());
  }
}

WorldState load_world(const std::filesystem::path& path) { return load_scenario(path).world; }

std::optional<Id> visible_room(const WorldState& world, const Id& object_id) {
  auto it = world.objects.find(object_id);
  std::size_t hops = 0;
  while (it != world.objects.end() && hops++ <= world.objects.size()) {
    const Place& place = it->second.place;
    if (auto* on = std::get_if<OnSurface>(&place)) {
      auto s = world.surfaces.find(on->surface);
      if (s == world.surfaces.end()) return std::nullopt;
      return s->second;
    }
    if (auto* in = std::get_if<InsideObject>(&place)) {
      it = world.objects.find(in->container);
      continue;
    }
    return std::nullopt;
  }
  return std::nullopt;
}

std::optional<Id> resting_surface(const WorldState& world, const Id& object_id) {
  auto it = world.objects.find(object_id);
  std::size_t hops = 0;
  while (it != world.objects.end() && hops++ <= world.objects.size()) {
    const Place& place = it->second.place;
    if (auto* on = std::get_if<OnSurface>(&place)) return on->surface;
    if (auto* in = std::get_if<InsideObject>(&place)) {
      it = world.objects.find(in->container);
      continue;
    }
    return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace homeplan
