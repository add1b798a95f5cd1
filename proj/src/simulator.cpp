#include "homeplan/simulator.hpp"

#include <functional>
#include <map>
#include <sstream>

namespace homeplan {

std::string_view to_string(FailCode code) {
  switch (code) {
    case FailCode::UnknownAction: return "UnknownAction";
    case FailCode::ArityMismatch: return "ArityMismatch";
    case FailCode::UnknownLocation: return "UnknownLocation";
    case FailCode::NotFound: return "NotFound";
    case FailCode::NoFocus: return "NoFocus";
    case FailCode::HandFull: return "HandFull";
    case FailCode::FocusNotObject: return "FocusNotObject";
    case FailCode::NoHeld: return "NoHeld";
    case FailCode::UnknownSurface: return "UnknownSurface";
    case FailCode::UnknownDoor: return "UnknownDoor";
    case FailCode::AlreadyInState: return "AlreadyInState";
    case FailCode::NoAnswer: return "NoAnswer";
    case FailCode::NoPath: return "NoPath";
    case FailCode::EmptyQueue: return "EmptyQueue";
  }
  return "?";
}

bool is_static_failure(FailCode code) {
  switch (code) {
    case FailCode::UnknownAction:
    case FailCode::ArityMismatch:
    case FailCode::NoFocus:
    case FailCode::HandFull:
    case FailCode::FocusNotObject:
    case FailCode::NoHeld:
    case FailCode::NoAnswer:
      return true;
    default:
      return false;
  }
}

namespace {

struct Step {
  WorldState& world;
  RobotState& robot;
  const ActionCall& call;
  const SimContext& ctx;
  StepOutcome& out;

  const std::string& arg(std::size_t i) const { return call.args[i]; }

  void fail(FailCode code, std::string why) {
    out.failure = code;
    out.state_delta = std::move(why);
  }

  const Person* focused_person() const {
    if (!robot.focus || robot.focus->kind != EntityRef::Kind::Person) return nullptr;
    auto it = world.persons.find(robot.focus->id);
    return it == world.persons.end() ? nullptr : &it->second;
  }
};

using Handler = std::function<void(Step&)>;

void move_to(Step& s) {
  auto room = find_id(s.world.rooms, s.arg(0));
  if (room == s.world.rooms.end()) return s.fail(FailCode::UnknownLocation, "no room named '" + s.arg(0) + "'");
  std::string from = s.robot.room;
  s.robot.room = *room;
  s.robot.focus.reset();
  s.out.state_delta = "robot " + from + " -> " + *room + "; focus cleared";
}

void search_object(Step& s) {
  auto hits = find_objects(s.world, s.robot.room, s.arg(0), DescQuery::parse(s.arg(1)));
  if (hits.empty()) return s.fail(FailCode::NotFound, "no matching object in " + s.robot.room);
  s.robot.focus = EntityRef{EntityRef::Kind::Object, hits.front()};
  s.out.state_delta = "focus -> object " + hits.front();
}

void search_person(Step& s) {
  auto hits = find_persons(s.world, s.robot.room, s.arg(0), DescQuery::parse(s.arg(1)));
  if (hits.empty()) return s.fail(FailCode::NotFound, "no matching person in " + s.robot.room);
  s.robot.focus = EntityRef{EntityRef::Kind::Person, hits.front()};
  s.out.state_delta = "focus -> person " + hits.front();
}

void pickup(Step& s) {
  if (!s.robot.focus) return s.fail(FailCode::NoFocus, "nothing is focused");
  if (s.robot.held) return s.fail(FailCode::HandFull, "already holding " + *s.robot.held);
  if (s.robot.focus->kind != EntityRef::Kind::Object) return s.fail(FailCode::FocusNotObject, "focus is a person");
  const Id id = s.robot.focus->id;
  s.world.objects.at(id).place = HeldByRobot{};
  s.robot.held = id;
  s.out.state_delta = "picked up " + id;
}

// Shared precondition for actions that release the held object.
bool need_held(Step& s) {
  if (s.robot.held) return true;
  s.fail(FailCode::NoHeld, "gripper is empty");
  return false;
}

void release(Step& s, Place place) {
  const Id id = *s.robot.held;
  s.world.objects.at(id).place = place;
  s.robot.held.reset();
  s.out.state_delta = id + " now " + describe_place(place);
}

void place_on(Step& s) {
  if (!need_held(s)) return;
  auto surface = find_id(s.world.surfaces, s.arg(0));
  if (surface == s.world.surfaces.end() || surface->second != s.robot.room) {
    return s.fail(FailCode::UnknownSurface, "no surface '" + s.arg(0) + "' in " + s.robot.room);
  }
  release(s, OnSurface{surface->first});
}

void place_next(Step& s) {
  if (!need_held(s)) return;
  auto hits = find_objects(s.world, s.robot.room, s.arg(0), {});
  std::optional<Id> surface;
  if (!hits.empty()) surface = resting_surface(s.world, hits.front());
  if (!surface) return s.fail(FailCode::NotFound, "no '" + s.arg(0) + "' visible in " + s.robot.room);
  release(s, OnSurface{*surface});
}

void give_to(Step& s) {
  if (!need_held(s)) return;
  if (!s.focused_person()) return s.fail(FailCode::NoFocus, "no person is focused");
  release(s, HeldByPerson{s.robot.focus->id});
}

void pour_in(Step& s) {
  if (!need_held(s)) return;
  auto hits = find_objects(s.world, s.robot.room, s.arg(0), {});
  if (hits.empty()) return s.fail(FailCode::NotFound, "no container '" + s.arg(0) + "' visible in " + s.robot.room);
  release(s, InsideObject{hits.front()});
}

void toggle_door(Step& s, DoorState target) {
  auto door = find_id(s.world.doors, s.arg(0));
  if (door == s.world.doors.end() || door->second.room != s.robot.room) {
    return s.fail(FailCode::UnknownDoor, "no door '" + s.arg(0) + "' in " + s.robot.room);
  }
  const char* word = target == DoorState::Open ? "open" : "closed";
  if (door->second.state == target) return s.fail(FailCode::AlreadyInState, door->first + " is already " + word);
  door->second.state = target;
  s.out.state_delta = door->first + " is now " + word;
}

void set_answer(Step& s, std::string answer) {
  s.out.state_delta = "answer = '" + answer + "'";
  s.robot.answer = std::move(answer);
}

void vision_ask_action(Step& s) {
  set_answer(s, vision_ask(s.world, s.robot.room, s.robot.focus, s.arg(0), *s.ctx.attributes));
}

void answer(Step& s) {
  if (!s.robot.answer) return s.fail(FailCode::NoAnswer, "no stored answer");
  s.out.utterance = *s.robot.answer;
  s.out.state_delta = "said the stored answer";
}

void respond(Step& s) {
  s.out.utterance = respond_from_memory(s.robot.memory, s.arg(0));
  s.out.state_delta = "responded";
}

void follow(Step& s) {
  const Person* person = s.focused_person();
  if (!person) return s.fail(FailCode::NoFocus, "no person is focused");
  if (person->path.empty()) return s.fail(FailCode::NoPath, s.robot.focus->id + " has no path to follow");
  Person& p = s.world.persons.at(s.robot.focus->id);
  std::string via;
  for (const auto& room : p.path) via += (via.empty() ? "" : ", ") + room;
  s.robot.room = p.path.back();
  p.room = p.path.back();
  p.path.clear();
  s.out.state_delta = "followed " + s.robot.focus->id + " through " + via;
}

void new_request(Step& s) {
  if (s.robot.request_queue.empty()) return s.fail(FailCode::EmptyQueue, "no pending requests");
  s.out.utterance = s.robot.request_queue.front();
  s.robot.request_queue.pop_front();
  s.robot.focus.reset();
  s.robot.answer.reset();
  s.out.state_delta = "took request; focus and answer cleared";
}

void count_person(Step& s) {
  auto n = count_entities(s.world, s.robot.room, CountTarget::person(), DescQuery::parse(s.arg(0)));
  set_answer(s, std::to_string(n));
}

void count_object(Step& s) {
  auto n = count_entities(s.world, s.robot.room, CountTarget::object(s.arg(0)), DescQuery::parse(s.arg(1)));
  set_answer(s, std::to_string(n));
}

void ask_name(Step& s) {
  const Person* person = s.focused_person();
  if (!person) return s.fail(FailCode::NoFocus, "no person is focused");
  set_answer(s, person->name);
}

const std::map<std::string, Handler>& handlers() {
  using std::chrono::days;
  using std::chrono::sys_days;
  static const std::map<std::string, Handler> table = {
      {"Respond", respond},
      {"Move_To", move_to},
      {"Pour_In", pour_in},
      {"Search_Object", search_object},
      {"Search_Person", search_person},
      {"Pickup", pickup},
      {"Place_On", place_on},
      {"Place_Next", place_next},
      {"Give_To", give_to},
      {"Open", [](Step& s) { toggle_door(s, DoorState::Open); }},
      {"Close", [](Step& s) { toggle_door(s, DoorState::Closed); }},
      {"Vision_Ask", vision_ask_action},
      {"Answer", answer},
      {"Follow", follow},
      {"New_Request", new_request},
      {"Count_Person", count_person},
      {"Count_Object", count_object},
      {"Ask_Name", ask_name},
      {"What_Time", [](Step& s) { set_answer(s, format_time(s.world.clock.time_of_day)); }},
      {"What_Day", [](Step& s) { set_answer(s, format_date(s.world.clock.date)); }},
      {"What_Tomorrow",
       [](Step& s) {
         set_answer(s, format_date(std::chrono::year_month_day{sys_days{s.world.clock.date} + days{1}}));
       }},
  };
  return table;
}

}  // namespace

StepOutcome execute_step(WorldState& world, RobotState& robot, const ActionCall& call, const SimContext& ctx) {
  StepOutcome out;
  out.action = call;
  const ActionSchema* schema = ctx.registry->find(call.name);
  if (!schema) {
    out.failure = FailCode::UnknownAction;
    out.state_delta = "unknown action '" + call.name + "'";
    return out;
  }
  if (call.args.size() != schema->arity()) {
    out.failure = FailCode::ArityMismatch;
    out.state_delta = schema->canonical_name + " takes " + std::to_string(schema->arity()) + " argument(s)";
    return out;
  }
  auto handler = handlers().find(schema->canonical_name);
  if (handler == handlers().end()) {
    out.failure = FailCode::UnknownAction;
    out.state_delta = "no behavior bound to " + schema->canonical_name;
    return out;
  }
  Step step{world, robot, call, ctx, out};
  handler->second(step);
  return out;
}

ExecutionResult execute_plan(WorldState world, RobotState robot, const Plan& plan, const SimContext& ctx) {
  ExecutionResult result{std::move(world), std::move(robot), {}};
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    result.trace.steps.push_back(execute_step(result.world, result.robot, plan.steps[i], ctx));
    if (!result.trace.steps.back().ok()) {
      result.trace.halted_at = i;
      break;
    }
  }
  return result;
}

std::string summarize(const WorldState& world, const RobotState& robot) {
  std::ostringstream os;
  os << "robot: room=" << robot.room << " held=" << robot.held.value_or("-") << " focus=";
  if (robot.focus) {
    os << (robot.focus->kind == EntityRef::Kind::Object ? "object:" : "person:") << robot.focus->id;
  } else {
    os << "-";
  }
  os << " answer=" << (robot.answer ? "'" + *robot.answer + "'" : std::string("-")) << "\n";
  for (const auto& [id, obj] : world.objects) os << "  " << id << " (" << obj.name << ") " << describe_place(obj.place) << "\n";
  for (const auto& [id, p] : world.persons) os << "  " << id << " (" << p.name << ") in " << p.room << "\n";
  for (const auto& [id, d] : world.doors) {
    os << "  " << id << " " << (d.state == DoorState::Open ? "open" : "closed") << "\n";
  }
  return os.str();
}

}  // namespace homeplan
