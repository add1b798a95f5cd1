#include <doctest.h>

#include <set>

#include "fixtures.hpp"
#include "homeplan/dataset.hpp"
#include "homeplan/validator.hpp"

using namespace homeplan;

namespace {

ValidationReport check(std::string_view text) {
  auto r = parse_plan(text);
  REQUIRE(r.ok());
  return validate(r.plan);
}

std::vector<std::pair<std::size_t, RuleCode>> codes(const ValidationReport& rep) {
  std::vector<std::pair<std::size_t, RuleCode>> out;
  for (const auto& f : rep.errors) out.emplace_back(f.step, f.code);
  return out;
}

using Codes = std::vector<std::pair<std::size_t, RuleCode>>;

}  // namespace

TEST_CASE("registry holds the 21 actions with their arities") {
  const auto& reg = schema_registry();
  REQUIRE(reg.size() == 21);
  const std::map<std::string, std::size_t> expected = {
      {"Respond", 1},       {"Move_To", 1},      {"Pour_In", 1},       {"Search_Object", 2}, {"Search_Person", 2},
      {"Pickup", 0},        {"Place_On", 1},     {"Place_Next", 1},    {"Give_To", 0},       {"Open", 1},
      {"Close", 1},         {"Vision_Ask", 1},   {"Answer", 0},        {"Follow", 0},        {"New_Request", 0},
      {"Count_Person", 1},  {"Count_Object", 2}, {"Ask_Name", 0},      {"What_Time", 0},     {"What_Day", 0},
      {"What_Tomorrow", 0}};
  std::set<std::string> lowered;
  for (const auto& s : reg.all()) {
    REQUIRE(expected.contains(s.canonical_name));
    CHECK(s.arity() == expected.at(s.canonical_name));
    CHECK(s.arg_kinds().size() == s.arity());
    lowered.insert(ascii_lower(s.canonical_name));
  }
  CHECK(lowered.size() == 21);
}

TEST_CASE("register effects of selected actions") {
  const auto& reg = schema_registry();
  const auto* pickup = reg.find("Pickup");
  REQUIRE(pickup);
  CHECK(pickup->arity() == 0);
  CHECK(pickup->reads == RegisterSet{Register::Focus});
  CHECK(pickup->writes == RegisterSet{Register::Held});

  const auto* sp = reg.find("search_person");
  REQUIRE(sp);
  CHECK(sp->arg_kinds() == std::vector{ArgKind::ObjectName, ArgKind::PersonDesc});
  CHECK(sp->writes == RegisterSet{Register::Focus});

  const auto* time = reg.find("WHAT_TIME");
  REQUIRE(time);
  CHECK(time->writes == RegisterSet{Register::Answer});
  CHECK(time->reads.empty());

  CHECK(reg.find("Give_To")->reads == RegisterSet{Register::Held, Register::Focus});
  CHECK(reg.find("Give_To")->clears == RegisterSet{Register::Held});
  CHECK(reg.find("Move_To")->clears == RegisterSet{Register::Focus});
  for (const char* n : {"Respond", "Open", "Close"}) {
    const auto* s = reg.find(n);
    CHECK((s->reads.empty() && s->writes.empty() && s->clears.empty()));
  }
  CHECK(reg.find("Count_Object")->arg_kinds() == std::vector{ArgKind::ObjectName, ArgKind::VlmQuery});
  CHECK(reg.find("Vision_Ask")->arg_kinds() == std::vector{ArgKind::VlmQuery});
  CHECK(reg.find("Fly_To") == nullptr);
}

TEST_CASE("schema JSON export lists every action") {
  const auto doc = nlohmann::json::parse(schema_registry().to_json());
  REQUIRE(doc["actions"].is_array());
  CHECK(doc["actions"].size() == 21);
  CHECK(doc["actions"][0]["name"] == "Respond");
  CHECK(doc["actions"][3]["signature"] == "Search_Object(name, desc)");
}

TEST_CASE("rule examples") {
  CHECK(codes(check("Pickup()")) == Codes{{0, RuleCode::PickupWithoutFocus}});
  CHECK(check("Move_To('kitchen'), Search_Object('cereal',''), Pickup(), Place_On('table')").statically_valid());
  CHECK(codes(check("Answer()")) == Codes{{0, RuleCode::AnswerWithoutSource}});
  CHECK(codes(check("Search_Object('apple',''), Pickup(), Pickup()")) == Codes{{2, RuleCode::DoubleHold}});
}

TEST_CASE("each rule code fires") {
  CHECK(codes(check("Fly_To('moon')")) == Codes{{0, RuleCode::UnknownAction}});
  CHECK(codes(check("Move_To()")) == Codes{{0, RuleCode::ArityMismatch}});
  CHECK(codes(check("Place_On('table')")) == Codes{{0, RuleCode::PlaceWithoutHeld}});
  CHECK(codes(check("Place_Next('cup')")) == Codes{{0, RuleCode::PlaceWithoutHeld}});
  CHECK(codes(check("Pour_In('bowl')")) == Codes{{0, RuleCode::PourWithoutHeld}});
  CHECK(codes(check("Search_Person('', ''), Give_To()")) == Codes{{1, RuleCode::GiveWithoutHeld}});
  CHECK(codes(check("Search_Object('a',''), Pickup(), Give_To()")) == Codes{{2, RuleCode::GiveWithoutFocus}});
  CHECK(codes(check("Follow()")) == Codes{{0, RuleCode::FollowWithoutFocus}});
  CHECK(codes(check("Ask_Name()")) == Codes{{0, RuleCode::AskNameWithoutFocus}});
  CHECK(codes(check("Search_Person('', ''), Pickup()")) == Codes{{1, RuleCode::PickupWithoutFocus}});
}

TEST_CASE("dataflow through clears and resets") {
  CHECK(codes(check("Search_Object('a',''), Move_To('kitchen'), Pickup()")) ==
        Codes{{2, RuleCode::PickupWithoutFocus}});
  CHECK(codes(check("What_Time(), New_Request(), Answer()")) == Codes{{2, RuleCode::AnswerWithoutSource}});
  CHECK(check("What_Time(), Move_To('kitchen'), Answer(), Answer()").statically_valid());
  CHECK(check("Search_Person('Sam',''), Follow(), Follow(), Ask_Name(), Answer()").statically_valid());
  CHECK(codes(check("Search_Object('a',''), Pickup(), Place_On('t'), Place_On('t')")) ==
        Codes{{3, RuleCode::PlaceWithoutHeld}});
  // Held survives New_Request: the object is still in the gripper.
  CHECK(check("Search_Object('a',''), Pickup(), New_Request(), Place_On('t')").statically_valid());
}

TEST_CASE("findings follow step order and keep going after an error") {
  // A flagged step still applies its effects, so the bad Pickup counts as
  // holding something and Give_To only misses its recipient.
  const auto rep = check("Answer(), Pickup(), Fly_To(), Give_To()");
  CHECK(codes(rep) == Codes{{0, RuleCode::AnswerWithoutSource},
                            {1, RuleCode::PickupWithoutFocus},
                            {2, RuleCode::UnknownAction},
                            {3, RuleCode::GiveWithoutFocus}});
}

TEST_CASE("statically valid is not sufficient") {
  // Passes the static checks, but there is no pizza in the house.
  CHECK(check("Move_To('kitchen'), Search_Object('pizza', ''), Pickup()").statically_valid());
}

TEST_CASE("every bundled gold plan validates cleanly") {
  for (const char* file : {"dataset.jsonl", "shots.jsonl"}) {
    for (const auto& rec : load_dataset(homeplan::testing::data_path(file))) {
      const auto rep = validate(parse_plan(rec.gold_plan).plan);
      CHECK_MESSAGE(rep.statically_valid(), rec.id);
    }
  }
}
