#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "homeplan/perception.hpp"

using namespace homeplan;

namespace {

TagSet tags(std::initializer_list<const char*> t) { return TagSet(t.begin(), t.end()); }
bool matches(const TagSet& t, std::string_view q) { return match_description(t, DescQuery::parse(q)); }

WorldState two_apples() {
  return parse_scenario(R"({"rooms": ["kitchen"], "surfaces": {"counter": "kitchen"}, "objects": {
      "apple_g": {"name": "apple", "tags": ["green"], "place": {"on": "counter"}},
      "apple_r": {"name": "apple", "tags": ["red"], "place": {"on": "counter"}}}})")
      .world;
}

WorldState three_people() {
  return parse_scenario(R"({"rooms": ["hall"], "persons": {
      "p1": {"name": "Ana", "tags": ["sitting"], "room": "hall"},
      "p2": {"name": "Ben", "tags": ["sitting", "hat"], "room": "hall"},
      "p3": {"name": "Cy", "tags": ["standing"], "room": "hall"}}})")
      .world;
}

}  // namespace

TEST_CASE("description matching") {
  CHECK(matches(tags({"black", "t-shirt", "male"}), "wearing black t-shirt"));
  CHECK(matches(tags({"red", "dress"}), ""));
  CHECK(matches(tags({"holding", "cup"}), "holding a cup"));
  CHECK_FALSE(matches(tags({"black", "t-shirt"}), "wearing shoes"));
  CHECK(matches(tags({"black", "t-shirt"}), "  Wearing BLACK  t-shirt!"));
}

TEST_CASE("tokenizer keeps internal hyphens and drops stopwords in queries") {
  CHECK(tokenize("The t-shirt, -dash- x") == std::vector<std::string>{"the", "t-shirt", "dash", "x"});
  CHECK(DescQuery::parse("a person who is with someone wearing the people an").tokens.empty());
}

TEST_CASE("object search") {
  const auto sc = homeplan::testing::house();
  CHECK(find_objects(sc.world, "kitchen", "cereal", {}) == std::vector<Id>{"cereal_1"});
  CHECK(find_objects(sc.world, "bedroom", "apple", {}).empty());
  CHECK(find_objects(two_apples(), "kitchen", "", DescQuery::parse("red")) == std::vector<Id>{"apple_r"});
  CHECK(find_objects(two_apples(), "kitchen", "", {}) == std::vector<Id>{"apple_g", "apple_r"});
  // Objects inside containers are found through the container's surface.
  CHECK(find_objects(sc.world, "dining_room", "banana", {}) == std::vector<Id>{"banana_1"});
}

TEST_CASE("counting") {
  const auto w = three_people();
  CHECK(count_entities(w, "hall", CountTarget::person(), {}) == 3);
  CHECK(count_entities(w, "hall", CountTarget::person(), DescQuery::parse("sitting")) == 2);
  CHECK(count_entities(two_apples(), "kitchen", CountTarget::object("cup"), {}) == 0);
}

TEST_CASE("adding a query token never grows the match set") {
  const auto sc = homeplan::testing::house();
  const std::vector<std::string> words = {"red", "white", "black", "t-shirt", "sitting", "standing", "blue",
                                          "jacket", "green", "yellow", "box", "holding", "apple"};
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
  for (const auto& room : sc.world.rooms) {
    for (int i = 0; i < 200; ++i) {
      std::string q = words[pick(rng)];
      const std::string q2 = q + " " + words[pick(rng)];
      for (auto find : {find_objects, find_persons}) {
        const auto wide = find(sc.world, room, "", DescQuery::parse(q));
        const auto narrow = find(sc.world, room, "", DescQuery::parse(q2));
        CHECK(std::includes(wide.begin(), wide.end(), narrow.begin(), narrow.end()));
      }
      CHECK(count_entities(sc.world, room, CountTarget::object(""), DescQuery::parse(q)) ==
            find_objects(sc.world, room, "", DescQuery::parse(q)).size());
    }
  }
}

TEST_CASE("visual questions") {
  const auto w = two_apples();
  const EntityRef red{EntityRef::Kind::Object, "apple_r"};
  CHECK(vision_ask(w, "kitchen", red, "what color is the apple") == "red");
  CHECK(vision_ask(w, "kitchen", std::nullopt, "what color are the apples") == "green and red");
  CHECK(vision_ask(w, "kitchen", red, "is it raining") == "unknown");
  CHECK(vision_ask(w, "kitchen", red, "what posture") == "unknown");
  CHECK(vision_ask(w, "kitchen", std::nullopt, "how many apples") == "2");

  const auto sc = homeplan::testing::house();
  CHECK(vision_ask(sc.world, "living_room", std::nullopt, "how many cups on the table") == "2");
  CHECK(vision_ask(sc.world, "living_room", std::nullopt, "how many people are here") == "3");
  const EntityRef alex{EntityRef::Kind::Person, "person_alex"};
  CHECK(vision_ask(sc.world, "living_room", alex, "what clothing is the person wearing") == "jeans and t-shirt");
}

TEST_CASE("attribute registry file matches the built-in default") {
  CHECK(load_attributes(homeplan::testing::data_path("attributes.json")) == default_attributes());
}

TEST_CASE("answers from memory") {
  MemoryProfile m;
  m.entries = {{"name", "Lucio"},
               {"role", "household robot assistant"},
               {"origin", "South Korea"},
               {"capabilities", "moving to places and finding things"},
               {"favorite_color", "blue"}};
  const std::string who = respond_from_memory(m, "who are you");
  CHECK(who.find("Lucio") != std::string::npos);
  CHECK(who.find("household robot assistant") != std::string::npos);
  CHECK(respond_from_memory(m, "what can you do").find("moving to places and finding things") != std::string::npos);
  CHECK(respond_from_memory(m, "where are you from").find("South Korea") != std::string::npos);
  CHECK(respond_from_memory(m, "what is your favorite color?").find("blue") != std::string::npos);
  CHECK(respond_from_memory(m, "what is the weather") == kMemoryFallback);
  CHECK(respond_from_memory(m, "what are your achievements") == kMemoryFallback);
  CHECK(respond_from_memory({}, "who are you") == kMemoryFallback);
}
