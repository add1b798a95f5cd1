#include "homeplan/perception.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include <json.hpp>

namespace homeplan {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  auto flush = [&] {
    auto b = cur.find_first_not_of('-');
    auto e = cur.find_last_not_of('-');
    if (b != std::string::npos) tokens.push_back(cur.substr(b, e - b + 1));
    cur.clear();
  };
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (c >= 'A' && c <= 'Z') cur.push_back(static_cast<char>(c - 'A' + 'a'));
    else if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c >= 0x80) cur.push_back(ch);
    else flush();
  }
  flush();
  return tokens;
}

DescQuery DescQuery::parse(std::string_view raw) {
  DescQuery q;
  q.raw = std::string(raw);
  for (auto& tok : tokenize(raw)) {
    if (std::find(std::begin(kStopwords), std::end(kStopwords), tok) == std::end(kStopwords)) {
      q.tokens.insert(std::move(tok));
    }
  }
  return q;
}

bool match_description(const TagSet& tags, const DescQuery& query) {
  return std::includes(tags.begin(), tags.end(), query.tokens.begin(), query.tokens.end());
}

TagSet person_tags(const WorldState& world, const Id& person_id) {
  auto it = world.persons.find(person_id);
  if (it == world.persons.end()) return {};
  TagSet tags = it->second.tags;
  for (const auto& [id, obj] : world.objects) {
    if (auto* hp = std::get_if<HeldByPerson>(&obj.place); hp && hp->person == person_id) {
      tags.insert("holding");
      tags.insert(obj.name);
    }
  }
  return tags;
}

namespace {

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

}  // namespace

std::vector<Id> find_objects(const WorldState& world, const Id& room, std::string_view name, const DescQuery& query) {
  std::vector<Id> out;
  for (const auto& [id, obj] : world.objects) {
    if (!name.empty() && !iequals(obj.name, name)) continue;
    if (visible_room(world, id) != room) continue;
    if (!match_description(obj.tags, query)) continue;
    out.push_back(id);
  }
  return out;
}

std::vector<Id> find_persons(const WorldState& world, const Id& room, std::string_view name, const DescQuery& query) {
  std::vector<Id> out;
  for (const auto& [id, person] : world.persons) {
    if (person.room != room) continue;
    if (!name.empty() && !iequals(person.name, name)) continue;
    if (!match_description(person_tags(world, id), query)) continue;
    out.push_back(id);
  }
  return out;
}

std::size_t count_entities(const WorldState& world, const Id& room, const CountTarget& target, const DescQuery& query) {
  if (target.kind == CountTarget::Kind::Person) return find_persons(world, room, target.name, query).size();
  return find_objects(world, room, target.name, query).size();
}

const AttributeRegistry& default_attributes() {
  // Mirrors data/attributes.json.
  static const AttributeRegistry registry{{
      {"color",
       {"black", "blue", "brown", "gray", "green", "orange", "pink", "purple", "red", "white", "yellow"}},
      {"clothing",
       {"apron", "coat", "dress", "hat", "hoodie", "jacket", "jeans", "shirt", "shoes", "shorts", "skirt", "suit",
        "sweater", "t-shirt", "uniform"}},
      {"posture", {"lying", "sitting", "standing", "waving", "walking"}},
  }};
  return registry;
}

AttributeRegistry load_attributes(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open attribute file '" + path.string() + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(path.string() + ": malformed JSON: " + e.what());
  }
  if (!doc.is_object()) throw std::runtime_error(path.string() + ": expected an object of category -> tokens");
  AttributeRegistry reg;
  for (const auto& [category, tokens] : doc.items()) {
    if (!tokens.is_array()) throw std::runtime_error(path.string() + ": " + category + ": expected an array");
    TagSet set;
    for (const auto& t : tokens) {
      if (!t.is_string()) throw std::runtime_error(path.string() + ": " + category + ": expected strings");
      set.insert(t.get<std::string>());
    }
    reg.categories[category] = std::move(set);
  }
  return reg;
}

namespace {

TagSet scene_tags(const WorldState& world, const Id& room) {
  TagSet tags;
  for (const auto& id : find_objects(world, room, "", {})) {
    const auto& t = world.objects.at(id).tags;
    tags.insert(t.begin(), t.end());
  }
  for (const auto& id : find_persons(world, room, "", {})) {
    auto t = person_tags(world, id);
    tags.insert(t.begin(), t.end());
  }
  return tags;
}

TagSet target_tags(const WorldState& world, const Id& room, const std::optional<EntityRef>& focus) {
  if (!focus) return scene_tags(world, room);
  if (focus->kind == EntityRef::Kind::Person) return person_tags(world, focus->id);
  auto it = world.objects.find(focus->id);
  return it == world.objects.end() ? TagSet{} : it->second.tags;
}

// "cups" -> "cup", "glasses" -> "glass": the first form that names a known
// object class wins; otherwise the word minus a trailing 's'.
std::string object_class(const WorldState& world, const std::string& word) {
  std::vector<std::string> forms{word};
  if (word.size() > 2 && word.ends_with("es")) forms.push_back(word.substr(0, word.size() - 2));
  if (word.size() > 1 && word.ends_with('s')) forms.push_back(word.substr(0, word.size() - 1));
  for (const auto& f : forms) {
    for (const auto& [id, obj] : world.objects) {
      if (obj.name == f) return f;
    }
  }
  return forms.back();
}

}  // namespace

std::string vision_ask(const WorldState& world, const Id& room, const std::optional<EntityRef>& focus,
                       std::string_view question, const AttributeRegistry& attributes) {
  const auto tokens = tokenize(question);
  if (tokens.size() >= 2 && tokens[0] == "what") {
    for (std::size_t i = 1; i < tokens.size(); ++i) {
      auto cat = attributes.categories.find(tokens[i]);
      if (cat == attributes.categories.end()) continue;
      TagSet tags = target_tags(world, room, focus);
      std::string answer;
      for (const auto& tag : tags) {
        if (!cat->second.contains(tag)) continue;
        if (!answer.empty()) answer += " and ";
        answer += tag;
      }
      return answer.empty() ? std::string(kUnknownAnswer) : answer;
    }
    return std::string(kUnknownAnswer);
  }
  if (tokens.size() >= 3 && tokens[0] == "how" && tokens[1] == "many") {
    const std::string& word = tokens[2];
    std::size_t n = 0;
    if (word == "people" || word == "persons" || word == "person") {
      n = count_entities(world, room, CountTarget::person(), {});
    } else {
      n = count_entities(world, room, CountTarget::object(object_class(world, word)), {});
    }
    return std::to_string(n);
  }
  return std::string(kUnknownAnswer);
}

namespace {

const std::map<std::string, std::string>& topic_synonyms() {
  static const std::map<std::string, std::string> synonyms = {
      {"who", "name"},
      {"name", "name"},
      {"called", "name"},
      {"role", "role"},
      {"job", "role"},
      {"from", "origin"},
      {"country", "origin"},
      {"originate", "origin"},
      {"origin", "origin"},
      {"do", "capabilities"},
      {"abilities", "capabilities"},
      {"skills", "capabilities"},
      {"capabilities", "capabilities"},
      {"achievements", "achievements"},
      {"achievement", "achievements"},
      {"accomplishments", "achievements"},
      {"color", "favorite_color"},
      {"colour", "favorite_color"},
      {"favorite", "favorite_color"},
  };
  return synonyms;
}

constexpr std::string_view kTopicPriority[] = {"name",         "role",          "origin", "capabilities",
                                               "achievements", "favorite_color"};

std::string render_topic(const MemoryProfile& memory, const std::string& topic) {
  const std::string& v = memory.entries.at(topic);
  if (topic == "name") {
    auto role = memory.entries.find("role");
    return role == memory.entries.end() ? "I am " + v + "." : "I am " + v + ", a " + role->second + ".";
  }
  if (topic == "role") return "I am a " + v + ".";
  if (topic == "origin") return "I originate from " + v + ".";
  if (topic == "capabilities") return "I can help you with " + v + ".";
  if (topic == "achievements") return "My achievements include " + v + ".";
  if (topic == "favorite_color") return "My favorite color is " + v + ".";
  std::string label = topic;
  std::replace(label.begin(), label.end(), '_', ' ');
  return "My " + label + " is " + v + ".";
}

}  // namespace

std::string respond_from_memory(const MemoryProfile& memory, std::string_view request) {
  std::set<std::string> matched;
  for (const auto& tok : tokenize(request)) {
    if (memory.entries.contains(tok)) matched.insert(tok);
    auto syn = topic_synonyms().find(tok);
    if (syn != topic_synonyms().end() && memory.entries.contains(syn->second)) matched.insert(syn->second);
  }
  if (matched.empty()) return std::string(kMemoryFallback);
  for (auto topic : kTopicPriority) {
    if (matched.contains(std::string(topic))) return render_topic(memory, std::string(topic));
  }
  return render_topic(memory, *matched.begin());
}

}  // namespace homeplan
