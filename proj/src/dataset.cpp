#include "homeplan/dataset.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace homeplan {

using nlohmann::json;

FieldMapping FieldMapping::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError(DatasetError::Kind::Io, 0, "cannot open field mapping '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DatasetError(DatasetError::Kind::Io, 0, path.string() + ": malformed JSON: " + e.what());
  }
  FieldMapping m;
  auto take = [&](const char* key, std::string& slot) {
    if (doc.contains(key)) slot = doc[key].get<std::string>();
  };
  take("id", m.id);
  take("category", m.category);
  take("instruction", m.instruction);
  take("system", m.system);
  take("gold_plan", m.gold_plan);
  return m;
}

std::vector<DatasetRecord> parse_dataset(std::string_view jsonl, const FieldMapping& mapping,
                                         const std::string& source) {
  std::vector<DatasetRecord> records;
  std::set<std::string> ids;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= jsonl.size()) {
    auto nl = jsonl.find('\n', pos);
    std::string_view line = jsonl.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? jsonl.size() + 1 : nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    auto malformed = [&](const std::string& why) {
      return DatasetError(DatasetError::Kind::MalformedLine, line_no,
                          source + ":" + std::to_string(line_no) + ": " + why);
    };
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::parse_error& e) {
      throw malformed(std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) throw malformed("expected a JSON object");

    auto required = [&](const std::string& key) {
      if (!doc.contains(key) || !doc[key].is_string()) throw malformed("missing string field '" + key + "'");
      return doc[key].get<std::string>();
    };
    DatasetRecord rec;
    rec.id = required(mapping.id);
    rec.category = required(mapping.category);
    rec.instruction = required(mapping.instruction);
    rec.gold_plan = required(mapping.gold_plan);
    if (rec.id.empty()) throw malformed("empty id");
    if (rec.category.empty()) throw malformed("empty category");
    if (!ids.insert(rec.id).second) throw malformed("duplicate id '" + rec.id + "'");
    if (doc.contains(mapping.system) && doc[mapping.system].is_string()) rec.system = doc[mapping.system].get<std::string>();
    for (const auto& [key, value] : doc.items()) {
      if (key != mapping.id && key != mapping.category && key != mapping.instruction && key != mapping.gold_plan &&
          key != mapping.system) {
        rec.extra[key] = value;
      }
    }

    auto parsed = parse_plan(rec.gold_plan);
    if (!parsed.ok()) {
      std::string msg = source + ":" + std::to_string(line_no) + ": gold plan of '" + rec.id + "' does not parse:";
      for (const auto& e : parsed.errors) {
        auto lc = line_col(rec.gold_plan, e.span.begin);
        msg += " [" + std::string(to_string(e.kind)) + " at " + std::to_string(lc.line) + ":" +
               std::to_string(lc.column) + ": " + e.message + "]";
      }
      throw DatasetError(DatasetError::Kind::InvalidGoldPlan, line_no, msg);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<DatasetRecord> load_dataset(const std::filesystem::path& path, const FieldMapping& mapping) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError(DatasetError::Kind::Io, 0, "cannot open dataset '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_dataset(buf.str(), mapping, path.string());
}

std::vector<Shot> take_shots(const std::vector<DatasetRecord>& records, std::size_t k) {
  std::vector<Shot> shots;
  for (std::size_t i = 0; i < records.size() && i < k; ++i) {
    shots.push_back({records[i].instruction, records[i].gold_plan});
  }
  return shots;
}

}  // namespace homeplan
