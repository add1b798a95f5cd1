#pragma once

// JSON-Lines planning dataset: one record per line.
//
//   {"id": "...", "category": "Follow", "instruction": "...",
//    "system": "... (optional)", "gold_plan": "Move_To('kitchen')\n..."}
//
// Field names can be remapped with a FieldMapping for datasets that use
// different keys. Unknown fields are kept but ignored.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "homeplan/plan.hpp"

namespace homeplan {

struct DatasetRecord {
  std::string id;
  std::string category;
  std::string instruction;
  std::optional<std::string> system;
  std::string gold_plan;
  nlohmann::json extra = nlohmann::json::object();
};

struct FieldMapping {
  std::string id = "id";
  std::string category = "category";
  std::string instruction = "instruction";
  std::string system = "system";
  std::string gold_plan = "gold_plan";

  /// Reads {"id": "...", "gold_plan": "output", ...}; absent keys keep defaults.
  static FieldMapping load(const std::filesystem::path& path);
};

class DatasetError : public std::runtime_error {
 public:
  enum class Kind { Io, MalformedLine, InvalidGoldPlan };

  DatasetError(Kind kind, std::size_t line, const std::string& message)
      : std::runtime_error(message), kind_(kind), line_(line) {}

  Kind kind() const { return kind_; }
  std::size_t line() const { return line_; }

 private:
  Kind kind_;
  std::size_t line_;
};

/// Blank lines are skipped. Ids must be unique. A gold plan that does not
/// parse rejects the whole file with its line number.
std::vector<DatasetRecord> load_dataset(const std::filesystem::path& path, const FieldMapping& mapping = {});
std::vector<DatasetRecord> parse_dataset(std::string_view jsonl, const FieldMapping& mapping = {},
                                         const std::string& source = "<memory>");

/// A worked example placed in the system prompt.
struct Shot {
  std::string instruction;
  std::string plan;
};

/// First `k` records as shots, in file order.
std::vector<Shot> take_shots(const std::vector<DatasetRecord>& records, std::size_t k);

}  // namespace homeplan
