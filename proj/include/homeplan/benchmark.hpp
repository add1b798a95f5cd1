#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "homeplan/dataset.hpp"
#include "homeplan/planner.hpp"

namespace homeplan {

struct MatchResult {
  bool exact = false;      // byte equality
  bool canonical = false;  // equality of canonical forms
  std::size_t step_matches = 0;
  std::size_t step_total = 0;
};

/// Compares a predicted plan against the gold plan. An unparseable
/// prediction is never canonically equal and matches no steps.
MatchResult score_plan(const std::string& predicted, const std::string& gold);

struct CategoryStats {
  std::size_t n = 0;
  std::size_t correct = 0;  // canonical matches
  std::size_t exact = 0;
  std::size_t step_matches = 0;
  std::size_t step_total = 0;
  std::size_t backend_errors = 0;

  double accuracy() const { return n == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(n); }
  double exact_accuracy() const { return n == 0 ? 0.0 : static_cast<double>(exact) / static_cast<double>(n); }
  double step_accuracy() const {
    return step_total == 0 ? 0.0 : static_cast<double>(step_matches) / static_cast<double>(step_total);
  }
  void add(const CategoryStats& other);
};

struct RecordOutcome {
  std::string id;
  std::string category;
  MatchResult match;
  std::optional<std::string> backend_error;
};

struct BenchMetadata {
  std::string backend;
  std::uint64_t seed = 0;
  std::size_t shot_count = 0;
  std::vector<std::string> shot_ids;
  DecodeParams decode;
  std::string timestamp;  // ISO 8601 UTC; the only wall-clock field
  std::size_t backend_errors = 0;
  std::map<std::string, std::size_t> backend_error_kinds;
};

struct BenchReport {
  std::map<std::string, CategoryStats> per_category;
  CategoryStats overall;
  BenchMetadata metadata;
  std::vector<RecordOutcome> records;  // dataset order

  double accuracy() const { return overall.accuracy(); }
};

struct BenchOptions {
  std::size_t parallelism = 1;
  std::uint64_t seed = 0;
  DecodeParams decode;
  MemoryProfile memory;
  std::vector<std::string> shot_ids;
  const SchemaRegistry* registry = &schema_registry();
};

/// Generates and scores a plan for every record. Backend failures count as
/// incorrect and are tallied in the metadata. Results are merged by record
/// index, so the report does not depend on thread scheduling.
BenchReport run_benchmark(const Planner& backend, const std::vector<DatasetRecord>& records,
                          const std::vector<Shot>& shots, const BenchOptions& options = {});

/// Timestamp written when the caller asks for byte-stable reports.
inline constexpr std::string_view kMaskedTimestamp = "1970-01-01T00:00:00Z";

std::string report_to_json(const BenchReport& report, bool include_records = false);
std::string report_to_csv(const BenchReport& report);
std::string report_to_table(const BenchReport& report);

std::string utc_timestamp();

}  // namespace homeplan
