#pragma once

// Planner backends: anything that turns (system prompt, instruction) into
// plan text.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "homeplan/dataset.hpp"
#include "homeplan/schema.hpp"
#include "homeplan/world.hpp"

namespace homeplan {

struct DecodeParams {
  double temperature = 0.0;
  std::size_t max_tokens = 256;
  std::optional<std::int64_t> seed;
};

struct PlannerRequest {
  std::string system_prompt;
  std::string instruction;
  DecodeParams decode;
  /// Dataset record id, when the request comes from a benchmark run.
  std::string record_id;
};

struct PlannerResponse {
  std::string plan_text;
  std::chrono::nanoseconds latency{0};
  std::optional<std::size_t> token_estimate;
};

class PlannerError : public std::runtime_error {
 public:
  enum class Kind { BackendUnavailable, Timeout, MissingGoldEntry, InvalidRequest };

  PlannerError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

std::string_view to_string(PlannerError::Kind kind);

/// Backends must be safe to call concurrently.
class Planner {
 public:
  virtual ~Planner() = default;
  virtual std::string id() const = 0;
  virtual PlannerResponse generate(const PlannerRequest& request) const = 0;
};

/// Checks the request invariants, times the backend call, and fills latency.
PlannerResponse generate_plan(const Planner& backend, const PlannerRequest& request);

/// Prompt layout: action signatures with descriptions, then memory entries
/// as "key: value" lines, then the worked examples in the given order.
std::string build_system_prompt(const SchemaRegistry& registry, const MemoryProfile& memory,
                                const std::vector<Shot>& shots);
/// Just the examples section of the prompt.
std::string render_examples(const std::vector<Shot>& shots);

/// Returns the dataset's gold plan for the request's record (by id when
/// given, else by instruction).
class GoldenPlanner : public Planner {
 public:
  explicit GoldenPlanner(const std::vector<DatasetRecord>& records);
  std::string id() const override { return "golden"; }
  PlannerResponse generate(const PlannerRequest& request) const override;

 private:
  std::map<std::string, std::string> by_id_;
  std::map<std::string, std::string> by_instruction_;
};

class ScriptedPlanner : public Planner {
 public:
  explicit ScriptedPlanner(std::map<std::string, std::string> script) : script_(std::move(script)) {}
  /// JSON object mapping instruction -> plan text.
  static ScriptedPlanner load(const std::filesystem::path& path);

  std::string id() const override { return "scripted"; }
  PlannerResponse generate(const PlannerRequest& request) const override;

 private:
  std::map<std::string, std::string> script_;
};

/// With probability `rate` per record, applies one mutation to the inner
/// backend's plan: drop a step, swap two differing steps, or replace one
/// argument with kCorruptionMarker. The draw depends only on (seed, record
/// id), so results do not depend on call order or threading.
class CorruptingPlanner : public Planner {
 public:
  CorruptingPlanner(std::shared_ptr<const Planner> inner, double rate, std::uint64_t seed);

  std::string id() const override;
  PlannerResponse generate(const PlannerRequest& request) const override;

 private:
  std::shared_ptr<const Planner> inner_;
  double rate_;
  std::uint64_t seed_;
};

inline constexpr std::string_view kCorruptionMarker = "<corrupted>";

/// One mutation of `plan_text`, drawing choices from a splitmix64 stream
/// whose state is advanced in place. The result always differs from the
/// input under canonical comparison.
std::string corrupt_plan(const std::string& plan_text, std::uint64_t& rng_state);

struct RemoteConfig {
  std::string endpoint = "http://127.0.0.1:8080/v1/chat/completions";
  std::string model = "default";
  double temperature = 0.0;
  std::size_t max_tokens = 256;
  std::chrono::milliseconds timeout{30000};
  /// Environment variable holding the bearer token; unset or empty means no
  /// Authorization header.
  std::string api_key_env = "HOMEPLAN_API_KEY";

  /// JSON file with any of: endpoint, model, temperature, max_tokens,
  /// timeout_ms, api_key_env.
  static RemoteConfig load(const std::filesystem::path& path);
};

/// Chat-completions client. Sends
///   {"model", "messages": [{"role": "system"}, {"role": "user"}],
///    "temperature", "max_tokens", "seed"?}
/// and returns choices[0].message.content.
class RemotePlanner : public Planner {
 public:
  explicit RemotePlanner(RemoteConfig config);
  std::string id() const override { return "remote:" + config_.model; }
  PlannerResponse generate(const PlannerRequest& request) const override;

  const RemoteConfig& config() const { return config_; }

 private:
  RemoteConfig config_;
};

}  // namespace homeplan
