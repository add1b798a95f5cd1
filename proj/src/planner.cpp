#include "homeplan/planner.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace homeplan {

std::string_view to_string(PlannerError::Kind kind) {
  switch (kind) {
    case PlannerError::Kind::BackendUnavailable: return "BackendUnavailable";
    case PlannerError::Kind::Timeout: return "Timeout";
    case PlannerError::Kind::MissingGoldEntry: return "MissingGoldEntry";
    case PlannerError::Kind::InvalidRequest: return "InvalidRequest";
  }
  return "?";
}

PlannerResponse generate_plan(const Planner& backend, const PlannerRequest& request) {
  if (request.instruction.empty()) throw PlannerError(PlannerError::Kind::InvalidRequest, "empty instruction");
  if (!(request.decode.temperature >= 0.0)) {
    throw PlannerError(PlannerError::Kind::InvalidRequest, "temperature must be non-negative");
  }
  auto start = std::chrono::steady_clock::now();
  PlannerResponse resp = backend.generate(request);
  resp.latency = std::chrono::steady_clock::now() - start;
  return resp;
}

std::string render_examples(const std::vector<Shot>& shots) {
  std::string out = "## Examples\n";
  for (std::size_t i = 0; i < shots.size(); ++i) {
    out += "### Example " + std::to_string(i + 1) + "\n";
    out += "Instruction: " + shots[i].instruction + "\n";
    out += "Plan:\n" + shots[i].plan + "\n";
  }
  return out;
}

std::string build_system_prompt(const SchemaRegistry& registry, const MemoryProfile& memory,
                                const std::vector<Shot>& shots) {
  std::string out =
      "You are a household robot planner. Answer every instruction with a plan: one action call per line, "
      "arguments in single quotes.\n\n";
  out += "## Actions\n";
  for (const auto& schema : registry.all()) out += schema.signature() + ": " + schema.description + "\n";
  out += "\n## Memory\n";
  for (const auto& [key, value] : memory.entries) out += key + ": " + value + "\n";
  out += "\n" + render_examples(shots);
  return out;
}

GoldenPlanner::GoldenPlanner(const std::vector<DatasetRecord>& records) {
  for (const auto& r : records) {
    by_id_.emplace(r.id, r.gold_plan);
    by_instruction_.emplace(r.instruction, r.gold_plan);
  }
}

PlannerResponse GoldenPlanner::generate(const PlannerRequest& request) const {
  if (!request.record_id.empty()) {
    if (auto it = by_id_.find(request.record_id); it != by_id_.end()) return {it->second, {}, {}};
  }
  if (auto it = by_instruction_.find(request.instruction); it != by_instruction_.end()) return {it->second, {}, {}};
  throw PlannerError(PlannerError::Kind::MissingGoldEntry, "no gold plan for instruction '" + request.instruction + "'");
}

ScriptedPlanner ScriptedPlanner::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PlannerError(PlannerError::Kind::BackendUnavailable, "cannot open script '" + path.string() + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw PlannerError(PlannerError::Kind::BackendUnavailable, path.string() + ": malformed JSON: " + e.what());
  }
  if (!doc.is_object()) {
    throw PlannerError(PlannerError::Kind::BackendUnavailable, path.string() + ": expected instruction -> plan object");
  }
  std::map<std::string, std::string> script;
  for (const auto& [instruction, plan] : doc.items()) {
    if (!plan.is_string()) {
      throw PlannerError(PlannerError::Kind::BackendUnavailable, path.string() + ": plan for '" + instruction +
                                                                     "' must be a string");
    }
    script[instruction] = plan.get<std::string>();
  }
  return ScriptedPlanner(std::move(script));
}

PlannerResponse ScriptedPlanner::generate(const PlannerRequest& request) const {
  auto it = script_.find(request.instruction);
  if (it == script_.end()) {
    throw PlannerError(PlannerError::Kind::MissingGoldEntry, "no scripted plan for '" + request.instruction + "'");
  }
  return {it->second, {}, {}};
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

double unit_draw(std::uint64_t& state) { return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53; }

}  // namespace

std::string corrupt_plan(const std::string& plan_text, std::uint64_t& rng_state) {
  const std::string marker_step = "Respond('" + std::string(kCorruptionMarker) + "')";
  auto parsed = parse_plan(plan_text);
  if (!parsed.ok()) return plan_text + "\n" + marker_step;

  Plan plan = std::move(parsed.plan);
  const std::size_t n = plan.steps.size();

  std::vector<std::pair<std::size_t, std::size_t>> swaps;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (print_canonical(plan.steps[i]) != print_canonical(plan.steps[j])) swaps.emplace_back(i, j);
    }
  }
  std::vector<std::pair<std::size_t, std::size_t>> replaceable;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < plan.steps[i].args.size(); ++a) {
      if (plan.steps[i].args[a] != kCorruptionMarker) replaceable.emplace_back(i, a);
    }
  }

  enum class Mutation { Drop, Swap, Replace };
  std::vector<Mutation> menu;
  if (n > 0) menu.push_back(Mutation::Drop);
  if (!swaps.empty()) menu.push_back(Mutation::Swap);
  if (!replaceable.empty()) menu.push_back(Mutation::Replace);
  if (menu.empty()) return marker_step;

  switch (menu[splitmix64(rng_state) % menu.size()]) {
    case Mutation::Drop:
      plan.steps.erase(plan.steps.begin() + static_cast<std::ptrdiff_t>(splitmix64(rng_state) % n));
      break;
    case Mutation::Swap: {
      auto [i, j] = swaps[splitmix64(rng_state) % swaps.size()];
      std::swap(plan.steps[i], plan.steps[j]);
      break;
    }
    case Mutation::Replace: {
      auto [i, a] = replaceable[splitmix64(rng_state) % replaceable.size()];
      plan.steps[i].args[a] = std::string(kCorruptionMarker);
      break;
    }
  }
  return print_canonical(plan);
}

CorruptingPlanner::CorruptingPlanner(std::shared_ptr<const Planner> inner, double rate, std::uint64_t seed)
    : inner_(std::move(inner)), rate_(rate), seed_(seed) {
  if (!inner_) throw std::invalid_argument("CorruptingPlanner needs an inner backend");
  if (!(rate_ >= 0.0 && rate_ <= 1.0)) throw std::invalid_argument("corruption rate must be in [0, 1]");
}

std::string CorruptingPlanner::id() const {
  std::ostringstream os;
  os << "corrupt(" << inner_->id() << ",p=" << rate_ << ",seed=" << seed_ << ")";
  return os.str();
}

PlannerResponse CorruptingPlanner::generate(const PlannerRequest& request) const {
  PlannerResponse resp = inner_->generate(request);
  const std::string& key = request.record_id.empty() ? request.instruction : request.record_id;
  std::uint64_t state = seed_ ^ fnv1a64(key);
  if (unit_draw(state) < rate_) resp.plan_text = corrupt_plan(resp.plan_text, state);
  return resp;
}

}  // namespace homeplan
