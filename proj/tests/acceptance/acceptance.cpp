// Prints one PASS/FAIL line per acceptance criterion and exits non-zero if
// any criterion fails. All thresholds are the constants below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include <unistd.h>

#include "fixtures.hpp"
#include "homeplan/benchmark.hpp"
#include "homeplan/quant/selfcheck.hpp"
#include "homeplan/simulator.hpp"
#include "homeplan/validator.hpp"

namespace {

using namespace homeplan;
using Clock = std::chrono::steady_clock;
namespace fs = std::filesystem;

constexpr std::size_t kRoundTripPlans = 10000;
constexpr double kRoundTripSeconds = 5.0;
constexpr std::size_t kFuzzPlans = 10000;
constexpr std::size_t kFuzzMaxSteps = 20;
constexpr std::size_t kMinGoldenRecords = 400;
constexpr double kCorruptRate = 0.25;
constexpr std::uint64_t kCorruptSeed = 7;
constexpr std::size_t kCorruptPinnedCorrect = 366;
constexpr double kCorruptSigmas = 3.0;
constexpr std::size_t kQuantBlocks = 10000;
constexpr std::size_t kQloraInstances = 100;
constexpr double kCliSeconds = 10.0;

struct Verdict {
  bool passed = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Verdict parser_round_trip() {
  std::mt19937_64 rng(1);
  const auto t0 = Clock::now();
  std::size_t ok = 0;
  for (std::size_t i = 0; i < kRoundTripPlans; ++i) {
    const Plan p = testing::random_schema_plan(rng);
    const auto r = parse_plan(print_canonical(p));
    if (r.ok() && r.plan == p) ++ok;
  }
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << ok << "/" << kRoundTripPlans << " identical, " << secs << " s (limit " << kRoundTripSeconds << " s)";
  return {ok == kRoundTripPlans && secs < kRoundTripSeconds, d.str()};
}

Verdict action_table() {
  const std::map<std::string, std::size_t> table = {
      {"Respond", 1},      {"Move_To", 1},      {"Pour_In", 1},    {"Search_Object", 2}, {"Search_Person", 2},
      {"Pickup", 0},       {"Place_On", 1},     {"Place_Next", 1}, {"Give_To", 0},       {"Open", 1},
      {"Close", 1},        {"Vision_Ask", 1},   {"Answer", 0},     {"Follow", 0},        {"New_Request", 0},
      {"Count_Person", 1}, {"Count_Object", 2}, {"Ask_Name", 0},   {"What_Time", 0},     {"What_Day", 0},
      {"What_Tomorrow", 0}};
  const auto& reg = schema_registry();
  if (reg.size() != table.size()) return {false, "registry has " + std::to_string(reg.size()) + " actions"};
  for (const auto& [name, arity] : table) {
    const auto* s = reg.find(name);
    if (!s || s->arity() != arity) return {false, "arity of " + name};
  }

  const Scenario sc = testing::house();
  struct Case {
    const char* plan;
    const char* room;
    const char* expect_focus;
  };
  for (const Case& c : {Case{"Search_Person(' ', 'wearing black t-shirt')", "living_room", "person_alex"},
                        Case{"Search_Object('cereal', ' ')", "kitchen", "cereal_1"}}) {
    const auto parsed = parse_plan(c.plan);
    if (!parsed.ok()) return {false, std::string(c.plan) + " does not parse"};
    // Validate in the context of a plan that uses the focus it sets.
    Plan ctx = parsed.plan;
    ctx.steps.push_back(ActionCall{std::string(c.expect_focus).starts_with("person") ? "Follow" : "Pickup", {}, {}});
    if (!validate(ctx).statically_valid()) return {false, std::string(c.plan) + " fails validation"};
    RobotState robot = sc.robot;
    robot.room = c.room;
    const auto res = execute_plan(sc.world, robot, parsed.plan);
    if (!res.trace.completed() || !res.robot.focus || res.robot.focus->id != c.expect_focus) {
      return {false, std::string(c.plan) + " did not resolve to " + c.expect_focus};
    }
  }
  return {true, "21 actions with arities; both resolution examples parse, validate and execute"};
}

bool gripper_consistent(const WorldState& w, const RobotState& r) {
  std::size_t held = 0;
  for (const auto& [id, obj] : w.objects) {
    if (std::holds_alternative<HeldByRobot>(obj.place)) {
      ++held;
      if (r.held != id) return false;
    }
  }
  return held == (r.held ? 1u : 0u);
}

Verdict simulator() {
  const Scenario sc = testing::house();
  const auto cereal = execute_plan(sc.world, sc.robot,
                                   parse_plan(testing::read_file(testing::data_path("plans/cereal.plan"))).plan);
  const auto* on = std::get_if<OnSurface>(&cereal.world.objects.at("cereal_1").place);
  if (!cereal.trace.completed() || !on || on->surface == "counter" || cereal.robot.held) {
    return {false, "cereal scenario did not complete with the cereal moved and the gripper empty"};
  }

  std::mt19937_64 rng(2);
  std::size_t violations = 0, steps = 0, succeeded = 0;
  for (std::size_t i = 0; i < kFuzzPlans; ++i) {
    // Failed steps are skipped rather than ending the run, which reaches
    // deeper states than halting would.
    const Plan plan = testing::random_world_plan(rng, kFuzzMaxSteps);
    WorldState w = sc.world;
    RobotState r = sc.robot;
    for (const auto& call : plan.steps) {
      const WorldState w0 = w;
      const RobotState r0 = r;
      ++steps;
      const auto out = execute_step(w, r, call);
      if (!out.ok()) {
        if (!(w == w0 && r == r0)) ++violations;
        continue;
      }
      ++succeeded;
      if (w.objects.size() != sc.world.objects.size() || !gripper_consistent(w, r)) ++violations;
    }
    const auto halted = execute_plan(sc.world, sc.robot, plan);
    for (std::size_t s = 0; s < halted.trace.steps.size(); ++s) {
      if (halted.trace.steps[s].ok() == (halted.trace.halted_at == s)) ++violations;
    }
  }
  std::ostringstream d;
  d << "cereal on " << on->surface << ", gripper empty; " << kFuzzPlans << " fuzzed plans, " << steps << " steps (" << succeeded << " succeeded), "
    << violations << " invariant violations";
  return {violations == 0, d.str()};
}

Verdict scoring() {
  const auto recs = load_dataset(testing::data_path("dataset.jsonl"));
  const auto shots = take_shots(load_dataset(testing::data_path("shots.jsonl")), 20);
  const auto golden = run_benchmark(GoldenPlanner(recs), recs, shots);
  bool ok = recs.size() >= kMinGoldenRecords && golden.accuracy() == 1.0;
  for (const auto& [cat, stats] : golden.per_category) ok = ok && stats.accuracy() == 1.0;

  const auto corrupt =
      run_benchmark(CorruptingPlanner(std::make_shared<GoldenPlanner>(recs), kCorruptRate, kCorruptSeed), recs, shots);
  const double n = static_cast<double>(recs.size());
  const double sigma = std::sqrt(kCorruptRate * (1 - kCorruptRate) / n);
  const double acc = corrupt.accuracy();
  ok = ok && std::abs(acc - (1 - kCorruptRate)) <= kCorruptSigmas * sigma &&
       corrupt.overall.correct == kCorruptPinnedCorrect;
  std::ostringstream d;
  d << "golden " << golden.accuracy() << " on " << recs.size() << " records across " << golden.per_category.size()
    << " categories; corrupt " << corrupt.overall.correct << "/" << recs.size() << " = " << acc << " (|d| "
    << std::abs(acc - (1 - kCorruptRate)) / sigma << " sigma, pinned " << kCorruptPinnedCorrect << ")";
  return {ok, d.str()};
}

Verdict run_properties(const std::vector<std::function<quant::PropertyResult(const quant::SelfCheckOptions&)>>& checks) {
  quant::SelfCheckOptions opts;
  opts.blocks = kQuantBlocks;
  opts.instances = kQloraInstances;
  bool ok = true;
  std::string detail;
  for (const auto& check : checks) {
    const auto r = check(opts);
    ok = ok && r.passed;
    if (!detail.empty()) detail += "; ";
    detail += r.name + (r.passed ? " ok" : " FAILED") + " (" + r.detail + ")";
  }
  return {ok, detail};
}

Verdict quantization() {
  return run_properties({quant::check_nearest_codes, quant::check_error_bound, quant::check_zero_matrix,
                         quant::check_storage});
}

Verdict qlora() { return run_properties({quant::check_forward, quant::check_gradients, quant::check_zero_adapter}); }

std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

Verdict cli_bench() {
  const fs::path root = fs::temp_directory_path() / ("homeplan-accept-" + std::to_string(::getpid()));
  std::string reports[2];
  double worst = 0;
  for (int i = 0; i < 2; ++i) {
    const fs::path out = root / std::to_string(i);
    const std::string cmd = quote(HOMEPLAN_CLI_PATH) + " bench --backend golden --seed 0 --mask-timestamp" +
                            " --dataset " + quote(testing::data_path("dataset.jsonl")) +
                            " --shots " + quote(testing::data_path("shots.jsonl")) +
                            " --world " + quote(testing::data_path("house.json")) + " --out " + quote(out) +
                            " > /dev/null";
    const auto t0 = Clock::now();
    const int rc = std::system(cmd.c_str());
    worst = std::max(worst, seconds_since(t0));
    if (rc != 0) {
      fs::remove_all(root);
      return {false, "bench exited with status " + std::to_string(rc)};
    }
    reports[i] = testing::read_file(out / "report.json");
  }
  fs::remove_all(root);
  const bool masked = reports[0].find(std::string(kMaskedTimestamp)) != std::string::npos;
  std::ostringstream d;
  d << "slowest run " << worst << " s (limit " << kCliSeconds << " s), reports "
    << (reports[0] == reports[1] ? "byte-identical" : "DIFFER") << ", timestamp " << (masked ? "masked" : "NOT masked");
  return {worst < kCliSeconds && reports[0] == reports[1] && masked && !reports[0].empty(), d.str()};
}

}  // namespace

int main() {
  const std::pair<const char*, Verdict (*)()> criteria[] = {
      {"parser round trip", parser_round_trip}, {"action table", action_table},
      {"simulator", simulator},                 {"scoring harness", scoring},
      {"quantization", quantization},           {"qlora", qlora},
      {"cli golden bench", cli_bench},
  };
  int failed = 0;
  int index = 1;
  for (const auto& [name, fn] : criteria) {
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (v.passed ? "PASS" : "FAIL") << "  [" << index++ << "] " << name << ": " << v.detail << std::endl;
    failed += v.passed ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
