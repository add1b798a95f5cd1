// homeplan: command-line front end.
//
//   homeplan parse <plan>
//   homeplan schema
//   homeplan simulate --world <json> --plan <plan>
//   homeplan bench --dataset <jsonl> --backend golden|scripted|corrupt|remote
//   homeplan repl --world <json> --backend ...
//   homeplan quant-selfcheck
//
// Exit status: 0 success, 1 parse error or halted simulation, 2 I/O, load
// or usage errors.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "homeplan/benchmark.hpp"
#include "homeplan/dataset.hpp"
#include "homeplan/perception.hpp"
#include "homeplan/plan.hpp"
#include "homeplan/planner.hpp"
#include "homeplan/quant/selfcheck.hpp"
#include "homeplan/schema.hpp"
#include "homeplan/simulator.hpp"
#include "homeplan/validator.hpp"
#include "homeplan/world.hpp"

namespace fs = std::filesystem;
using namespace homeplan;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kIoError = 2;

class CliError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliError("cannot write '" + path.string() + "'");
  out << text;
}

void print_parse_errors(std::ostream& os, const std::string& source, std::string_view text,
                        const std::vector<ParseError>& errors) {
  for (const auto& e : errors) {
    const LineCol lc = line_col(text, e.span.begin);
    os << source << ":" << lc.line << ":" << lc.column << ": error: " << to_string(e.kind) << ": " << e.message
       << "\n";
  }
}

void print_findings(std::ostream& os, const ValidationReport& report) {
  for (const auto& f : report.errors)
    os << "validate: step " << f.step << ": " << to_string(f.code) << ": " << f.message << "\n";
  for (const auto& f : report.warnings)
    os << "validate: step " << f.step << ": warning: " << to_string(f.code) << ": " << f.message << "\n";
}

void print_outcome(std::ostream& os, std::size_t index, const StepOutcome& step) {
  os << "[" << index << "] " << print_canonical(step.action) << "  ";
  if (step.ok()) {
    os << "ok";
  } else {
    os << "FAILED " << to_string(*step.failure);
  }
  if (!step.state_delta.empty()) os << "  " << step.state_delta;
  os << "\n";
  if (step.utterance) os << "    robot: " << *step.utterance << "\n";
}

struct Session {
  Scenario scenario;
  AttributeRegistry attributes = default_attributes();
};

Session load_session(const fs::path& world, const std::optional<fs::path>& attributes) {
  if (!fs::exists(world)) throw CliError("world file not found: '" + world.string() + "'");
  Session s;
  try {
    s.scenario = load_scenario(world);
    if (attributes) s.attributes = load_attributes(*attributes);
  } catch (const WorldLoadError& e) {
    throw CliError(world.string() + ": " + e.what());
  }
  return s;
}

// ---- parse ---------------------------------------------------------------

int cmd_parse(const fs::path& plan_path) {
  const std::string text = read_file(plan_path);
  const ParseResult result = parse_plan(text);
  if (!result.ok()) {
    print_parse_errors(std::cerr, plan_path.string(), text, result.errors);
    return kFailed;
  }
  const std::string canonical = print_canonical(result.plan);
  std::cout << canonical;
  if (!canonical.empty()) std::cout << "\n";
  return kOk;
}

// ---- simulate ------------------------------------------------------------

int cmd_simulate(const fs::path& world_path, const fs::path& plan_path, const std::optional<fs::path>& attributes) {
  Session session = load_session(world_path, attributes);
  const std::string text = read_file(plan_path);
  const ParseResult parsed = parse_plan(text);
  if (!parsed.ok()) {
    print_parse_errors(std::cerr, plan_path.string(), text, parsed.errors);
    return kFailed;
  }
  print_findings(std::cerr, validate(parsed.plan));

  SimContext ctx;
  ctx.attributes = &session.attributes;
  const ExecutionResult run = execute_plan(session.scenario.world, session.scenario.robot, parsed.plan, ctx);
  for (std::size_t i = 0; i < run.trace.steps.size(); ++i) print_outcome(std::cout, i, run.trace.steps[i]);
  if (run.trace.completed()) {
    std::cout << "status: Completed (" << run.trace.steps.size() << " steps)\n";
  } else {
    std::cout << "status: HaltedAt(" << *run.trace.halted_at << ")\n";
  }
  std::cout << summarize(run.world, run.robot);
  return run.trace.completed() ? kOk : kFailed;
}

// ---- bench ---------------------------------------------------------------

struct BackendOptions {
  std::string kind = "golden";
  std::optional<fs::path> dataset;
  std::optional<fs::path> script;
  std::optional<fs::path> remote_config;
  std::optional<std::string> endpoint;
  std::optional<std::string> model;
  std::optional<int> timeout_ms;
  double rate = 0.25;
  std::uint64_t seed = 0;
};

std::shared_ptr<const Planner> make_backend(const BackendOptions& o, const std::vector<DatasetRecord>& records) {
  if (o.kind == "golden") return std::make_shared<GoldenPlanner>(records);
  if (o.kind == "corrupt") {
    return std::make_shared<CorruptingPlanner>(std::make_shared<GoldenPlanner>(records), o.rate, o.seed);
  }
  if (o.kind == "scripted") {
    if (!o.script) throw CliError("--backend scripted needs --script");
    try {
      return std::make_shared<ScriptedPlanner>(ScriptedPlanner::load(*o.script));
    } catch (const PlannerError& e) {
      throw CliError(e.what());
    }
  }
  if (o.kind == "remote") {
    RemoteConfig cfg;
    if (o.remote_config) cfg = RemoteConfig::load(*o.remote_config);
    // Flags win over the config file.
    if (o.endpoint) cfg.endpoint = *o.endpoint;
    if (o.model) cfg.model = *o.model;
    if (o.timeout_ms) cfg.timeout = std::chrono::milliseconds(*o.timeout_ms);
    return std::make_shared<RemotePlanner>(cfg);
  }
  throw CliError("unknown backend '" + o.kind + "'");
}

std::vector<DatasetRecord> load_records(const fs::path& path, const std::optional<fs::path>& field_map) {
  const FieldMapping mapping = field_map ? FieldMapping::load(*field_map) : FieldMapping{};
  return load_dataset(path, mapping);
}

struct BenchArgs {
  fs::path dataset;
  std::optional<fs::path> shots;
  std::size_t shot_count = 20;
  std::optional<fs::path> world;
  std::optional<fs::path> field_map;
  fs::path out = "bench-out";
  std::size_t parallelism = 1;
  bool mask_timestamp = false;
  bool with_records = false;
  double temperature = 0.0;
  std::size_t max_tokens = 256;
};

int cmd_bench(const BenchArgs& args, BackendOptions backend) {
  std::vector<DatasetRecord> records;
  std::vector<DatasetRecord> shot_records;
  try {
    records = load_records(args.dataset, args.field_map);
    if (args.shots) shot_records = load_records(*args.shots, args.field_map);
  } catch (const DatasetError& e) {
    std::cerr << "dataset error: " << e.what() << "\n";
    return kIoError;
  }
  std::set<std::string> eval_ids;
  for (const auto& r : records) eval_ids.insert(r.id);
  if (shot_records.size() > args.shot_count) shot_records.resize(args.shot_count);
  for (const auto& r : shot_records) {
    if (eval_ids.count(r.id)) throw CliError("shot record '" + r.id + "' also appears in the evaluation set");
  }

  BenchOptions options;
  options.parallelism = args.parallelism;
  options.seed = backend.seed;
  options.decode.temperature = args.temperature;
  options.decode.max_tokens = args.max_tokens;
  options.decode.seed = static_cast<std::int64_t>(backend.seed);
  for (const auto& r : shot_records) options.shot_ids.push_back(r.id);
  if (args.world) options.memory = load_session(*args.world, std::nullopt).scenario.robot.memory;

  auto planner = make_backend(backend, records);
  BenchReport report = run_benchmark(*planner, records, take_shots(shot_records, shot_records.size()), options);
  if (args.mask_timestamp) report.metadata.timestamp = std::string(kMaskedTimestamp);

  write_file(args.out / "report.json", report_to_json(report, args.with_records));
  write_file(args.out / "report.csv", report_to_csv(report));
  std::cout << report_to_table(report);
  if (report.metadata.backend_errors) {
    std::cout << "backend errors: " << report.metadata.backend_errors << "\n";
  }
  std::cout << "wrote " << (args.out / "report.json").string() << " and " << (args.out / "report.csv").string()
            << "\n";
  return kOk;
}

// ---- repl ----------------------------------------------------------------

int cmd_repl(const fs::path& world_path, const std::optional<fs::path>& attributes, const BackendOptions& backend,
             const std::optional<fs::path>& shots_path, std::size_t shot_count) {
  Session session = load_session(world_path, attributes);
  std::vector<DatasetRecord> records;
  if (backend.dataset) records = load_dataset(*backend.dataset);
  std::vector<Shot> shots;
  if (shots_path) shots = take_shots(load_dataset(*shots_path), shot_count);
  auto planner = make_backend(backend, records);
  const std::string system = build_system_prompt(schema_registry(), session.scenario.robot.memory, shots);

  SimContext ctx;
  ctx.attributes = &session.attributes;
  WorldState& world = session.scenario.world;
  RobotState& robot = session.scenario.robot;

  std::string line;
  while (true) {
    std::cout << "> " << std::flush;
    if (!std::getline(std::cin, line)) break;
    if (line == ":quit") break;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

    PlannerResponse response;
    try {
      response = generate_plan(*planner, {system, line, {}, {}});
    } catch (const PlannerError& e) {
      std::cout << "planner error: " << to_string(e.kind()) << ": " << e.what() << "\n";
      continue;
    }
    const ParseResult parsed = parse_plan(response.plan_text);
    if (!parsed.ok()) {
      std::cout << "generated plan does not parse:\n";
      print_parse_errors(std::cout, "<plan>", response.plan_text, parsed.errors);
      continue;
    }
    std::cout << "plan:\n" << print_canonical(parsed.plan) << "\n";
    print_findings(std::cout, validate(parsed.plan));
    for (std::size_t i = 0; i < parsed.plan.steps.size(); ++i) {
      const StepOutcome step = execute_step(world, robot, parsed.plan.steps[i], ctx);
      print_outcome(std::cout, i, step);
      if (!step.ok()) {
        std::cout << "halted at step " << i << "\n";
        break;
      }
    }
  }
  std::cout << "\n";
  return kOk;
}

// ---- quant-selfcheck ----------------------------------------------------

int cmd_quant_selfcheck(const quant::SelfCheckOptions& options) {
  bool all = true;
  for (const auto& r : quant::run_selfcheck(options)) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << r.detail << ")\n";
    all = all && r.passed;
  }
  std::cout << (all ? "all properties pass" : "some properties FAILED") << "\n";
  return all ? kOk : kFailed;
}

void add_backend_flags(CLI::App* cmd, BackendOptions& b) {
  cmd->add_option("--backend", b.kind, "Planner backend")
      ->check(CLI::IsMember({"golden", "scripted", "corrupt", "remote"}));
  cmd->add_option("--script", b.script, "Instruction -> plan JSON for the scripted backend");
  cmd->add_option("--rate", b.rate, "Corruption probability for the corrupt backend")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--seed", b.seed, "Seed for the corrupt backend and decoding");
  cmd->add_option("--endpoint", b.endpoint, "Chat-completions URL for the remote backend");
  cmd->add_option("--model", b.model, "Model name for the remote backend");
  cmd->add_option("--timeout-ms", b.timeout_ms, "Request timeout for the remote backend");
  cmd->add_option("--remote-config", b.remote_config, "JSON config for the remote backend");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Household robot plan toolchain"};
  app.require_subcommand(1);

  fs::path plan_path;
  fs::path world_path;
  std::optional<fs::path> attributes;

  auto* parse = app.add_subcommand("parse", "Parse a plan file and print its canonical form");
  parse->add_option("plan", plan_path, "Plan file")->required();

  auto* schema = app.add_subcommand("schema", "Print the action schema as JSON");

  auto* simulate = app.add_subcommand("simulate", "Execute a plan against a world file");
  simulate->add_option("--world", world_path, "World JSON")->required();
  simulate->add_option("--plan", plan_path, "Plan file")->required();
  simulate->add_option("--attributes", attributes, "Attribute category JSON");

  BenchArgs bench_args;
  BackendOptions backend;
  auto* bench = app.add_subcommand("bench", "Score a planner backend on a dataset");
  bench->add_option("--dataset", bench_args.dataset, "Evaluation JSONL")->required();
  bench->add_option("--shots", bench_args.shots, "JSONL of worked examples (disjoint from --dataset)");
  bench->add_option("--shot-count", bench_args.shot_count, "Number of worked examples to use");
  bench->add_option("--world", bench_args.world, "World JSON whose robot memory goes into the prompt");
  bench->add_option("--field-map", bench_args.field_map, "JSON mapping of dataset field names");
  bench->add_option("--out", bench_args.out, "Directory for report.json and report.csv");
  bench->add_option("--parallelism", bench_args.parallelism, "Concurrent requests")->check(CLI::PositiveNumber);
  bench->add_option("--temperature", bench_args.temperature, "Decode temperature")->check(CLI::NonNegativeNumber);
  bench->add_option("--max-tokens", bench_args.max_tokens, "Decode token limit");
  bench->add_flag("--mask-timestamp", bench_args.mask_timestamp, "Write a fixed timestamp for byte-stable reports");
  bench->add_flag("--records", bench_args.with_records, "Include per-record outcomes in report.json");
  add_backend_flags(bench, backend);

  std::optional<fs::path> repl_shots;
  std::size_t repl_shot_count = 20;
  auto* repl = app.add_subcommand("repl", "Interactive session: instruction in, plan and trace out");
  repl->add_option("--world", world_path, "World JSON")->required();
  repl->add_option("--attributes", attributes, "Attribute category JSON");
  repl->add_option("--dataset", backend.dataset, "Dataset for the golden and corrupt backends");
  repl->add_option("--shots", repl_shots, "JSONL of worked examples");
  repl->add_option("--shot-count", repl_shot_count, "Number of worked examples to use");
  add_backend_flags(repl, backend);

  quant::SelfCheckOptions selfcheck;
  bool corrupt_codebook = false;
  auto* quantcheck = app.add_subcommand("quant-selfcheck", "Run the quantization property suite");
  quantcheck->add_option("--blocks", selfcheck.blocks, "Random 64-blocks per block property");
  quantcheck->add_option("--instances", selfcheck.instances, "Random forward/gradient instances");
  quantcheck->add_option("--seed", selfcheck.seed, "Seed for random inputs");
  quantcheck->add_flag("--corrupt-codebook", corrupt_codebook, "Swap two codebook levels to exercise the failure path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*parse) return cmd_parse(plan_path);
    if (*schema) {
      std::cout << schema_registry().to_json() << "\n";
      return kOk;
    }
    if (*simulate) return cmd_simulate(world_path, plan_path, attributes);
    if (*bench) return cmd_bench(bench_args, backend);
    if (*repl) return cmd_repl(world_path, attributes, backend, repl_shots, repl_shot_count);
    if (*quantcheck) {
      if (corrupt_codebook) {
        quant::NF4Codebook cb = quant::nf4_codebook();
        std::swap(cb.levels[3], cb.levels[4]);
        selfcheck.codebook = cb;
      }
      return cmd_quant_selfcheck(selfcheck);
    }
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const DatasetError& e) {
    std::cerr << "dataset error: " << e.what() << "\n";
    return kIoError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoError;
  }
  return kOk;
}
