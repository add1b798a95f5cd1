#include "homeplan/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <ctime>
#include <thread>

#include <json.hpp>

namespace homeplan {

MatchResult score_plan(const std::string& predicted, const std::string& gold) {
  MatchResult m;
  m.exact = predicted == gold;
  auto g = parse_plan(gold);
  m.step_total = g.plan.size();
  auto p = parse_plan(predicted);
  if (!p.ok() || !g.ok()) return m;

  m.canonical = print_canonical(p.plan) == print_canonical(g.plan);
  const std::size_t common = std::min(p.plan.size(), g.plan.size());
  for (std::size_t i = 0; i < common; ++i) {
    if (print_canonical(p.plan.steps[i]) == print_canonical(g.plan.steps[i])) ++m.step_matches;
  }
  return m;
}

void CategoryStats::add(const CategoryStats& o) {
  n += o.n;
  correct += o.correct;
  exact += o.exact;
  step_matches += o.step_matches;
  step_total += o.step_total;
  backend_errors += o.backend_errors;
}

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

BenchReport run_benchmark(const Planner& backend, const std::vector<DatasetRecord>& records,
                          const std::vector<Shot>& shots, const BenchOptions& options) {
  const std::string base_prompt = build_system_prompt(*options.registry, options.memory, shots);
  const std::string examples = render_examples(shots);

  std::vector<RecordOutcome> outcomes(records.size());
  std::vector<std::string> error_kinds(records.size());

  auto evaluate = [&](std::size_t i) {
    const DatasetRecord& rec = records[i];
    RecordOutcome& out = outcomes[i];
    out.id = rec.id;
    out.category = rec.category;
    PlannerRequest req;
    req.system_prompt = rec.system ? *rec.system + "\n\n" + examples : base_prompt;
    req.instruction = rec.instruction;
    req.decode = options.decode;
    req.record_id = rec.id;
    std::string predicted;
    try {
      predicted = generate_plan(backend, req).plan_text;
    } catch (const PlannerError& e) {
      out.backend_error = e.what();
      error_kinds[i] = std::string(to_string(e.kind()));
    } catch (const std::exception& e) {
      out.backend_error = e.what();
      error_kinds[i] = "Other";
    }
    if (out.backend_error) {
      out.match.step_total = parse_plan(rec.gold_plan).plan.size();
    } else {
      out.match = score_plan(predicted, rec.gold_plan);
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(options.parallelism, 1, std::max<std::size_t>(1, records.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < records.size(); ++i) evaluate(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < records.size(); i = next++) evaluate(i);
      });
    }
  }

  BenchReport report;
  report.metadata.backend = backend.id();
  report.metadata.seed = options.seed;
  report.metadata.shot_count = shots.size();
  report.metadata.shot_ids = options.shot_ids;
  report.metadata.decode = options.decode;
  report.metadata.timestamp = utc_timestamp();

  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const RecordOutcome& o = outcomes[i];
    CategoryStats s;
    s.n = 1;
    s.correct = o.match.canonical ? 1 : 0;
    s.exact = o.match.exact ? 1 : 0;
    s.step_matches = o.match.step_matches;
    s.step_total = o.match.step_total;
    s.backend_errors = o.backend_error ? 1 : 0;
    report.per_category[o.category].add(s);
    report.overall.add(s);
    if (o.backend_error) ++report.metadata.backend_error_kinds[error_kinds[i]];
  }
  report.metadata.backend_errors = report.overall.backend_errors;
  report.records = std::move(outcomes);
  return report;
}

namespace {

nlohmann::ordered_json stats_json(const CategoryStats& s) {
  return {{"n", s.n},
          {"correct", s.correct},
          {"accuracy", s.accuracy()},
          {"exact", s.exact},
          {"exact_accuracy", s.exact_accuracy()},
          {"step_matches", s.step_matches},
          {"step_total", s.step_total},
          {"step_accuracy", s.step_accuracy()},
          {"backend_errors", s.backend_errors}};
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string fixed(double v, int digits) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

std::string report_to_json(const BenchReport& report, bool include_records) {
  const auto& md = report.metadata;
  nlohmann::ordered_json decode = {{"temperature", md.decode.temperature}, {"max_tokens", md.decode.max_tokens}};
  decode["seed"] = md.decode.seed ? nlohmann::ordered_json(*md.decode.seed) : nlohmann::ordered_json(nullptr);

  nlohmann::ordered_json meta = {{"backend", md.backend},
                                 {"seed", md.seed},
                                 {"shot_count", md.shot_count},
                                 {"shot_ids", md.shot_ids},
                                 {"decode", decode},
                                 {"timestamp", md.timestamp},
                                 {"backend_errors", md.backend_errors},
                                 {"backend_error_kinds", md.backend_error_kinds}};
  nlohmann::ordered_json categories = nlohmann::ordered_json::object();
  for (const auto& [name, stats] : report.per_category) categories[name] = stats_json(stats);

  nlohmann::ordered_json doc = {{"metadata", meta}, {"overall", stats_json(report.overall)}, {"categories", categories}};
  if (include_records) {
    auto recs = nlohmann::ordered_json::array();
    for (const auto& r : report.records) {
      nlohmann::ordered_json j = {{"id", r.id},
                                  {"category", r.category},
                                  {"exact", r.match.exact},
                                  {"canonical", r.match.canonical},
                                  {"step_matches", r.match.step_matches},
                                  {"step_total", r.match.step_total}};
      if (r.backend_error) j["backend_error"] = *r.backend_error;
      recs.push_back(std::move(j));
    }
    doc["records"] = std::move(recs);
  }
  return doc.dump(2) + "\n";
}

std::string report_to_csv(const BenchReport& report) {
  std::string out = "category,n,correct,accuracy,exact,exact_accuracy,step_matches,step_total,step_accuracy,backend_errors\n";
  auto row = [&](const std::string& name, const CategoryStats& s) {
    out += csv_field(name) + "," + std::to_string(s.n) + "," + std::to_string(s.correct) + "," + fixed(s.accuracy(), 6) +
           "," + std::to_string(s.exact) + "," + fixed(s.exact_accuracy(), 6) + "," + std::to_string(s.step_matches) +
           "," + std::to_string(s.step_total) + "," + fixed(s.step_accuracy(), 6) + "," +
           std::to_string(s.backend_errors) + "\n";
  };
  for (const auto& [name, stats] : report.per_category) row(name, stats);
  row("overall", report.overall);
  return out;
}

std::string report_to_table(const BenchReport& report) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"Category", "N", "Correct", "Accuracy", "Exact", "Step acc.", "Errors"});
  auto add = [&](const std::string& name, const CategoryStats& s) {
    rows.push_back({name, std::to_string(s.n), std::to_string(s.correct), fixed(100.0 * s.accuracy(), 2) + "%",
                    fixed(100.0 * s.exact_accuracy(), 2) + "%", fixed(100.0 * s.step_accuracy(), 2) + "%",
                    std::to_string(s.backend_errors)});
  };
  for (const auto& [name, stats] : report.per_category) add(name, stats);
  add("overall", report.overall);

  std::vector<std::size_t> width(rows.front().size(), 0);
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
  }
  std::string out;
  auto emit = [&](const std::vector<std::string>& r) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (c) out += "  ";
      const std::string pad(width[c] - r[c].size(), ' ');
      out += c == 0 ? r[c] + pad : pad + r[c];
    }
    out += "\n";
  };
  auto rule = [&] {
    std::size_t total = 0;
    for (auto w : width) total += w;
    out += std::string(total + 2 * (width.size() - 1), '-') + "\n";
  };
  emit(rows.front());
  rule();
  for (std::size_t i = 1; i + 1 < rows.size(); ++i) emit(rows[i]);
  rule();
  emit(rows.back());
  return out;
}

}  // namespace homeplan
