#include "vthink/scoring/aggregate.hpp"

#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace vthink::scoring {

using nlohmann::json;

std::string_view to_string(ScoringErrc e) {
  switch (e) {
    case ScoringErrc::EmptyTask: return "EmptyTask";
    case ScoringErrc::MismatchedManifests: return "MismatchedManifests";
    case ScoringErrc::NothingToJudge: return "NothingToJudge";
    case ScoringErrc::DegenerateX: return "DegenerateX";
    case ScoringErrc::TooFewPoints: return "TooFewPoints";
    case ScoringErrc::BadReport: return "BadReport";
  }
  return "BadReport";
}

double ScoreReport::sample_weighted() const {
  return n == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(n);
}

double ScoreReport::benchmark_mean() const {
  std::vector<double> acc;
  for (const auto& b : benchmarks) acc.push_back(b.accuracy());
  return acc.empty() ? 0.0 : unweighted_mean(acc);
}

double unweighted_mean(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("unweighted_mean: no values");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

std::string format_fixed(double value, int decimals) {
  // Round through a decimal string with two guard digits so that values
  // such as 62.55 (stored as 62.549999...) round like their decimal form.
  auto guarded = fmt::format("{:.{}f}", value, decimals + 2);
  double reparsed = std::stod(guarded);
  double scale = std::pow(10.0, decimals);
  double rounded = std::round(reparsed * scale) / scale;
  if (rounded == 0.0) rounded = 0.0;  // no "-0.0"
  return fmt::format("{:.{}f}", rounded, decimals);
}

ScoreReport aggregate(std::span<const pipeline::RunRecord> records, const bench::Manifest& manifest,
                      std::vector<std::string>* warnings) {
  struct Tally {
    std::size_t n = 0;
    std::size_t correct = 0;
  };
  std::map<std::string, Tally> by_task;
  std::map<bench::Category, Tally> by_category;
  std::map<std::string, Tally> by_source;
  ScoreReport report;

  for (const auto& r : records) {
    const auto* sample = manifest.find(r.sample_id);
    if (sample == nullptr) {
      throw ScoringError(ScoringErrc::MismatchedManifests,
                         fmt::format("MismatchedManifests: record for unknown sample '{}'", r.sample_id));
    }
    bool ok = r.correct && !r.errored();
    for (Tally* t : {&by_task[sample->task], &by_category[sample->category], &by_source[sample->source]}) {
      ++t->n;
      t->correct += ok ? 1 : 0;
    }
    ++report.n;
    report.correct += ok ? 1 : 0;
    if (r.errored()) {
      ++report.errored;
    } else if (r.extraction.rule == ExtractionRule::Unparseable) {
      ++report.unparseable;
    }
  }

  for (const auto& [task, _] : bench::partition_by_task(manifest)) {
    auto it = by_task.find(task);
    if (it == by_task.end()) {
      if (warnings != nullptr) {
        warnings->push_back(fmt::format("EmptyTask: task '{}' has no records and is excluded", task));
      }
      continue;
    }
    report.tasks.push_back({task, *manifest.task_category(task), it->second.n, it->second.correct});
  }
  for (auto c : bench::kAllCategories) {
    if (auto it = by_category.find(c); it != by_category.end()) {
      report.categories.push_back({std::string(bench::to_string(c)), it->second.n, it->second.correct});
    }
  }
  for (const auto& [source, t] : by_source) report.benchmarks.push_back({source, t.n, t.correct});
  return report;
}

json scores_to_json(const ScoreReport& r) {
  json tasks = json::array();
  for (const auto& t : r.tasks) {
    tasks.push_back({{"task", t.task},
                     {"category", bench::to_string(t.category)},
                     {"n", t.n},
                     {"correct", t.correct},
                     {"accuracy", t.accuracy()}});
  }
  auto groups = [](const std::vector<GroupAccuracy>& gs) {
    json arr = json::array();
    for (const auto& g : gs) {
      arr.push_back({{"name", g.name}, {"n", g.n}, {"correct", g.correct}, {"accuracy", g.accuracy()}});
    }
    return arr;
  };
  return {{"tasks", tasks},
          {"categories", groups(r.categories)},
          {"benchmarks", groups(r.benchmarks)},
          {"overall",
           {{"n", r.n},
            {"correct", r.correct},
            {"unparseable", r.unparseable},
            {"errored", r.errored},
            {"sample_weighted", r.sample_weighted()},
            {"benchmark_mean", r.benchmark_mean()}}}};
}

ScoreReport scores_from_json(const json& j) {
  ScoreReport r;
  try {
    for (const auto& t : j.at("tasks")) {
      auto cat = bench::parse_category(t.at("category").get<std::string>());
      if (!cat) throw std::invalid_argument("unknown category");
      r.tasks.push_back({t.at("task").get<std::string>(), *cat, t.at("n").get<std::size_t>(),
                         t.at("correct").get<std::size_t>()});
    }
    for (const auto& g : j.at("categories")) {
      r.categories.push_back({g.at("name").get<std::string>(), g.at("n").get<std::size_t>(),
                              g.at("correct").get<std::size_t>()});
    }
    for (const auto& g : j.at("benchmarks")) {
      r.benchmarks.push_back({g.at("name").get<std::string>(), g.at("n").get<std::size_t>(),
                              g.at("correct").get<std::size_t>()});
    }
    const auto& o = j.at("overall");
    r.n = o.at("n").get<std::size_t>();
    r.correct = o.at("correct").get<std::size_t>();
    r.unparseable = o.at("unparseable").get<std::size_t>();
    r.errored = o.at("errored").get<std::size_t>();
  } catch (const std::exception& e) {
    throw ScoringError(ScoringErrc::BadReport, fmt::format("BadReport: scores.json: {}", e.what()));
  }
  return r;
}

}  // namespace vthink::scoring
