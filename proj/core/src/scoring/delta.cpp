#include "vthink/scoring/delta.hpp"

#include <map>

#include <fmt/format.h>

namespace vthink::scoring {

DeltaReport compute_delta(const ScoreReport& treatment, const ScoreReport& baseline) {
  std::map<std::string, const TaskAccuracy*> base;
  for (const auto& t : baseline.tasks) base[t.task] = &t;

  auto mismatch = [](const std::string& msg) {
    throw ScoringError(ScoringErrc::MismatchedManifests, "MismatchedManifests: " + msg);
  };
  if (treatment.tasks.size() != baseline.tasks.size()) {
    mismatch(fmt::format("treatment has {} tasks, baseline has {}", treatment.tasks.size(),
                         baseline.tasks.size()));
  }

  DeltaReport report;
  std::map<bench::Category, std::pair<double, std::size_t>> per_category;
  double total = 0;
  for (const auto& t : treatment.tasks) {
    auto it = base.find(t.task);
    if (it == base.end()) mismatch(fmt::format("task '{}' missing from the baseline run", t.task));
    const auto& b = *it->second;
    if (b.n != t.n || b.category != t.category) {
      mismatch(fmt::format("task '{}' differs between runs (n {} vs {})", t.task, t.n, b.n));
    }
    TaskDelta d{t.task, t.category, b.accuracy(), t.accuracy(), t.accuracy() - b.accuracy()};
    per_category[t.category].first += d.delta;
    ++per_category[t.category].second;
    total += d.delta;
    report.tasks.push_back(std::move(d));
  }
  for (auto c : bench::kAllCategories) {
    if (auto it = per_category.find(c); it != per_category.end()) {
      report.categories.push_back({c, it->second.first / static_cast<double>(it->second.second),
                                   it->second.second});
    }
  }
  report.overall_mean = report.tasks.empty() ? 0.0 : total / static_cast<double>(report.tasks.size());
  return report;
}

}  // namespace vthink::scoring
