#include "vthink/scoring/judge.hpp"

#include <atomic>
#include <map>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "vthink/scoring/aggregate.hpp"

namespace vthink::scoring {

JudgeSummary summarize_quality(std::vector<QualityScore> scores, std::vector<JudgeFailure> failures) {
  JudgeSummary s;
  struct Sum {
    double sc = 0;
    double pq = 0;
    std::size_t n = 0;
  };
  std::map<std::string, Sum> by_task;
  Sum all;
  for (const auto& q : scores) {
    for (Sum* sum : {&by_task[q.task], &all}) {
      sum->sc += q.semantic_consistency;
      sum->pq += q.perceptual_quality;
      ++sum->n;
    }
  }
  for (const auto& [task, sum] : by_task) {
    auto n = static_cast<double>(sum.n);
    s.tasks.push_back({task, sum.sc / n, sum.pq / n, sum.n});
  }
  if (all.n > 0) {
    s.mean_sc = all.sc / static_cast<double>(all.n);
    s.mean_pq = all.pq / static_cast<double>(all.n);
  }
  s.scores = std::move(scores);
  s.failures = std::move(failures);
  return s;
}

JudgeSummary judge_batch(std::span<const pipeline::RunRecord> records, const bench::Manifest& manifest,
                         const bench::ImageSource& images, const gateway::BackendClient& judge,
                         std::size_t parallelism) {
  std::vector<const pipeline::RunRecord*> todo;
  for (const auto& r : records) {
    if (r.thought && !r.thought->image.empty()) todo.push_back(&r);
  }
  if (todo.empty()) {
    throw ScoringError(ScoringErrc::NothingToJudge,
                       "NothingToJudge: no record carries a visual thought (baseline run?)");
  }

  std::vector<std::optional<QualityScore>> slots(todo.size());
  std::vector<std::optional<JudgeFailure>> failed(todo.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < todo.size(); i = next++) {
      const auto& r = *todo[i];
      const auto* sample = manifest.find(r.sample_id);
      if (sample == nullptr) {
        failed[i] = JudgeFailure{r.sample_id, "sample not in manifest"};
        continue;
      }
      try {
        auto original = images.load(sample->image_ref);
        auto verdict = judge.judge({original.bytes, r.thought->image, r.thought->instruction}, r.sample_id);
        slots[i] = QualityScore{r.sample_id, sample->task, verdict.semantic_consistency,
                                verdict.perceptual_quality};
      } catch (const gateway::GatewayError& e) {
        failed[i] = JudgeFailure{r.sample_id, e.what()};
      } catch (const bench::ImageError& e) {
        failed[i] = JudgeFailure{r.sample_id, e.what()};
      }
    }
  };

  std::size_t workers = std::min(std::max<std::size_t>(parallelism, 1), todo.size());
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  std::vector<QualityScore> scores;
  std::vector<JudgeFailure> failures;
  for (std::size_t i = 0; i < todo.size(); ++i) {
    if (slots[i]) scores.push_back(std::move(*slots[i]));
    if (failed[i]) failures.push_back(std::move(*failed[i]));
  }
  return summarize_quality(std::move(scores), std::move(failures));
}

std::vector<Point> quality_gain_points(const DeltaReport& deltas, std::span<const TaskQuality> quality,
                                       QualityMetric metric) {
  std::map<std::string, const TaskQuality*> q;
  for (const auto& t : quality) q[t.task] = &t;
  std::vector<Point> points;
  for (const auto& d : deltas.tasks) {
    auto it = q.find(d.task);
    if (it == q.end()) continue;
    double x = metric == QualityMetric::SemanticConsistency ? it->second->mean_sc : it->second->mean_pq;
    points.push_back({x, d.delta});
  }
  return points;
}

}  // namespace vthink::scoring
