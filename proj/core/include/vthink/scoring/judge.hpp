#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "vthink/bench/image_store.hpp"
#include "vthink/bench/manifest.hpp"
#include "vthink/gateway/client.hpp"
#include "vthink/pipeline/record.hpp"
#include "vthink/scoring/delta.hpp"
#include "vthink/scoring/regression.hpp"

namespace vthink::scoring {

struct QualityScore {
  std::string sample_id;
  std::string task;
  double semantic_consistency = 0;
  double perceptual_quality = 0;
};

struct TaskQuality {
  std::string task;
  double mean_sc = 0;
  double mean_pq = 0;
  std::size_t n = 0;

  bool operator==(const TaskQuality&) const = default;
};

struct JudgeFailure {
  std::string sample_id;
  std::string message;
};

struct JudgeSummary {
  std::vector<QualityScore> scores;  // record order
  std::vector<TaskQuality> tasks;    // sorted by task
  std::vector<JudgeFailure> failures;
  double mean_sc = 0;                // over all scored samples
  double mean_pq = 0;
};

/// Per-task and dataset means of the given scores (plain arithmetic mean).
JudgeSummary summarize_quality(std::vector<QualityScore> scores, std::vector<JudgeFailure> failures = {});

/// Scores every record that carries a thought with the judge backend, with at
/// most `parallelism` calls in flight. Per-sample failures are collected, not
/// thrown. Throws ScoringError(NothingToJudge) if no record has a thought.
JudgeSummary judge_batch(std::span<const pipeline::RunRecord> records, const bench::Manifest& manifest,
                         const bench::ImageSource& images, const gateway::BackendClient& judge,
                         std::size_t parallelism = 1);

enum class QualityMetric { SemanticConsistency, PerceptualQuality };

/// One point per task present in both inputs: x = mean judge score, y = delta.
std::vector<Point> quality_gain_points(const DeltaReport& deltas, std::span<const TaskQuality> quality,
                                       QualityMetric metric);

}  // namespace vthink::scoring
