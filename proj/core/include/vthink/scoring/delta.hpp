#pragma once

#include <string>
#include <vector>

#include "vthink/scoring/aggregate.hpp"

namespace vthink::scoring {

struct TaskDelta {
  std::string task;
  bench::Category category = bench::Category::Perception;
  double baseline = 0;
  double treatment = 0;
  double delta = 0;  // treatment - baseline, as a fraction
};

struct CategoryDelta {
  bench::Category category = bench::Category::Perception;
  double mean_delta = 0;  // unweighted over the category's tasks
  std::size_t tasks = 0;
};

struct DeltaReport {
  std::vector<TaskDelta> tasks;
  std::vector<CategoryDelta> categories;
  double overall_mean = 0;  // unweighted over tasks
};

/// Per-task accuracy change of a treatment run relative to a baseline run.
/// Both runs must cover the same tasks with the same sample counts, otherwise
/// ScoringError(MismatchedManifests).
DeltaReport compute_delta(const ScoreReport& treatment, const ScoreReport& baseline);

}  // namespace vthink::scoring
