#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "vthink/bench/manifest.hpp"
#include "vthink/common/error.hpp"
#include "vthink/pipeline/record.hpp"

namespace vthink::scoring {

enum class ScoringErrc { EmptyTask, MismatchedManifests, NothingToJudge, DegenerateX, TooFewPoints, BadReport };

std::string_view to_string(ScoringErrc e);

using ScoringError = CodedError<ScoringErrc>;

struct TaskAccuracy {
  std::string task;
  bench::Category category = bench::Category::Perception;
  std::size_t n = 0;
  std::size_t correct = 0;

  [[nodiscard]] double accuracy() const { return static_cast<double>(correct) / static_cast<double>(n); }
  bool operator==(const TaskAccuracy&) const = default;
};

/// Accuracy over a category or a source benchmark.
struct GroupAccuracy {
  std::string name;
  std::size_t n = 0;
  std::size_t correct = 0;

  [[nodiscard]] double accuracy() const { return static_cast<double>(correct) / static_cast<double>(n); }
  bool operator==(const GroupAccuracy&) const = default;
};

/// Two summary conventions are carried side by side:
///  - benchmark_mean: unweighted mean of per-benchmark accuracies;
///  - sample_weighted: correct / n, i.e. categories weighted by sample count.
struct ScoreReport {
  std::vector<TaskAccuracy> tasks;        // sorted by task name
  std::vector<GroupAccuracy> categories;  // fixed category order, non-empty only
  std::vector<GroupAccuracy> benchmarks;  // sorted by source name
  std::size_t n = 0;
  std::size_t correct = 0;
  std::size_t unparseable = 0;
  std::size_t errored = 0;

  [[nodiscard]] double sample_weighted() const;
  [[nodiscard]] double benchmark_mean() const;
  bool operator==(const ScoreReport&) const = default;
};

/// Scores records against the manifest. Unparseable and errored records count
/// as incorrect. Tasks with no records are left out and reported through
/// `warnings` (EmptyTask). Records for unknown samples are an error.
ScoreReport aggregate(std::span<const pipeline::RunRecord> records, const bench::Manifest& manifest,
                      std::vector<std::string>* warnings = nullptr);

/// Unweighted arithmetic mean. Throws std::invalid_argument on empty input.
double unweighted_mean(std::span<const double> values);

/// Fixed-point rendering, round-half-away-from-zero on the decimal value.
std::string format_fixed(double value, int decimals);

nlohmann::json scores_to_json(const ScoreReport& report);
ScoreReport scores_from_json(const nlohmann::json& j);

}  // namespace vthink::scoring
