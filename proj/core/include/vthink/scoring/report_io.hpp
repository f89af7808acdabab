#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "vthink/pipeline/record.hpp"
#include "vthink/scoring/aggregate.hpp"
#include "vthink/scoring/delta.hpp"
#include "vthink/scoring/judge.hpp"
#include "vthink/scoring/regression.hpp"

namespace vthink::scoring {

// File names inside a run or analysis directory.
inline constexpr const char* kRecordsFile = "records.jsonl";
inline constexpr const char* kScoresFile = "scores.json";
inline constexpr const char* kDeltasFile = "deltas.csv";
inline constexpr const char* kQualityFile = "quality.csv";
inline constexpr const char* kRegressionFile = "regression.json";
inline constexpr const char* kPlotDataFile = "plotdata_regression.csv";
inline constexpr const char* kPlotDataPqFile = "plotdata_regression_pq.csv";

inline constexpr int kCsvDecimals = 4;

// All writers emit "\n" line endings and fixed 4-decimal floats so that the
// same inputs give the same bytes everywhere.

void write_records(std::span<const pipeline::RunRecord> records, std::ostream& out);
std::vector<pipeline::RunRecord> read_records(std::istream& in);

std::string render_scores(const ScoreReport& report);
ScoreReport parse_scores(const std::string& text);

std::string render_deltas_csv(const DeltaReport& deltas);
std::string render_quality_csv(std::span<const TaskQuality> quality);
std::vector<TaskQuality> parse_quality_csv(std::istream& in);

/// Regression document holding both the SC and the PQ fit.
std::string render_regression(const RegressionFit* sc, const RegressionFit* pq);

/// Columns x,y,fit,lo,hi. One row per input point, in input order.
std::string render_plot_data(std::span<const Point> points, const RegressionFit& fit);

/// Writes `content` to `path` in binary mode, creating parent directories.
void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace vthink::scoring
