#include "vthink/scoring/report_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace vthink::scoring {

namespace {

std::string f4(double v) { return format_fixed(v, kCsvDecimals); }

[[noreturn]] void bad_report(const std::string& msg) {
  throw ScoringError(ScoringErrc::BadReport, "BadReport: " + msg);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

void write_records(std::span<const pipeline::RunRecord> records, std::ostream& out) {
  for (const auto& r : records) out << pipeline::record_to_json(r).dump() << '\n';
}

std::vector<pipeline::RunRecord> read_records(std::istream& in) {
  std::vector<pipeline::RunRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      records.push_back(pipeline::record_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      bad_report(fmt::format("record line {}: {}", lineno, e.what()));
    }
  }
  return records;
}

std::string render_scores(const ScoreReport& report) { return scores_to_json(report).dump(2) + "\n"; }

ScoreReport parse_scores(const std::string& text) {
  try {
    return scores_from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    bad_report(e.what());
  }
}

std::string render_deltas_csv(const DeltaReport& deltas) {
  std::string out = "task,baseline,treatment,delta\n";
  for (const auto& d : deltas.tasks) {
    out += fmt::format("{},{},{},{}\n", d.task, f4(d.baseline), f4(d.treatment), f4(d.delta));
  }
  return out;
}

std::string render_quality_csv(std::span<const TaskQuality> quality) {
  std::string out = "task,mean_sc,mean_pq,n\n";
  for (const auto& q : quality) out += fmt::format("{},{},{},{}\n", q.task, f4(q.mean_sc), f4(q.mean_pq), q.n);
  return out;
}

std::vector<TaskQuality> parse_quality_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) bad_report("quality.csv is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "task,mean_sc,mean_pq,n") bad_report("unexpected quality.csv header: " + line);
  std::vector<TaskQuality> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_csv(line);
    if (cells.size() != 4) bad_report(fmt::format("quality.csv line {}: expected 4 columns", lineno));
    try {
      rows.push_back({cells[0], std::stod(cells[1]), std::stod(cells[2]),
                      static_cast<std::size_t>(std::stoull(cells[3]))});
    } catch (const std::logic_error&) {
      bad_report(fmt::format("quality.csv line {}: not a number", lineno));
    }
  }
  return rows;
}

std::string render_regression(const RegressionFit* sc, const RegressionFit* pq) {
  nlohmann::json doc = nlohmann::json::object();
  doc["semantic_consistency"] = sc != nullptr ? fit_to_json(*sc) : nlohmann::json(nullptr);
  doc["perceptual_quality"] = pq != nullptr ? fit_to_json(*pq) : nlohmann::json(nullptr);
  return doc.dump(2) + "\n";
}

std::string render_plot_data(std::span<const Point> points, const RegressionFit& fit) {
  std::string out = "x,y,fit,lo,hi\n";
  for (const auto& p : points) {
    auto b = fit.band_at(p.x);
    out += fmt::format("{},{},{},{},{}\n", f4(p.x), f4(p.y), f4(b.fit), f4(b.lower), f4(b.upper));
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace vthink::scoring
