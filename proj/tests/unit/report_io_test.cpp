#include <sstream>

#include <gtest/gtest.h>

#include "support/fixtures.hpp"
#include "support/rig.hpp"
#include "support/table3.hpp"
#include "vthink/scoring/aggregate.hpp"
#include "vthink/scoring/delta.hpp"
#include "vthink/scoring/judge.hpp"
#include "vthink/scoring/regression.hpp"
#include "vthink/scoring/report_io.hpp"

namespace vthink::scoring {
namespace {

TEST(ReportIo, DeltasCsv) {
  DeltaReport d;
  d.tasks = {{"counting", bench::Category::Perception, 0.6, 0.7, 0.1},
             {"maze", bench::Category::LogicReasoning, 0.5, 0.25, -0.25}};
  EXPECT_EQ(render_deltas_csv(d),
            "task,baseline,treatment,delta\n"
            "counting,0.6000,0.7000,0.1000\n"
            "maze,0.5000,0.2500,-0.2500\n");
}

TEST(ReportIo, QualityCsvRoundTrip) {
  std::vector<TaskQuality> q = {{"a", 5.12, 5.41, 3}, {"b", 7.0, 0.125, 10}};
  auto text = render_quality_csv(q);
  EXPECT_EQ(text, "task,mean_sc,mean_pq,n\na,5.1200,5.4100,3\nb,7.0000,0.1250,10\n");
  std::istringstream in(text);
  auto back = parse_quality_csv(in);
  EXPECT_EQ(back, q);
}

TEST(ReportIo, QualityCsvRejectsJunk) {
  std::istringstream empty("");
  EXPECT_THROW(parse_quality_csv(empty), ScoringError);
  std::istringstream header("task,sc\n");
  EXPECT_THROW(parse_quality_csv(header), ScoringError);
  std::istringstream cells("task,mean_sc,mean_pq,n\na,1,2\n");
  EXPECT_THROW(parse_quality_csv(cells), ScoringError);
  std::istringstream nan("task,mean_sc,mean_pq,n\na,x,2,1\n");
  EXPECT_THROW(parse_quality_csv(nan), ScoringError);
}

TEST(ReportIo, ScoresAreByteStable) {
  auto manifest = testing::table3_manifest();
  auto report = aggregate(testing::table3_records(testing::table3_row("concat"), manifest), manifest);
  auto text = render_scores(report);
  EXPECT_EQ(text.back(), '\n');
  EXPECT_EQ(text.find('\r'), std::string::npos);
  EXPECT_EQ(render_scores(parse_scores(text)), text);
  EXPECT_THROW(parse_scores("{"), ScoringError);
}

TEST(ReportIo, PlotDataFollowsInputOrder) {
  std::vector<Point> pts = {{3, 1}, {1, 0.5}, {2, 0.9}, {4, 2.1}};
  auto fit = ols_fit(pts);
  auto csv = render_plot_data(pts, fit);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "x,y,fit,lo,hi");
  std::getline(in, line);
  EXPECT_TRUE(line.starts_with("3.0000,1.0000,"));
  int rows = 1;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 4);
}

TEST(ReportIo, RegressionDocument) {
  auto fit = ols_fit(std::vector<Point>{{1, 1}, {2, 3}, {3, 2}, {4, 5}});
  auto doc = nlohmann::json::parse(render_regression(&fit, nullptr));
  EXPECT_DOUBLE_EQ(doc.at("semantic_consistency").at("slope").get<double>(), fit.slope);
  EXPECT_TRUE(doc.at("perceptual_quality").is_null());
}

TEST(ReportIo, RecordsRoundTrip) {
  testing::PipelineRig rig;
  pipeline::PipelineConfig cfg;
  cfg.strategy = pipeline::ContextStrategy::Concat;
  auto records = rig.make(cfg).run_batch(testing::synthetic_manifest(8)).records;
  records[2].error = "Timeout: gave up";
  std::stringstream buf;
  write_records(records, buf);
  auto back = read_records(buf);
  ASSERT_EQ(back.size(), records.size());
  std::stringstream again;
  write_records(back, again);
  EXPECT_EQ(again.str(), buf.str());
  EXPECT_EQ(back[2].error, records[2].error);
  std::stringstream junk("{\"sample_id\":\n");
  EXPECT_THROW(read_records(junk), ScoringError);
}

TEST(ReportIo, TextFiles) {
  testing::TempDir dir;
  auto path = dir / "nested/deeper/out.txt";
  write_text_file(path, "a\nb\n");
  EXPECT_EQ(read_text_file(path), "a\nb\n");
  EXPECT_THROW(read_text_file(dir / "missing.txt"), std::runtime_error);
}

}  // namespace
}  // namespace vthink::scoring
