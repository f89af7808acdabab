#include <atomic>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "support/fixtures.hpp"
#include "support/rig.hpp"
#include "vthink/cli.hpp"
#include "vthink/commands.hpp"
#include "vthink/scoring/aggregate.hpp"
#include "vthink/scoring/report_io.hpp"

namespace vthink::cli {
namespace {

namespace fs = std::filesystem;
using testing::read_file;
using testing::TempDir;

fs::path smoke_dir() { return testing::data_dir() / "smoke"; }
fs::path golden(const std::string& name) { return smoke_dir() / "golden" / name; }

RunConfig smoke_config(const fs::path& out, std::optional<fs::path> cache = {}) {
  ConfigLayer cli;
  cli.out = out.string();
  if (cache) cli.cache_dir = cache->string();
  return resolve(cli, load_config_file(smoke_dir() / "config.json"));
}

CommandContext quiet_context() {
  CommandContext ctx;
  ctx.retry = testing::no_wait_retry();
  return ctx;
}

/// Transport factory that refuses every call and counts how often it was asked.
struct DenyingFactory {
  std::shared_ptr<std::atomic<int>> created = std::make_shared<std::atomic<int>>(0);
  std::shared_ptr<gateway::DenyTransport> deny = std::make_shared<gateway::DenyTransport>();

  TransportFactory factory() const {
    return [created = created, deny = deny](const gateway::BackendEndpoint&) -> std::shared_ptr<gateway::Transport> {
      ++*created;
      return deny;
    };
  }
};

TEST(Run, SmokeRunMatchesGoldenFiles) {
  TempDir dir;
  auto out = dir / "run";
  EXPECT_EQ(cmd_run(smoke_config(out), quiet_context()), kExitOk);
  EXPECT_EQ(read_file(out / scoring::kScoresFile), read_file(golden("scores.json")));
  EXPECT_EQ(read_file(out / scoring::kQualityFile), read_file(golden("quality.csv")));
  EXPECT_EQ(read_file(out / kTranscriptFile), read_file(golden("transcript.jsonl")));
  std::ifstream in(out / scoring::kRecordsFile);
  EXPECT_EQ(scoring::read_records(in).size(), 12u);
}

TEST(Run, WarmCacheGivesIdenticalScores) {
  TempDir dir;
  auto cache = dir / "cache";
  ASSERT_EQ(cmd_run(smoke_config(dir / "cold", cache), quiet_context()), kExitOk);
  ASSERT_EQ(cmd_run(smoke_config(dir / "warm", cache), quiet_context()), kExitOk);
  EXPECT_EQ(read_file(dir / "warm" / scoring::kScoresFile), read_file(dir / "cold" / scoring::kScoresFile));
  std::ifstream in(dir / "warm" / scoring::kRecordsFile);
  for (const auto& r : scoring::read_records(in)) EXPECT_TRUE(r.cache_hit) << r.sample_id;
}

TEST(Run, BaselineWithJudgeSkipsQuality) {
  TempDir dir;
  auto out = dir / "run";
  auto config = smoke_config(out);
  config.strategy = pipeline::ContextStrategy::Baseline;
  ASSERT_FALSE(config.judge_backend.empty());
  EXPECT_EQ(cmd_run(config, quiet_context()), kExitOk);
  EXPECT_TRUE(fs::exists(out / scoring::kScoresFile));
  EXPECT_FALSE(fs::exists(out / scoring::kQualityFile));
}

TEST(Run, UnknownEndpointFailsBeforeAnythingIsWritten) {
  TempDir dir;
  auto out = dir / "run";
  auto config = smoke_config(out);
  config.understand_backend = "no-such-backend";
  DenyingFactory deny;
  auto ctx = quiet_context();
  ctx.transport = deny.factory();
  try {
    cmd_run(config, ctx);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.code(), ConfigErrc::UnknownEndpoint);
  }
  EXPECT_FALSE(fs::exists(out));
  EXPECT_EQ(deny.deny->attempts(), 0);

  std::ostringstream err;
  auto code = run_cli({"--config", (smoke_dir() / "config.json").string(), "--out", out.string(), "run",
                       "--understand-backend", "no-such-backend"},
                      ctx, err);
  EXPECT_EQ(code, kExitError);
  EXPECT_NE(err.str().find("no-such-backend"), std::string::npos);
  EXPECT_FALSE(fs::exists(out));
}

TEST(Run, BackendFailuresGivePartialExit) {
  TempDir dir;
  testing::write_file(dir / "endpoints.jsonl",
                      R"({"id":"m","url":"mock://stamp?fail_samples=smoke-03","capabilities":["edit","understand"],"max_retries":1})"
                      "\n");
  ConfigLayer cli;
  cli.manifest = (smoke_dir() / "manifest.jsonl").string();
  cli.endpoints = (dir / "endpoints.jsonl").string();
  cli.out = (dir / "run").string();
  cli.strategy = "replace";
  auto manifest = bench::parse_manifest(smoke_dir() / "manifest.jsonl");
  bool has_victim = manifest.find("smoke-03") != nullptr;
  int code = cmd_run(resolve(cli, {}), quiet_context());
  EXPECT_EQ(code, has_victim ? kExitPartial : kExitOk);
  EXPECT_TRUE(fs::exists(dir / "run" / scoring::kScoresFile));
}

TEST(Replay, GoldenTranscriptIsByteIdenticalOffline) {
  TempDir dir;
  DenyingFactory deny;
  auto ctx = quiet_context();
  ctx.transport = deny.factory();
  EXPECT_EQ(cmd_replay(golden("transcript.jsonl"), dir / "replay", ctx), kExitOk);
  EXPECT_EQ(read_file(dir / "replay" / scoring::kScoresFile), read_file(golden("scores.json")));
  EXPECT_EQ(read_file(dir / "replay" / scoring::kQualityFile), read_file(golden("quality.csv")));
  EXPECT_EQ(deny.deny->attempts(), 0);
}

TEST(Replay, RunAndReplayAgreeOnEveryReportFile) {
  TempDir dir;
  auto cache = dir / "cache";
  ASSERT_EQ(cmd_run(smoke_config(dir / "cold", cache), quiet_context()), kExitOk);
  ASSERT_EQ(cmd_run(smoke_config(dir / "warm", cache), quiet_context()), kExitOk);
  for (const char* run : {"cold", "warm"}) {
    auto replay = dir / (std::string(run) + "-replay");
    ASSERT_EQ(cmd_replay(dir / run / kTranscriptFile, replay, quiet_context()), kExitOk);
    for (const char* f : {scoring::kScoresFile, scoring::kQualityFile, kManifestCopyFile}) {
      EXPECT_EQ(read_file(replay / f), read_file(dir / run / f)) << run << " " << f;
    }
  }
}

TEST(Replay, TruncatedTranscriptNamesFirstMissingSample) {
  TempDir dir;
  std::istringstream in(read_file(golden("transcript.jsonl")));
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  int ends_seen = 0;
  std::string victim;
  std::string truncated;
  for (const auto& line : lines) {
    auto j = nlohmann::json::parse(line);
    if (j.value("kind", "") == "end" && ++ends_seen == 5) {
      victim = j.at("sample_id").get<std::string>();
      break;
    }
    truncated += line + "\n";
  }
  ASSERT_FALSE(victim.empty());
  testing::write_file(dir / "cut.jsonl", truncated);
  try {
    cmd_replay(dir / "cut.jsonl", dir / "replay", quiet_context());
    FAIL();
  } catch (const gateway::TranscriptError& e) {
    EXPECT_EQ(e.code(), gateway::TranscriptErrc::TranscriptIncomplete);
    EXPECT_NE(std::string(e.what()).find(victim), std::string::npos) << e.what();
  }
}

scoring::ScoreReport three_tasks(std::size_t a, std::size_t b, std::size_t c) {
  scoring::ScoreReport r;
  r.tasks = {{"alpha", bench::Category::Perception, 20, a},
             {"beta", bench::Category::LogicReasoning, 20, b},
             {"gamma", bench::Category::SpatialReasoning, 20, c}};
  r.categories = {{"Perception", 20, a}, {"LogicReasoning", 20, b}, {"SpatialReasoning", 20, c}};
  r.benchmarks = {{"B", 60, a + b + c}};
  r.n = 60;
  r.correct = a + b + c;
  return r;
}

TEST(Analyze, HandComputedDeltas) {
  TempDir dir;
  scoring::write_text_file(dir / "t" / scoring::kScoresFile, scoring::render_scores(three_tasks(12, 10, 15)));
  scoring::write_text_file(dir / "b" / scoring::kScoresFile, scoring::render_scores(three_tasks(10, 11, 15)));
  EXPECT_EQ(cmd_analyze({dir / "t", dir / "b", {}, false}, quiet_context()), kExitOk);
  EXPECT_EQ(read_file(dir / "t" / scoring::kDeltasFile),
            "task,baseline,treatment,delta\n"
            "alpha,0.5000,0.6000,0.1000\n"
            "beta,0.5500,0.5000,-0.0500\n"
            "gamma,0.7500,0.7500,0.0000\n");

  EXPECT_EQ(cmd_analyze({dir / "t", dir / "t", dir / "self", false}, quiet_context()), kExitOk);
  std::istringstream self(read_file(dir / "self" / scoring::kDeltasFile));
  std::string line;
  std::getline(self, line);
  while (std::getline(self, line)) EXPECT_TRUE(line.ends_with(",0.0000")) << line;
}

TEST(Analyze, RegressionOutputs) {
  TempDir dir;
  scoring::write_text_file(dir / "t" / scoring::kScoresFile, scoring::render_scores(three_tasks(12, 10, 15)));
  scoring::write_text_file(dir / "b" / scoring::kScoresFile, scoring::render_scores(three_tasks(10, 11, 15)));
  try {
    cmd_analyze({dir / "t", dir / "b", {}, true}, quiet_context());
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.code(), ConfigErrc::FileNotFound);
    EXPECT_NE(std::string(e.what()).find("quality.csv"), std::string::npos);
  }
  EXPECT_FALSE(fs::exists(dir / "t" / scoring::kDeltasFile));

  scoring::write_text_file(dir / "t" / scoring::kQualityFile,
                           "task,mean_sc,mean_pq,n\nalpha,7.0000,6.0000,20\nbeta,3.0000,4.0000,20\ngamma,5.0000,5.5000,20\n");
  EXPECT_EQ(cmd_analyze({dir / "t", dir / "b", {}, true}, quiet_context()), kExitOk);
  auto doc = nlohmann::json::parse(read_file(dir / "t" / scoring::kRegressionFile));
  // SC points (7, .1), (3, -.05), (5, 0): slope = Sxy / Sxx = 0.3 / 8.
  EXPECT_NEAR(doc.at("semantic_consistency").at("slope").get<double>(), 0.0375, 1e-12);
  EXPECT_TRUE(read_file(dir / "t" / scoring::kPlotDataFile).starts_with("x,y,fit,lo,hi\n"));
  EXPECT_TRUE(fs::exists(dir / "t" / scoring::kPlotDataPqFile));
}

TEST(Report, RendersAccuracyTable) {
  TempDir dir;
  scoring::write_text_file(dir / "concat" / scoring::kScoresFile, scoring::render_scores(three_tasks(12, 10, 15)));
  scoring::write_text_file(dir / "base" / scoring::kScoresFile, scoring::render_scores(three_tasks(10, 11, 15)));
  auto text = render_report({dir / "base", dir / "concat"});
  EXPECT_NE(text.find("RUN"), std::string::npos);
  EXPECT_NE(text.find("AVG"), std::string::npos);
  std::istringstream in(text);
  std::string line;
  bool saw_base = false, saw_concat = false;
  while (std::getline(in, line)) {
    if (line.starts_with("base ") && !saw_base) {
      saw_base = true;
      EXPECT_TRUE(line.ends_with("60.0")) << line;
    }
    if (line.starts_with("concat ") && !saw_concat) {
      saw_concat = true;
      EXPECT_TRUE(line.ends_with("61.7")) << line;
    }
  }
  EXPECT_TRUE(saw_base && saw_concat);
  EXPECT_THROW(render_report({dir / "absent"}), Error);
}

TEST(WritePrompts, OneInstructionPerSample) {
  TempDir dir;
  auto config = smoke_config(dir / "prompts");
  EXPECT_EQ(cmd_write_prompts(config, quiet_context()), kExitOk);
  std::istringstream in(read_file(dir / "prompts" / kPromptsFile));
  std::size_t n = 0;
  for (std::string line; std::getline(in, line); ++n) {
    auto j = nlohmann::json::parse(line);
    EXPECT_TRUE(j.contains("sample_id"));
  }
  EXPECT_EQ(n, 12u);
}

TEST(Score, RescoresARunDirectory) {
  TempDir dir;
  auto out = dir / "run";
  ASSERT_EQ(cmd_run(smoke_config(out), quiet_context()), kExitOk);
  auto original = read_file(out / scoring::kScoresFile);
  fs::remove(out / scoring::kScoresFile);
  EXPECT_EQ(cmd_score(out, quiet_context()), kExitOk);
  EXPECT_EQ(read_file(out / scoring::kScoresFile), original);
}

}  // namespace
}  // namespace vthink::cli
