// Acceptance suite: one PASS/FAIL line per primary criterion.

#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "support/fixtures.hpp"
#include "support/ols_oracle.hpp"
#include "support/rig.hpp"
#include "support/table3.hpp"
#include "vthink/commands.hpp"
#include "vthink/config.hpp"
#include "vthink/pipeline/cache.hpp"
#include "vthink/scoring/aggregate.hpp"
#include "vthink/scoring/regression.hpp"
#include "vthink/scoring/report_io.hpp"
#include "vthink/scoring/stats.hpp"
#include "vthink/writer/prompt_writer.hpp"

namespace {

namespace fs = std::filesystem;
using namespace vthink;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, std::string what) {
    if (!ok) pass = false;
    notes.push_back((ok ? "" : "!") + std::move(what));
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

gateway::RetryPolicy no_wait() { return testing::no_wait_retry(); }

struct Denied {
  std::shared_ptr<gateway::DenyTransport> deny = std::make_shared<gateway::DenyTransport>();
  std::shared_ptr<std::atomic<int>> created = std::make_shared<std::atomic<int>>(0);

  cli::CommandContext context() const {
    cli::CommandContext ctx;
    ctx.retry = no_wait();
    ctx.transport = [d = deny, c = created](const gateway::BackendEndpoint&) -> std::shared_ptr<gateway::Transport> {
      ++*c;
      return d;
    };
    return ctx;
  }
};

// ---------------------------------------------------------------------------

std::string avg_cell(const std::string& report, const std::string& label) {
  std::istringstream in(report);
  for (std::string line; std::getline(in, line);) {
    if (!line.starts_with(label + " ")) continue;
    auto pos = line.find_last_of(' ');
    return line.substr(pos + 1);
  }
  return "<missing>";
}

Verdict table3_aggregation() {
  Verdict v;
  const std::array<std::string, 3> rows = {"baseline", "concat", "gpt-writer"};

  auto t0 = Clock::now();
  auto manifest = testing::table3_manifest();
  for (const auto& name : rows) {
    const auto& row = testing::table3_row(name);
    std::array<double, 3> acc = {row.r_bench, row.hallbench, row.mmstar};
    auto direct = scoring::format_fixed(scoring::unweighted_mean(acc), 1);
    auto report = scoring::aggregate(testing::table3_records(row, manifest), manifest);
    auto aggregated = scoring::format_fixed(100.0 * report.benchmark_mean(), 1);
    v.check(direct == row.avg && aggregated == row.avg,
            fmt::format("{}: mean {} aggregate {} expected {}", name, direct, aggregated, row.avg));
  }
  double aggregate_s = seconds_since(t0);
  v.check(aggregate_s < 1.0, fmt::format("aggregation {:.3f}s", aggregate_s));

  // The same numbers through recorded transcripts replayed with the network denied.
  testing::TempDir dir;
  auto manifest_path = testing::write_table3_inputs(dir.path(), manifest);
  testing::write_file(dir / "endpoints.jsonl",
                      R"({"id":"table3","url":"mock://table3","capabilities":["edit","understand"]})" "\n");
  std::vector<fs::path> replays;
  Denied denied;
  for (const auto& name : rows) {
    const auto& row = testing::table3_row(name);
    auto mock = std::make_shared<gateway::MockBackend>();
    mock->on(gateway::kEditRoute, gateway::mock::stamp_edit())
        .on(gateway::kUnderstandRoute, gateway::mock::scripted_understand(testing::table3_answers(row, manifest)));
    cli::CommandContext live;
    live.retry = no_wait();
    live.transport = [mock](const gateway::BackendEndpoint&) { return mock; };

    cli::RunConfig config;
    config.manifest = manifest_path;
    config.data_root = dir.path();
    config.endpoints = dir / "endpoints.jsonl";
    config.out = dir / "runs" / name;
    config.strategy = name == "baseline" ? pipeline::ContextStrategy::Baseline : pipeline::ContextStrategy::Concat;
    config.parallelism = 8;
    int code = cli::cmd_run(config, live);
    auto replay = dir / "replays" / name;
    int replay_code = cli::cmd_replay(config.out / cli::kTranscriptFile, replay, denied.context());
    v.check(code == cli::kExitOk && replay_code == cli::kExitOk, fmt::format("{}: run {} replay {}", name, code, replay_code));
    replays.push_back(replay);
  }
  auto report = cli::render_report(replays);
  for (const auto& name : rows) {
    auto cell = avg_cell(report, name);
    v.check(cell == testing::table3_row(name).avg, fmt::format("replayed report AVG {}={}", name, cell));
  }
  v.check(denied.deny->attempts() == 0, fmt::format("network calls during replay {}", denied.deny->attempts()));
  return v;
}

Verdict degenerate_equivalence() {
  Verdict v;
  auto t0 = Clock::now();
  auto mock = std::make_shared<gateway::MockBackend>();
  mock->on(gateway::kEditRoute, gateway::mock::identity_edit())
      .on(gateway::kUnderstandRoute, gateway::mock::hashed_understand());
  testing::PipelineRig rig(mock);
  auto manifest = testing::synthetic_manifest(100, 6);
  pipeline::PipelineConfig base;
  auto baseline = rig.make(base).run_batch(manifest);
  for (auto s : {pipeline::ContextStrategy::Concat, pipeline::ContextStrategy::Replace}) {
    pipeline::PipelineConfig cfg;
    cfg.strategy = s;
    cfg.parallelism = 4;
    auto treated = rig.make(cfg).run_batch(manifest);
    std::size_t same = 0;
    for (std::size_t i = 0; i < manifest.size(); ++i) {
      const auto& a = treated.records[i];
      const auto& b = baseline.records[i];
      same += (!a.errored() && !b.errored() && a.extraction == b.extraction && a.thought) ? 1 : 0;
    }
    v.check(same == 100, fmt::format("{} {}/100", pipeline::to_string(s), same));
  }
  double s = seconds_since(t0);
  v.check(s < 10.0, fmt::format("{:.2f}s", s));
  return v;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

Verdict ols_oracle() {
  Verdict v;
  auto t0 = Clock::now();
  std::vector<scoring::Point> line;
  for (int i = 1; i <= 10; ++i) line.push_back({double(i), 2.0 * i + 1.0});
  auto perfect = scoring::ols_fit(line);
  v.check(std::abs(perfect.slope - 2) <= 1e-12 && std::abs(perfect.intercept - 1) <= 1e-12 &&
              std::abs(perfect.r_squared - 1) <= 1e-12,
          fmt::format("perfect line slope {:.15g} intercept {:.15g} R2 {:.15g}", perfect.slope,
                      perfect.intercept, perfect.r_squared));

  std::mt19937 rng(20240611);
  std::uniform_int_distribution<int> size(5, 50);
  std::uniform_real_distribution<double> xs(-5.0, 15.0), slope(-2.0, 2.0);
  std::normal_distribution<double> noise(0.0, 1.5);
  double worst = 0;
  for (int k = 0; k < 20; ++k) {
    int n = size(rng);
    double b = slope(rng);
    std::vector<double> x(n), y(n);
    std::vector<scoring::Point> pts;
    for (int i = 0; i < n; ++i) {
      x[i] = xs(rng);
      y[i] = 1.0 + b * x[i] + noise(rng);
      pts.push_back({x[i], y[i]});
    }
    auto fit = scoring::ols_fit(pts);
    auto o = testing::oracle_ols(x, y);
    for (double e : {rel(fit.slope, o.slope), rel(fit.intercept, o.intercept), rel(fit.r_squared, o.r_squared),
                     rel(fit.p_value, o.p_value)}) {
      worst = std::max(worst, e);
    }
  }
  v.check(worst <= 1e-9, fmt::format("20 random sets worst rel err {:.2e}", worst));

  double worst_t = 0;
  for (const auto& row : testing::tabulated_t_cdf()) {
    worst_t = std::max(worst_t, std::abs(scoring::stats::student_t_cdf(row.t, row.df) - row.cdf));
  }
  v.check(worst_t <= 1e-6, fmt::format("t-CDF df 3/10/30 worst abs err {:.2e}", worst_t));
  double s = seconds_since(t0);
  v.check(s < 5.0, fmt::format("{:.3f}s", s));
  return v;
}

Verdict leakage_filters() {
  Verdict v;
  auto t0 = Clock::now();
  const std::vector<std::string> words = {"crimson",  "turquoise", "giraffe",   "saxophone", "lighthouse",
                                          "pelican",  "cathedral", "marmalade", "tricycle",  "volcano",
                                          "harpsichord", "flamingo", "porcupine", "zeppelin", "accordion",
                                          "igloo",    "kangaroo",  "lantern",   "mahogany",  "nectarine"};
  const std::vector<std::string> clean = {
      "Zoom into the central region and sharpen fine details.",
      "Increase the contrast of the whole image.",
      "Deblur the image and enhance edge definition.",
      "Brighten the dark areas while keeping highlights intact.",
      "Remove the background clutter around the main subject.",
      "Outpaint the borders to reveal more surrounding context.",
      "Denoise the image and restore natural texture.",
      "Enlarge the upper left quadrant and increase its resolution.",
      "Highlight the boundaries between adjacent regions.",
      "Straighten the perspective so parallel lines stay parallel."};
  const std::vector<std::function<std::string(const std::string&)>> embed = {
      [](const std::string& w) { return "Zoom in on the " + w + " and sharpen it."; },
      [](const std::string& w) { return "Highlight the " + fmt::format("{}", w) + "!"; },
      [](const std::string& w) {
        std::string up = w;
        for (auto& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        return "Enhance everything around the " + up + ", please.";
      },
      [](const std::string& w) { return "Crop to the " + w.substr(0, 1) + w.substr(1) + "-shaped area."; },
      [](const std::string& w) { return "Deblur. The answer is: " + w; },
  };

  int adversarial_rejected = 0, clean_rejected = 0;
  for (int i = 0; i < 50; ++i) {
    auto s = testing::mc_sample(fmt::format("leak-{:02}", i), "counting", bench::Category::Perception, "MME", i % 4);
    for (int o = 0; o < 4; ++o) s.options[o].text = words[(i + 5 * o) % words.size()];
    const auto& gold_text = s.options[i % 4].text;
    auto adversarial = embed[i % embed.size()](gold_text);
    adversarial_rejected += writer::filter_leakage(adversarial, s).pass ? 0 : 1;
    clean_rejected += writer::filter_leakage(clean[i % clean.size()], s).pass ? 0 : 1;
  }
  v.check(adversarial_rejected == 50, fmt::format("adversarial {}/50 rejected", adversarial_rejected));
  v.check(clean_rejected == 0, fmt::format("clean {}/50 rejected", clean_rejected));

  auto demos = writer::load_demonstrations(testing::data_dir() / "smoke" / "demos.jsonl");
  writer::WriterConfig cfg;
  int echoes_rejected = 0;
  double min_overlap = 1.0;
  for (const auto& d : demos) {
    auto r = writer::filter_diversity(d.prompt, demos, cfg);
    echoes_rejected += r.pass ? 0 : 1;
    min_overlap = std::min(min_overlap, r.overlap);
  }
  v.check(echoes_rejected == static_cast<int>(demos.size()) && min_overlap == 1.0,
          fmt::format("demonstration echoes {}/{} rejected at {} (Jaccard {})", echoes_rejected, demos.size(),
                      cfg.diversity_threshold, min_overlap));
  double s = seconds_since(t0);
  v.check(s < 1.0, fmt::format("{:.3f}s", s));
  return v;
}

Verdict cache_determinism() {
  Verdict v;
  auto t0 = Clock::now();
  testing::TempDir dir;
  pipeline::ThoughtCache cache(dir / "cache");
  testing::PipelineRig rig;
  auto manifest = testing::synthetic_manifest(60, 6);
  pipeline::PipelineConfig cfg;
  cfg.strategy = pipeline::ContextStrategy::Concat;
  cfg.parallelism = 8;
  auto pipe = rig.make(cfg, &cache);

  auto cold = pipe.run_batch(manifest);
  auto cold_scores = scoring::render_scores(scoring::aggregate(cold.records, manifest));
  int cold_edits = rig.mock->calls(gateway::kEditRoute);
  rig.mock->reset_counters();
  auto warm = pipe.run_batch(manifest);
  auto warm_scores = scoring::render_scores(scoring::aggregate(warm.records, manifest));
  int warm_edits = rig.mock->calls(gateway::kEditRoute);
  v.check(cold_edits == 60 && warm_edits == 0, fmt::format("edit calls cold {} warm {}", cold_edits, warm_edits));
  v.check(cold_scores == warm_scores, "scores.json byte-identical");

  const auto& key = cold.records[7].thought->cache_key;
  auto bytes = testing::read_file(cache.image_path(key));
  bytes[bytes.size() / 2] ^= 0x01;
  testing::write_file(cache.image_path(key), bytes);
  bool detected = cache.lookup(key).status == pipeline::LookupStatus::Corrupt;
  rig.mock->reset_counters();
  auto healed = pipe.run_batch(manifest);
  int heal_edits = rig.mock->calls(gateway::kEditRoute);
  bool restored = cache.lookup(key).status == pipeline::LookupStatus::Hit;
  auto healed_scores = scoring::render_scores(scoring::aggregate(healed.records, manifest));
  v.check(detected && heal_edits == 1 && restored && healed_scores == cold_scores,
          fmt::format("tamper detected {} regenerated with {} edit call(s), entry restored {}", detected,
                      heal_edits, restored));
  double s = seconds_since(t0);
  v.check(s < 10.0, fmt::format("{:.2f}s", s));
  return v;
}

Verdict concurrency_contract() {
  Verdict v;
  auto t0 = Clock::now();
  auto manifest = testing::synthetic_manifest(200, 8);
  auto run = [&](std::size_t p, std::chrono::milliseconds latency, pipeline::ContextStrategy s,
                 int* max_in_flight) {
    testing::PipelineRig rig;
    rig.mock->set_latency(latency);
    pipeline::PipelineConfig cfg;
    cfg.strategy = s;
    cfg.parallelism = p;
    auto start = Clock::now();
    auto result = rig.make(cfg).run_batch(manifest);
    double wall = seconds_since(start);
    if (max_in_flight != nullptr) *max_in_flight = rig.mock->max_in_flight();
    return std::pair{scoring::render_scores(scoring::aggregate(result.records, manifest)), wall};
  };

  int in_flight_16 = 0;
  auto serial = run(1, std::chrono::milliseconds(0), pipeline::ContextStrategy::Concat, nullptr);
  auto wide = run(16, std::chrono::milliseconds(0), pipeline::ContextStrategy::Concat, &in_flight_16);
  v.check(serial.first == wide.first, "parallelism 16 report identical to parallelism 1");

  int in_flight_latency = 0;
  auto slow_serial = run(1, std::chrono::milliseconds(50), pipeline::ContextStrategy::Baseline, nullptr);
  auto slow_wide = run(16, std::chrono::milliseconds(50), pipeline::ContextStrategy::Baseline, &in_flight_latency);
  double ratio = slow_wide.second / slow_serial.second;
  v.check(ratio <= 0.25, fmt::format("50ms latency wall {:.2f}s vs serial {:.2f}s ({:.1f}%)", slow_wide.second,
                                     slow_serial.second, 100 * ratio));
  v.check(slow_wide.first == slow_serial.first, "latency runs agree");
  int peak = std::max(in_flight_16, in_flight_latency);
  v.check(peak <= 16 && peak > 1, fmt::format("max in-flight {}", peak));
  double s = seconds_since(t0);
  v.check(s < 30.0, fmt::format("{:.2f}s", s));
  return v;
}

Verdict manifest_shape() {
  Verdict v;
  auto t0 = Clock::now();
  auto manifest = bench::parse_manifest(testing::data_dir() / "visthink_shape.jsonl");
  auto counts = manifest.category_counts();
  auto p = counts[bench::Category::Perception];
  auto l = counts[bench::Category::LogicReasoning];
  auto sp = counts[bench::Category::SpatialReasoning];
  v.check(p == 970 && l == 317 && sp == 308 && manifest.size() == 1595,
          fmt::format("{} + {} + {} = {}", p, l, sp, manifest.size()));
  auto buckets = bench::partition_by_task(manifest).size();
  v.check(buckets == 34, fmt::format("{} task buckets", buckets));
  double s = seconds_since(t0);
  v.check(s < 2.0, fmt::format("{:.3f}s", s));
  return v;
}

Verdict transcript_replay() {
  Verdict v;
  testing::TempDir dir;
  auto smoke = testing::data_dir() / "smoke";
  Denied denied;
  int code = cli::cmd_replay(smoke / "golden" / cli::kTranscriptFile, dir / "replay", denied.context());
  v.check(code == cli::kExitOk, fmt::format("replay exit {}", code));
  for (const char* f : {scoring::kScoresFile, scoring::kQualityFile}) {
    bool same = testing::read_file(dir / "replay" / f) == testing::read_file(smoke / "golden" / f);
    v.check(same, fmt::format("{} byte-identical", f));
  }
  std::ostringstream manifest_copy;
  bench::serialize_manifest(bench::parse_manifest(smoke / "manifest.jsonl"), manifest_copy);
  v.check(testing::read_file(dir / "replay" / cli::kManifestCopyFile) == manifest_copy.str(),
          "manifest.jsonl byte-identical");
  v.check(denied.deny->attempts() == 0, fmt::format("network calls {}", denied.deny->attempts()));
  return v;
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::err);
  struct Criterion {
    const char* name;
    Verdict (*run)();
  };
  const Criterion criteria[] = {
      {"table3-aggregation", table3_aggregation},   {"degenerate-equivalence", degenerate_equivalence},
      {"ols-oracle", ols_oracle},                   {"leakage-diversity-filters", leakage_filters},
      {"cache-determinism", cache_determinism},     {"concurrency-contract", concurrency_contract},
      {"manifest-shape", manifest_shape},           {"transcript-replay", transcript_replay},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.check(false, std::string("exception: ") + e.what());
    }
    std::string notes;
    for (const auto& n : v.notes) notes += (notes.empty() ? "" : "; ") + n;
    std::cout << (v.pass ? "PASS " : "FAIL ") << c.name << " :: " << notes << std::endl;
    failed += v.pass ? 0 : 1;
  }
  std::cout << fmt::format("{} of {} criteria passed", std::size(criteria) - failed, std::size(criteria)) << std::endl;
  return failed == 0 ? 0 : 1;
}
