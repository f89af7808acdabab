#include "vthink/commands.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "vthink/bench/image_store.hpp"
#include "vthink/bench/manifest.hpp"
#include "vthink/gateway/mock.hpp"
#include "vthink/pipeline/cache.hpp"
#include "vthink/pipeline/engine.hpp"
#include "vthink/prompts/library.hpp"
#include "vthink/scoring/aggregate.hpp"
#include "vthink/scoring/delta.hpp"
#include "vthink/scoring/judge.hpp"
#include "vthink/scoring/regression.hpp"
#include "vthink/scoring/report_io.hpp"
#include "vthink/writer/prompt_writer.hpp"

namespace vthink::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::shared_ptr<gateway::Transport> default_transport(const gateway::BackendEndpoint& endpoint) {
  if (endpoint.base_url.starts_with("mock://")) return gateway::mock::from_url(endpoint.base_url);
  return std::make_shared<gateway::HttpTransport>();
}

namespace {

constexpr int kTranscriptFormat = 1;

[[noreturn]] void missing_file(const fs::path& path, std::string_view what) {
  throw ConfigError(ConfigErrc::FileNotFound,
                    fmt::format("ConfigError(FileNotFound): {} not found: {}", what, path.string()));
}

void require_file(const fs::path& path, std::string_view what) {
  if (path.empty()) {
    throw ConfigError(ConfigErrc::MissingValue, fmt::format("ConfigError(MissingValue): no {} given", what));
  }
  if (!fs::is_regular_file(path)) missing_file(path, what);
}

void say(const CommandContext& ctx, const std::string& line) {
  if (ctx.out != nullptr) *ctx.out << line << '\n';
}

std::string serialize(const bench::Manifest& manifest) {
  std::ostringstream ss;
  bench::serialize_manifest(manifest, ss);
  return ss.str();
}

std::string serialize(const std::vector<pipeline::RunRecord>& records) {
  std::ostringstream ss;
  scoring::write_records(records, ss);
  return ss.str();
}

bench::Manifest read_manifest_copy(const fs::path& dir) {
  auto path = dir / kManifestCopyFile;
  if (!fs::is_regular_file(path)) missing_file(path, "manifest copy");
  return bench::parse_manifest(path);
}

std::vector<pipeline::RunRecord> read_run_records(const fs::path& dir) {
  auto path = dir / scoring::kRecordsFile;
  std::ifstream in(path, std::ios::binary);
  if (!in) missing_file(path, "records file");
  return scoring::read_records(in);
}

scoring::ScoreReport read_scores(const fs::path& dir) {
  auto path = dir / scoring::kScoresFile;
  if (!fs::is_regular_file(path)) missing_file(path, "scores file");
  return scoring::parse_scores(scoring::read_text_file(path));
}

json demos_to_json(const std::vector<writer::Demonstration>& demos) {
  json arr = json::array();
  for (const auto& d : demos) arr.push_back({{"image", d.image_ref}, {"question", d.question}, {"prompt", d.prompt}});
  return arr;
}

std::vector<writer::Demonstration> demos_from_json(const json& arr) {
  std::vector<writer::Demonstration> demos;
  for (const auto& d : arr) {
    demos.push_back({d.at("image").get<std::string>(), d.at("question").get<std::string>(),
                     d.at("prompt").get<std::string>()});
  }
  return demos;
}

std::vector<writer::Demonstration> load_demos_for(const RunConfig& config) {
  if (!config.demos) return {};
  require_file(*config.demos, "demonstration file");
  return writer::load_demonstrations(*config.demos);
}

prompts::PromptLibrary load_library(const RunConfig& config) {
  if (!config.prompt_table) return prompts::PromptLibrary::builtin();
  require_file(*config.prompt_table, "prompt table");
  return prompts::PromptLibrary::load(*config.prompt_table);
}

/// Checks the parts of the configuration that need the filesystem. Nothing is
/// written and no backend is contacted before this passes.
EndpointSelection preflight(const RunConfig& config) {
  require_file(config.manifest, "manifest");
  if (config.out.empty()) {
    throw ConfigError(ConfigErrc::MissingValue, "ConfigError(MissingValue): no output directory given (--out)");
  }
  auto table = load_endpoints(config.endpoints);
  auto selection = select_endpoints(config, table);
  if (pipeline::needs_thought(config.strategy) && config.writer_mode == pipeline::WriterMode::Auto) {
    if (!config.demos) {
      throw ConfigError(ConfigErrc::MissingValue,
                        "ConfigError(MissingValue): writer mode 'auto' needs a demonstration file (--demos)");
    }
  }
  return selection;
}

/// One client per endpoint role; endpoints shared between roles share a transport.
struct Clients {
  std::map<std::string, std::shared_ptr<gateway::Transport>> transports;
  std::optional<gateway::BackendClient> understand;
  std::optional<gateway::BackendClient> edit;
  std::optional<gateway::BackendClient> writer;
  std::optional<gateway::BackendClient> judge;

  pipeline::Backends backends() const {
    return {understand ? &*understand : nullptr, edit ? &*edit : nullptr, writer ? &*writer : nullptr};
  }
};

Clients make_clients(const EndpointSelection& s, const gateway::RetryPolicy& retry,
                     const std::function<std::shared_ptr<gateway::Transport>(const gateway::BackendEndpoint&)>& make) {
  Clients c;
  auto transport_for = [&](const gateway::BackendEndpoint& e) {
    auto& slot = c.transports[e.id];
    if (!slot) slot = make(e);
    return slot;
  };
  c.understand.emplace(s.understand, transport_for(s.understand), retry);
  if (s.edit) c.edit.emplace(*s.edit, transport_for(*s.edit), retry);
  if (s.writer) c.writer.emplace(*s.writer, transport_for(*s.writer), retry);
  if (s.judge) c.judge.emplace(*s.judge, transport_for(*s.judge), retry);
  return c;
}

/// Logs cache hits as edit exchanges so a replay sees the same responses,
/// and closes each sample's transcript block.
class TranscriptObserver final : public pipeline::PipelineObserver {
 public:
  explicit TranscriptObserver(std::shared_ptr<gateway::TranscriptLog> log) : log_(std::move(log)) {}

  void on_cache_hit(const bench::Sample& sample, const gateway::EditResponse& response) override {
    gateway::TranscriptEntry e;
    e.sample_id = sample.sample_id;
    e.route = std::string(gateway::kEditRoute);
    e.attempt = log_->next_attempt(sample.sample_id, e.route);
    e.status = 200;
    e.body = gateway::encode(response).dump();
    e.cached = true;
    log_->append(std::move(e));
  }

  void on_sample_done(const pipeline::RunRecord& record) override {
    log_->finish(record.sample_id, {!record.errored(), record.error.value_or("")});
  }

 private:
  std::shared_ptr<gateway::TranscriptLog> log_;
};

struct Reports {
  std::string records;
  std::string scores;
  std::optional<std::string> quality;
  std::size_t failed = 0;
  std::size_t judge_failures = 0;
};

Reports build_reports(const std::vector<pipeline::RunRecord>& records, const bench::Manifest& manifest,
                      const bench::ImageSource& images, const gateway::BackendClient* judge,
                      std::size_t parallelism) {
  Reports r;
  r.records = serialize(records);
  std::vector<std::string> warnings;
  auto scores = scoring::aggregate(records, manifest, &warnings);
  for (const auto& w : warnings) spdlog::warn("{}", w);
  r.scores = scoring::render_scores(scores);
  bool any_thought = std::any_of(records.begin(), records.end(),
                                 [](const auto& rec) { return rec.thought && !rec.thought->image.empty(); });
  if (judge != nullptr && !any_thought) spdlog::info("no visual thoughts to judge, skipping quality.csv");
  if (judge != nullptr && any_thought) {
    auto quality = scoring::judge_batch(records, manifest, images, *judge, parallelism);
    for (const auto& f : quality.failures) spdlog::warn("judge failed for sample '{}': {}", f.sample_id, f.message);
    r.judge_failures = quality.failures.size();
    r.quality = scoring::render_quality_csv(quality.tasks);
  }
  for (const auto& rec : records) r.failed += rec.errored() ? 1 : 0;
  return r;
}

void write_reports(const fs::path& dir, const bench::Manifest& manifest, const Reports& r) {
  scoring::write_text_file(dir / kManifestCopyFile, serialize(manifest));
  scoring::write_text_file(dir / scoring::kRecordsFile, r.records);
  scoring::write_text_file(dir / scoring::kScoresFile, r.scores);
  if (r.quality) scoring::write_text_file(dir / scoring::kQualityFile, *r.quality);
}

json endpoint_or_null(const std::optional<gateway::BackendEndpoint>& e) {
  return e ? gateway::endpoint_to_json(*e) : json(nullptr);
}

}  // namespace

json transcript_header(const RunConfig& config, const bench::Manifest& manifest,
                       const prompts::PromptLibrary& library, const std::vector<writer::Demonstration>& demos,
                       const EndpointSelection& endpoints) {
  json samples = json::array();
  for (const auto& s : manifest.samples()) samples.push_back(bench::sample_to_json(s));
  json table = json::array();
  for (const auto& p : library.catalog()) table.push_back(prompts::prompt_to_json(p));
  return {
      {"format", kTranscriptFormat},
      {"config",
       {{"strategy", pipeline::to_string(config.strategy)},
        {"gen", gateway::to_json(config.pipeline_config().gen)},
        {"writer", pipeline::to_string(config.writer_mode)},
        {"writer_k", config.writer.k},
        {"writer_attempts", config.writer.max_attempts},
        {"diversity_threshold", config.writer.diversity_threshold},
        {"on_edit_failure", pipeline::to_string(config.on_edit_failure)},
        {"fail_fast", config.fail_fast}}},
      {"endpoints",
       {{"understand", gateway::endpoint_to_json(endpoints.understand)},
        {"edit", endpoint_or_null(endpoints.edit)},
        {"writer", endpoint_or_null(endpoints.writer)},
        {"judge", endpoint_or_null(endpoints.judge)}}},
      {"manifest",
       {{"name", manifest.metadata().name}, {"version", manifest.metadata().version}, {"samples", samples}}},
      {"prompt_table", table},
      {"prompt_fallback", library.fallback().key},
      {"demonstrations", demos_to_json(demos)}};
}

int cmd_run(const RunConfig& config, const CommandContext& ctx) {
  auto selection = preflight(config);
  auto manifest = bench::parse_manifest(config.manifest);
  auto library = load_library(config);
  auto demos = load_demos_for(config);

  auto log = std::make_shared<gateway::TranscriptLog>();
  auto clients = make_clients(selection, ctx.retry, [&](const gateway::BackendEndpoint& e) {
    return std::make_shared<gateway::RecordingTransport>(ctx.transport(e), log);
  });

  bench::ImageStore images(config.data_root);
  std::optional<pipeline::ThoughtCache> cache;
  if (config.cache_dir) cache.emplace(*config.cache_dir);
  TranscriptObserver observer(log);

  pipeline::Pipeline pipe(config.pipeline_config(), clients.backends(),
                          {&images, &library, &demos, cache ? &*cache : nullptr, &observer});
  auto batch = pipe.run_batch(manifest);
  auto reports = build_reports(batch.records, manifest, images, clients.judge ? &*clients.judge : nullptr,
                               config.parallelism);

  write_reports(config.out, manifest, reports);
  std::vector<std::string> order;
  for (const auto& s : manifest.samples()) order.push_back(s.sample_id);
  std::ostringstream transcript;
  gateway::write_transcript(log->snapshot(transcript_header(config, manifest, library, demos, selection)), order,
                            transcript);
  scoring::write_text_file(config.out / kTranscriptFile, transcript.str());

  say(ctx, fmt::format("run: {} samples, {} failed{} -> {}", manifest.size(), reports.failed,
                       batch.aborted ? " (aborted)" : "", config.out.string()));
  return reports.failed > 0 ? kExitPartial : kExitOk;
}

int cmd_score(const fs::path& run_dir, const CommandContext& ctx) {
  auto manifest = read_manifest_copy(run_dir);
  auto records = read_run_records(run_dir);
  std::vector<std::string> warnings;
  auto scores = scoring::aggregate(records, manifest, &warnings);
  for (const auto& w : warnings) spdlog::warn("{}", w);
  scoring::write_text_file(run_dir / scoring::kScoresFile, scoring::render_scores(scores));
  say(ctx, fmt::format("score: {}/{} correct ({} unparseable, {} errored)", scores.correct, scores.n,
                       scores.unparseable, scores.errored));
  return kExitOk;
}

int cmd_analyze(const AnalyzeOptions& options, const CommandContext& ctx) {
  auto out = options.out.empty() ? options.treatment : options.out;
  fs::path quality_path = options.treatment / scoring::kQualityFile;
  if (options.regression && !fs::is_regular_file(quality_path)) {
    missing_file(quality_path, "quality.csv (required by --regression)");
  }
  auto treatment = read_scores(options.treatment);
  auto baseline = read_scores(options.baseline);
  auto deltas = scoring::compute_delta(treatment, baseline);

  std::optional<std::string> regression_doc;
  std::optional<std::string> plot_sc;
  std::optional<std::string> plot_pq;
  if (options.regression) {
    std::ifstream in(quality_path, std::ios::binary);
    auto quality = scoring::parse_quality_csv(in);
    auto sc_points = scoring::quality_gain_points(deltas, quality, scoring::QualityMetric::SemanticConsistency);
    auto pq_points = scoring::quality_gain_points(deltas, quality, scoring::QualityMetric::PerceptualQuality);
    auto sc = scoring::ols_fit(sc_points);
    auto pq = scoring::ols_fit(pq_points);
    regression_doc = scoring::render_regression(&sc, &pq);
    plot_sc = scoring::render_plot_data(sc_points, sc);
    plot_pq = scoring::render_plot_data(pq_points, pq);
    say(ctx, fmt::format("regression: SC R2={} p={}; PQ R2={} p={}", scoring::format_fixed(sc.r_squared, 4),
                         fmt::format("{:.3g}", sc.p_value), scoring::format_fixed(pq.r_squared, 4),
                         fmt::format("{:.3g}", pq.p_value)));
  }

  scoring::write_text_file(out / scoring::kDeltasFile, scoring::render_deltas_csv(deltas));
  if (regression_doc) {
    scoring::write_text_file(out / scoring::kRegressionFile, *regression_doc);
    scoring::write_text_file(out / scoring::kPlotDataFile, *plot_sc);
    scoring::write_text_file(out / scoring::kPlotDataPqFile, *plot_pq);
  }
  say(ctx, fmt::format("analyze: {} tasks, mean delta {}", deltas.tasks.size(),
                       scoring::format_fixed(deltas.overall_mean, 4)));
  return kExitOk;
}

int cmd_write_prompts(const RunConfig& config, const CommandContext& ctx) {
  require_file(config.manifest, "manifest");
  if (config.out.empty()) {
    throw ConfigError(ConfigErrc::MissingValue, "ConfigError(MissingValue): no output directory given (--out)");
  }
  std::optional<gateway::BackendClient> writer_client;
  std::vector<writer::Demonstration> demos;
  if (config.writer_mode == pipeline::WriterMode::Auto) {
    auto table = load_endpoints(config.endpoints);
    RunConfig probe = config;
    probe.strategy = pipeline::ContextStrategy::Replace;
    probe.edit_backend.clear();
    probe.judge_backend.clear();
    auto selection = select_endpoints(probe, table);
    if (!config.demos) {
      throw ConfigError(ConfigErrc::MissingValue,
                        "ConfigError(MissingValue): writer mode 'auto' needs a demonstration file (--demos)");
    }
    demos = load_demos_for(config);
    writer::validate(config.writer, demos.size());
    writer_client.emplace(*selection.writer, ctx.transport(*selection.writer), ctx.retry);
  }
  auto manifest = bench::parse_manifest(config.manifest);
  auto library = load_library(config);
  bench::ImageStore images(config.data_root);

  std::string out;
  std::size_t fallbacks = 0;
  for (const auto& sample : manifest.samples()) {
    json row = {{"sample_id", sample.sample_id}, {"task", sample.task}};
    if (writer_client) {
      auto written = writer::write_edit_prompt(sample, images.load(sample.image_ref), demos, config.writer,
                                               *writer_client, library);
      bool fell_back = written.source == writer::CandidateSource::Fallback;
      fallbacks += fell_back ? 1 : 0;
      row["source"] = fell_back ? "fallback" : "writer";
      row["key"] = written.fallback_key;
      row["prompt"] = written.text;
      row["attempts"] = written.attempts;
      row["rejections"] = {{"leakage", written.leakage_rejections},
                           {"diversity", written.diversity_rejections},
                           {"semantic", written.semantic_rejections}};
    } else {
      const auto& entry =
          config.writer_mode == pipeline::WriterMode::Off ? library.fallback() : library.route(sample);
      std::string source = "library";
      std::string text;
      std::string key = entry.key;
      try {
        text = prompts::render_prompt(entry, sample);
      } catch (const prompts::PromptError& e) {
        if (e.code() != prompts::PromptErrc::LeakageDetected) throw;
        key = library.fallback().key;
        text = prompts::render_prompt(library.fallback(), sample);
        source = "fallback";
        ++fallbacks;
      }
      row["source"] = source;
      row["key"] = key;
      row["prompt"] = text;
    }
    out += row.dump() + "\n";
  }
  scoring::write_text_file(config.out / kPromptsFile, out);
  say(ctx, fmt::format("write-prompts: {} prompts, {} fallbacks -> {}", manifest.size(), fallbacks,
                       (config.out / kPromptsFile).string()));
  return kExitOk;
}

int cmd_replay(const fs::path& transcript_path, const fs::path& out_dir, const CommandContext& ctx) {
  std::ifstream in(transcript_path, std::ios::binary);
  if (!in) missing_file(transcript_path, "transcript");
  auto transcript = gateway::read_transcript(in);
  const auto& h = transcript.header;

  auto malformed = [](const std::string& msg) {
    throw gateway::TranscriptError(gateway::TranscriptErrc::MalformedTranscript, "MalformedTranscript: " + msg);
  };
  if (h.value("format", 0) != kTranscriptFormat) malformed("unsupported transcript format");

  std::vector<bench::Sample> samples;
  std::optional<bench::Manifest> manifest;
  std::optional<prompts::PromptLibrary> library;
  std::vector<writer::Demonstration> demos;
  pipeline::PipelineConfig config;
  EndpointSelection endpoints;
  try {
    std::size_t line = 0;
    for (const auto& s : h.at("manifest").at("samples")) samples.push_back(bench::sample_from_json(s, ++line));
    manifest.emplace(bench::Manifest::from_samples(samples, h["manifest"].value("name", std::string()),
                                                   h["manifest"].value("version", std::string())));
    std::vector<prompts::EditPrompt> table;
    for (const auto& p : h.at("prompt_table")) table.push_back(prompts::prompt_from_json(p));
    library.emplace(std::move(table), h.at("prompt_fallback").get<std::string>());
    demos = demos_from_json(h.at("demonstrations"));

    const auto& c = h.at("config");
    config.strategy = pipeline::parse_strategy(c.at("strategy").get<std::string>()).value();
    config.gen = gateway::gen_params_from_json(c.at("gen"));
    config.writer_mode = pipeline::parse_writer_mode(c.at("writer").get<std::string>()).value();
    config.writer.k = c.at("writer_k").get<std::size_t>();
    config.writer.max_attempts = c.at("writer_attempts").get<int>();
    config.writer.diversity_threshold = c.at("diversity_threshold").get<double>();
    config.on_edit_failure = pipeline::parse_edit_failure_policy(c.at("on_edit_failure").get<std::string>()).value();
    config.fail_fast = c.at("fail_fast").get<bool>();
    config.parallelism = 1;

    const auto& e = h.at("endpoints");
    endpoints.understand = gateway::endpoint_from_json(e.at("understand"));
    auto optional_endpoint = [&](const char* role) -> std::optional<gateway::BackendEndpoint> {
      if (!e.contains(role) || e[role].is_null()) return std::nullopt;
      return gateway::endpoint_from_json(e[role]);
    };
    endpoints.edit = optional_endpoint("edit");
    endpoints.writer = optional_endpoint("writer");
    endpoints.judge = optional_endpoint("judge");
  } catch (const json::exception& e) {
    malformed(fmt::format("bad header: {}", e.what()));
  } catch (const std::bad_optional_access&) {
    malformed("bad header: unknown enum value");
  } catch (const std::invalid_argument& e) {
    malformed(fmt::format("bad header: {}", e.what()));
  }

  for (const auto& s : samples) {
    if (!transcript.outcomes.contains(s.sample_id)) {
      throw gateway::TranscriptError(
          gateway::TranscriptErrc::TranscriptIncomplete,
          fmt::format("TranscriptIncomplete: sample '{}' has no end marker in {}", s.sample_id,
                      transcript_path.string()));
    }
  }

  // Samples that failed before any backend call are restored from their
  // recorded outcome; everything else is re-executed against the transcript.
  std::set<std::string> with_calls;
  for (const auto& c : transcript.calls) with_calls.insert(c.sample_id);
  std::vector<bench::Sample> runnable;
  std::map<std::string, std::string> restored;
  for (const auto& s : samples) {
    const auto& outcome = transcript.outcomes.at(s.sample_id);
    if (!outcome.ok && !with_calls.contains(s.sample_id)) {
      restored[s.sample_id] = outcome.error;
    } else {
      runnable.push_back(s);
    }
  }

  auto replay = std::make_shared<gateway::ReplayTransport>(transcript.calls);
  gateway::RetryPolicy no_wait = ctx.retry;
  no_wait.sleep = [](std::chrono::milliseconds) {};
  auto clients = make_clients(endpoints, no_wait, [&](const gateway::BackendEndpoint&) { return replay; });

  bench::PlaceholderImageSource images;
  std::vector<pipeline::RunRecord> records;
  {
    pipeline::Pipeline pipe(config, clients.backends(), {&images, &*library, &demos, nullptr, nullptr});
    auto batch = runnable.empty() ? pipeline::BatchResult{}
                                  : pipe.run_batch(bench::Manifest::from_samples(runnable));
    std::size_t next = 0;
    for (const auto& s : samples) {
      if (auto it = restored.find(s.sample_id); it != restored.end()) {
        pipeline::RunRecord r;
        r.sample_id = s.sample_id;
        r.strategy = config.strategy;
        r.error = it->second;
        records.push_back(std::move(r));
      } else {
        records.push_back(std::move(batch.records[next++]));
      }
    }
  }

  auto reports = build_reports(records, *manifest, images, clients.judge ? &*clients.judge : nullptr, 1);
  write_reports(out_dir, *manifest, reports);
  say(ctx, fmt::format("replay: {} samples, {} failed -> {}", samples.size(), reports.failed, out_dir.string()));
  return kExitOk;
}

std::string render_report(const std::vector<fs::path>& run_dirs) {
  struct Row {
    std::string label;
    scoring::ScoreReport scores;
  };
  std::vector<Row> rows;
  std::set<std::string> sources;
  std::vector<std::string> categories;
  for (const auto& dir : run_dirs) {
    auto label = dir.filename().empty() ? dir.parent_path().filename().string() : dir.filename().string();
    rows.push_back({label, read_scores(dir)});
    for (const auto& b : rows.back().scores.benchmarks) sources.insert(b.name);
  }
  for (auto c : bench::kAllCategories) {
    for (const auto& r : rows) {
      auto name = std::string(bench::to_string(c));
      bool present = std::any_of(r.scores.categories.begin(), r.scores.categories.end(),
                                 [&](const auto& g) { return g.name == name; });
      if (present) {
        categories.push_back(name);
        break;
      }
    }
  }

  auto pct = [](double v) { return scoring::format_fixed(100.0 * v, 1); };
  auto find = [](const std::vector<scoring::GroupAccuracy>& groups, const std::string& name) -> std::string {
    for (const auto& g : groups) {
      if (g.name == name) return scoring::format_fixed(100.0 * g.accuracy(), 1);
    }
    return "-";
  };

  auto table = [](const std::vector<std::vector<std::string>>& cells) {
    std::vector<std::size_t> width(cells.front().size(), 0);
    for (const auto& row : cells) {
      for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
    }
    std::string out;
    for (const auto& row : cells) {
      std::string line;
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i == 0) {
          line += fmt::format("{:<{}}", row[i], width[i]);
        } else {
          line += fmt::format("  {:>{}}", row[i], width[i]);
        }
      }
      out += line + "\n";
    }
    return out;
  };

  std::vector<std::vector<std::string>> bench_cells;
  std::vector<std::string> header = {"RUN"};
  header.insert(header.end(), sources.begin(), sources.end());
  header.emplace_back("AVG");
  bench_cells.push_back(header);
  for (const auto& r : rows) {
    std::vector<std::string> line = {r.label};
    for (const auto& s : sources) line.push_back(find(r.scores.benchmarks, s));
    line.push_back(r.scores.benchmarks.empty() ? "-" : pct(r.scores.benchmark_mean()));
    bench_cells.push_back(std::move(line));
  }

  std::vector<std::vector<std::string>> cat_cells;
  header = {"RUN"};
  header.insert(header.end(), categories.begin(), categories.end());
  header.emplace_back("OVERALL");
  cat_cells.push_back(header);
  for (const auto& r : rows) {
    std::vector<std::string> line = {r.label};
    for (const auto& c : categories) line.push_back(find(r.scores.categories, c));
    line.push_back(r.scores.n == 0 ? "-" : pct(r.scores.sample_weighted()));
    cat_cells.push_back(std::move(line));
  }

  return "Accuracy by benchmark (AVG: unweighted mean over benchmarks)\n" + table(bench_cells) +
         "\nAccuracy by category (OVERALL: weighted by sample count)\n" + table(cat_cells);
}

int cmd_report(const std::vector<fs::path>& run_dirs, const CommandContext& ctx) {
  if (run_dirs.empty()) {
    throw ConfigError(ConfigErrc::MissingValue, "ConfigError(MissingValue): report needs at least one run directory");
  }
  auto text = render_report(run_dirs);
  if (ctx.out != nullptr) *ctx.out << text;
  return kExitOk;
}

}  // namespace vthink::cli
