#include "vthink/cli.hpp"

#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "vthink/bench/manifest.hpp"
#include "vthink/gateway/transcript.hpp"
#include "vthink/pipeline/engine.hpp"
#include "vthink/prompts/library.hpp"
#include "vthink/scoring/aggregate.hpp"
#include "vthink/writer/prompt_writer.hpp"

namespace vthink::cli {

namespace {

template <typename T>
void opt(CLI::App& app, const std::string& name, std::optional<T>& slot, const std::string& help) {
  app.add_option_function<T>(name, [&slot](const T& v) { slot = v; }, help);
}

}  // namespace

void add_config_flags(CLI::App& app, ConfigLayer& l) {
  opt(app, "--manifest", l.manifest, "benchmark manifest (JSONL)");
  opt(app, "--data-root", l.data_root, "directory image references resolve against");
  opt(app, "--strategy", l.strategy, "baseline | replace | concat | textual-cot");
  opt(app, "--parallelism", l.parallelism, "samples in flight");
  opt(app, "--seed", l.seed, "generation seed for every sample (default: derived from the sample id)");
  opt(app, "--cache-dir", l.cache_dir, "visual-thought cache directory");
  opt(app, "--on-edit-failure", l.on_edit_failure, "fail | fallback");
  opt(app, "--writer", l.writer, "off | library | auto");
  opt(app, "--writer-backend", l.writer_backend, "endpoint id of the prompt writer");
  opt(app, "--writer-k", l.writer_k, "demonstrations per writer request");
  opt(app, "--writer-attempts", l.writer_attempts, "writer candidates per sample");
  opt(app, "--diversity-threshold", l.diversity_threshold, "Jaccard overlap above which a candidate is rejected");
  opt(app, "--prompt-table", l.prompt_table, "edit prompt table (JSONL)");
  opt(app, "--demos", l.demos, "writer demonstration bank (JSONL)");
  opt(app, "--understand-backend", l.understand_backend, "endpoint id answering questions");
  opt(app, "--edit-backend", l.edit_backend, "endpoint id producing visual thoughts");
  opt(app, "--judge-backend", l.judge_backend, "endpoint id scoring visual thoughts");
  app.add_flag_function(
      "--fail-fast,!--no-fail-fast", [&l](std::int64_t n) { l.fail_fast = n > 0; },
      "stop the batch at the first failed sample");
  opt(app, "--steps", l.steps, "diffusion steps");
  opt(app, "--cfg-text", l.cfg_text, "text guidance scale");
  opt(app, "--cfg-image", l.cfg_image, "image guidance scale");
}

int run_cli(const std::vector<std::string>& args, const CommandContext& ctx, std::ostream& err) {
  CLI::App app{"Generate-then-understand evaluation harness", "vthink"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::string config_path;
  ConfigLayer cli;
  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  opt(app, "--endpoints", cli.endpoints, "endpoint table (JSONL)");
  opt(app, "--out", cli.out, "output directory");

  auto* run = app.add_subcommand("run", "run a batch and score it");
  add_config_flags(*run, cli);

  auto* write_prompts = app.add_subcommand("write-prompts", "write the edit instruction for every sample");
  add_config_flags(*write_prompts, cli);

  std::string score_dir;
  auto* score = app.add_subcommand("score", "re-score a run directory");
  score->add_option("run_dir", score_dir, "run directory")->required();

  AnalyzeOptions analyze_opts;
  std::string treatment;
  std::string baseline;
  auto* analyze = app.add_subcommand("analyze", "per-task deltas and the quality regression");
  analyze->add_option("treatment", treatment, "treatment run directory")->required();
  analyze->add_option("baseline", baseline, "baseline run directory")->required();
  analyze->add_flag("--regression", analyze_opts.regression, "regress accuracy gain on thought quality");

  std::string transcript;
  auto* replay = app.add_subcommand("replay", "regenerate reports from a transcript without backends");
  replay->add_option("transcript", transcript, "transcript.jsonl of a previous run")->required();

  std::vector<std::string> report_dirs;
  auto* report = app.add_subcommand("report", "print accuracy tables for run directories");
  report->add_option("run_dirs", report_dirs, "run directories")->required();

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream out;
    int code = app.exit(e, out, out);
    if (code == 0) {
      if (ctx.out != nullptr) *ctx.out << out.str();
      return kExitOk;
    }
    err << out.str();
    return kExitError;
  }

  try {
    ConfigLayer file;
    if (!config_path.empty()) file = load_config_file(config_path);
    auto config = [&] { return resolve(cli, file); };
    auto out_dir = [&] {
      auto c = config();
      if (c.out.empty()) {
        throw ConfigError(ConfigErrc::MissingValue, "ConfigError(MissingValue): no output directory given (--out)");
      }
      return c.out;
    };

    if (run->parsed()) return cmd_run(config(), ctx);
    if (write_prompts->parsed()) return cmd_write_prompts(config(), ctx);
    if (score->parsed()) return cmd_score(score_dir, ctx);
    if (analyze->parsed()) {
      analyze_opts.treatment = treatment;
      analyze_opts.baseline = baseline;
      auto c = config();
      analyze_opts.out = c.out;
      return cmd_analyze(analyze_opts, ctx);
    }
    if (replay->parsed()) return cmd_replay(transcript, out_dir(), ctx);
    if (report->parsed()) {
      std::vector<std::filesystem::path> dirs(report_dirs.begin(), report_dirs.end());
      return cmd_report(dirs, ctx);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

}  // namespace vthink::cli
