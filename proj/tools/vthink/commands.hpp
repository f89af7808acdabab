#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vthink/config.hpp"
#include "vthink/gateway/client.hpp"
#include "vthink/gateway/transcript.hpp"
#include "vthink/gateway/transport.hpp"

namespace vthink::cli {

inline constexpr const char* kManifestCopyFile = "manifest.jsonl";
inline constexpr const char* kTranscriptFile = "transcript.jsonl";
inline constexpr const char* kPromptsFile = "prompts.jsonl";

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitPartial = 2;

using TransportFactory = std::function<std::shared_ptr<gateway::Transport>(const gateway::BackendEndpoint&)>;

/// `mock://` endpoints get an in-process MockBackend, everything else the
/// HTTP transport.
std::shared_ptr<gateway::Transport> default_transport(const gateway::BackendEndpoint& endpoint);

struct CommandContext {
  TransportFactory transport = default_transport;
  gateway::RetryPolicy retry;
  std::ostream* out = nullptr;  // human-readable summaries; null for silence
};

/// Runs a batch and writes records.jsonl, scores.json, manifest.jsonl,
/// transcript.jsonl and, with a judge backend, quality.csv. Returns kExitOk
/// or kExitPartial. Configuration problems throw ConfigError before any
/// backend is contacted and before anything is written.
int cmd_run(const RunConfig& config, const CommandContext& ctx);

/// Re-scores a run directory from its records and manifest copy.
int cmd_score(const std::filesystem::path& run_dir, const CommandContext& ctx);

struct AnalyzeOptions {
  std::filesystem::path treatment;
  std::filesystem::path baseline;
  std::filesystem::path out;  // empty: the treatment directory
  bool regression = false;
};

/// Writes deltas.csv, and with `regression` also regression.json,
/// plotdata_regression.csv (SC panel) and plotdata_regression_pq.csv.
int cmd_analyze(const AnalyzeOptions& options, const CommandContext& ctx);

/// Writes prompts.jsonl with the edit instruction chosen for every sample.
int cmd_write_prompts(const RunConfig& config, const CommandContext& ctx);

/// Re-executes a recorded run against its transcript only. Every transport
/// is replaced by the transcript, so no backend is contacted. Throws
/// TranscriptError(TranscriptIncomplete) naming the first sample without
/// an end marker.
int cmd_replay(const std::filesystem::path& transcript, const std::filesystem::path& out_dir,
               const CommandContext& ctx);

/// Accuracy table (percent, one decimal) with one row per run directory.
std::string render_report(const std::vector<std::filesystem::path>& run_dirs);
int cmd_report(const std::vector<std::filesystem::path>& run_dirs, const CommandContext& ctx);

/// The header written at the top of a run transcript.
nlohmann::json transcript_header(const RunConfig& config, const bench::Manifest& manifest,
                                 const prompts::PromptLibrary& library,
                                 const std::vector<writer::Demonstration>& demos,
                                 const EndpointSelection& endpoints);

}  // namespace vthink::cli
