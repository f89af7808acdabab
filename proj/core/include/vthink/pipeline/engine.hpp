#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vthink/bench/image_store.hpp"
#include "vthink/bench/manifest.hpp"
#include "vthink/common/error.hpp"
#include "vthink/gateway/client.hpp"
#include "vthink/pipeline/cache.hpp"
#include "vthink/pipeline/record.hpp"
#include "vthink/prompts/library.hpp"
#include "vthink/writer/prompt_writer.hpp"

namespace vthink::pipeline {

/// Where the edit instruction comes from.
///  Off     - the library's fallback prompt for every sample (no routing)
///  Library - task/prompt_key routing through the prompt library
///  Auto    - the writer backend, falling back to library routing
enum class WriterMode { Off, Library, Auto };

std::string_view to_string(WriterMode m);
std::optional<WriterMode> parse_writer_mode(std::string_view s);

enum class EditFailurePolicy { Fail, Fallback };

std::string_view to_string(EditFailurePolicy p);
std::optional<EditFailurePolicy> parse_edit_failure_policy(std::string_view s);

struct PipelineConfig {
  ContextStrategy strategy = ContextStrategy::Baseline;
  gateway::GenParams gen;  // gen.seed, when set, applies to every sample
  WriterMode writer_mode = WriterMode::Library;
  writer::WriterConfig writer;
  EditFailurePolicy on_edit_failure = EditFailurePolicy::Fail;
  std::size_t parallelism = 1;
  bool fail_fast = false;
};

struct Backends {
  const gateway::BackendClient* understand = nullptr;
  const gateway::BackendClient* edit = nullptr;
  const gateway::BackendClient* writer = nullptr;
};

class PipelineObserver {
 public:
  virtual ~PipelineObserver() = default;
  /// A thought was served from cache instead of the edit backend.
  virtual void on_cache_hit(const bench::Sample&, const gateway::EditResponse&) {}
  /// Called once per sample by run_batch, from the worker that ran it.
  virtual void on_sample_done(const RunRecord&) {}
};

struct PipelineResources {
  const bench::ImageSource* images = nullptr;
  const prompts::PromptLibrary* library = nullptr;
  const std::vector<writer::Demonstration>* demonstrations = nullptr;  // required for WriterMode::Auto
  const ThoughtCache* cache = nullptr;                                 // optional
  PipelineObserver* observer = nullptr;                                // optional
};

enum class PipelineErrc { InvalidConfig, FailFastAbort };

std::string_view to_string(PipelineErrc e);

using PipelineError = CodedError<PipelineErrc>;

struct BatchResult {
  std::vector<RunRecord> records;  // manifest order
  std::size_t failed = 0;
  bool aborted = false;            // fail-fast stopped the batch early
};

/// Seed used for a sample when the configuration leaves it unset.
std::int64_t default_seed(std::string_view sample_id);

/// Executes the generate-then-understand loop for one sample or a batch.
class Pipeline {
 public:
  /// Throws PipelineError(InvalidConfig) when a backend or resource the
  /// strategy needs is missing.
  Pipeline(PipelineConfig config, Backends backends, PipelineResources resources);

  /// Runs one sample. Backend failures propagate unless the edit-failure
  /// policy allows degrading to Baseline.
  RunRecord run_sample(const bench::Sample& sample) const;

  /// One record per sample in manifest order, with at most `parallelism`
  /// samples (and therefore backend calls) in flight. Per-sample failures
  /// become errored records.
  BatchResult run_batch(const bench::Manifest& manifest) const;

  [[nodiscard]] const PipelineConfig& config() const noexcept { return config_; }

 private:
  PromptProvenance choose_prompt(const bench::Sample& sample, const bench::ImageBlob& image,
                                 RunRecord& record) const;

  PipelineConfig config_;
  Backends backends_;
  PipelineResources resources_;
};

}  // namespace vthink::pipeline
