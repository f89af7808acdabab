#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "vthink/common/bytes.hpp"
#include "vthink/gateway/types.hpp"
#include "vthink/scoring/extract.hpp"

namespace vthink::pipeline {

/// How the generated image enters the understanding call.
///  Baseline   - [I]
///  Replace    - [Î]
///  Concat     - [I, Î], original first
///  TextualCoT - [I] with a think-step directive
enum class ContextStrategy { Baseline, Replace, Concat, TextualCoT };

std::string_view to_string(ContextStrategy s);
std::optional<ContextStrategy> parse_strategy(std::string_view s);

[[nodiscard]] inline bool needs_thought(ContextStrategy s) {
  return s == ContextStrategy::Replace || s == ContextStrategy::Concat;
}

enum class PromptSource { Library, Writer, Fallback };

std::string_view to_string(PromptSource s);
std::optional<PromptSource> parse_prompt_source(std::string_view s);

struct PromptProvenance {
  std::string key;  // library key; empty for writer-authored prompts
  std::string text;
  PromptSource source = PromptSource::Library;

  bool operator==(const PromptProvenance&) const = default;
};

/// The generated image Î and how it was produced.
struct VisualThought {
  Bytes image;
  std::string image_sha256;
  std::string instruction;
  gateway::GenParams params;
  PromptSource source = PromptSource::Library;
  std::string cache_key;
  double latency_ms = 0;
};

struct StageLatency {
  double write_ms = 0;
  double edit_ms = 0;
  double understand_ms = 0;
};

struct RunFlags {
  bool writer_fallback = false;
  bool edit_fallback = false;  // edit failed and the sample degraded to Baseline
  int leakage_rejections = 0;
  int diversity_rejections = 0;
  int semantic_rejections = 0;
};

struct RunRecord {
  std::string sample_id;
  ContextStrategy strategy = ContextStrategy::Baseline;
  std::optional<PromptProvenance> prompt;
  std::optional<VisualThought> thought;
  std::string raw_answer;
  scoring::Extraction extraction;
  bool correct = false;
  StageLatency latency;
  bool cache_hit = false;
  RunFlags flags;
  int edit_attempts = 0;
  int understand_attempts = 0;
  std::optional<std::string> error;

  [[nodiscard]] bool errored() const noexcept { return error.has_value(); }
};

/// Thought image bytes are not serialized; their SHA-256 and cache key are.
nlohmann::json record_to_json(const RunRecord& r);
RunRecord record_from_json(const nlohmann::json& j);

}  // namespace vthink::pipeline
