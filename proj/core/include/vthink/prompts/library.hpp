#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "vthink/bench/manifest.hpp"
#include "vthink/common/error.hpp"

namespace vthink::prompts {

/// Enhancement edits refine low-level fidelity (deblur, denoise, exposure);
/// Expansion edits add semantic context (outpaint, novel view, auxiliary lines).
enum class Family { Enhancement, Expansion };

std::string_view to_string(Family f);
std::optional<Family> parse_family(std::string_view s);

struct EditPrompt {
  std::string key;
  Family family = Family::Enhancement;
  std::string operation;
  std::string template_text;  // may contain {question}
  std::vector<std::string> task_tags;

  bool operator==(const EditPrompt&) const = default;
};

enum class PromptErrc { InvalidPrompt, UnknownPromptKey, LeakageDetected };

std::string_view to_string(PromptErrc e);

using PromptError = CodedError<PromptErrc>;

/// Canonical operation vocabulary. Every EditPrompt::operation must be one of these.
std::span<const std::string_view> known_operations();

/// Throws PromptError(InvalidPrompt) when an invariant does not hold.
void validate(const EditPrompt& prompt);

EditPrompt prompt_from_json(const nlohmann::json& record);
nlohmann::json prompt_to_json(const EditPrompt& prompt);

/// The built-in catalog, in stable order.
const std::vector<EditPrompt>& builtin_catalog();

/// The built-in routing table in its line-delimited file form.
std::string_view builtin_table_jsonl();

inline constexpr std::string_view kDefaultFallbackKey = "quality-enhancement";

/// Catalog plus task routing. Immutable after construction.
class PromptLibrary {
 public:
  /// Throws PromptError(InvalidPrompt) on invalid entries, duplicate keys, or
  /// an unknown fallback key.
  explicit PromptLibrary(std::vector<EditPrompt> entries,
                         std::string fallback_key = std::string(kDefaultFallbackKey));

  static PromptLibrary builtin();
  /// Line-delimited table. If the table lacks the fallback key, the built-in
  /// fallback entry is appended.
  static PromptLibrary load(std::istream& in);
  static PromptLibrary load(const std::filesystem::path& path);

  [[nodiscard]] const std::vector<EditPrompt>& catalog() const noexcept { return entries_; }
  [[nodiscard]] const EditPrompt* find(std::string_view key) const;
  [[nodiscard]] const EditPrompt& fallback() const { return entries_[fallback_index_]; }

  /// Explicit prompt_key, else first entry tagged with the sample's task,
  /// else the fallback.
  [[nodiscard]] const EditPrompt& route(const bench::Sample& sample) const;

  /// Whether `task` hits a tagged entry (as opposed to the fallback).
  [[nodiscard]] bool has_route_for(std::string_view task) const;

 private:
  std::vector<EditPrompt> entries_;
  std::size_t fallback_index_ = 0;
};

struct LeakCheck {
  bool leaked = false;
  std::string reason;
};

/// Normalized-substring leak test against the gold answer and every option
/// text. Needles shorter than three characters after normalization are exempt,
/// so bare option labels ("A", "B") never trigger.
LeakCheck check_leakage(std::string_view text, const bench::Sample& sample);

inline constexpr std::size_t kMinLeakNeedle = 3;

/// Substitutes {question}; throws PromptError(LeakageDetected) when the
/// result leaks answer or option content.
std::string render_prompt(const EditPrompt& prompt, const bench::Sample& sample);

}  // namespace vthink::prompts
