#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "vthink/bench/image_store.hpp"
#include "vthink/bench/manifest.hpp"
#include "vthink/common/error.hpp"
#include "vthink/gateway/client.hpp"
#include "vthink/prompts/library.hpp"

namespace vthink::writer {

/// One in-context example: an image, its question, and a good edit instruction.
struct Demonstration {
  std::string image_ref;
  std::string question;
  std::string prompt;

  bool operator==(const Demonstration&) const = default;
};

struct WriterConfig {
  std::size_t k = 5;
  int max_attempts = 3;
  double diversity_threshold = 0.8;
  std::string writer_backend;
};

enum class WriterErrc { InsufficientDemonstrations, InvalidConfig, InvalidDemonstration, BackendUnavailable };

std::string_view to_string(WriterErrc e);

using WriterError = CodedError<WriterErrc>;

/// Demonstration bank file: one {image, question, prompt} record per line.
std::vector<Demonstration> load_demonstrations(std::istream& in);
std::vector<Demonstration> load_demonstrations(const std::filesystem::path& path);

/// Throws WriterError when k, max_attempts or the threshold are out of range
/// for the given bank size.
void validate(const WriterConfig& config, std::size_t demonstrations_available);

/// The standing instruction sent with every writer request.
inline constexpr std::string_view kWriterInstruction =
    "Write one short image-editing instruction that would make the image easier to analyse for "
    "the question. Do not state, hint at, or name the answer or any answer option.";

/// Builds the request for the writer backend: the first k demonstrations in
/// input order, the target image and question. Options and the gold answer are
/// never included.
gateway::WriteRequest compose_writer_request(const bench::Sample& sample, const bench::ImageBlob& image,
                                             const std::vector<Demonstration>& demos,
                                             const WriterConfig& config);

struct FilterResult {
  bool pass = true;
  std::string reason;
  double overlap = 0;  // only meaningful for the diversity filter
};

/// Fails when the normalized candidate contains the gold answer or any option
/// text; needles under three characters are exempt.
FilterResult filter_leakage(std::string_view candidate, const bench::Sample& sample);

/// Jaccard overlap of lowercased word-token sets against every demonstration
/// prompt; fails when the maximum exceeds the threshold.
FilterResult filter_diversity(std::string_view candidate, const std::vector<Demonstration>& demos,
                              const WriterConfig& config);

/// Passes when the candidate uses at least one editing verb from the
/// operation vocabulary (enhance, zoom, remove, outpaint, ...).
FilterResult filter_semantic(std::string_view candidate);

double jaccard(std::string_view a, std::string_view b);

enum class CandidateSource { Writer, Fallback };

struct WrittenPrompt {
  std::string text;
  CandidateSource source = CandidateSource::Writer;
  std::string fallback_key;  // library entry used when source == Fallback
  int attempts = 0;
  int leakage_rejections = 0;
  int diversity_rejections = 0;
  int semantic_rejections = 0;
};

/// Asks the writer backend for candidates until one passes every filter, up
/// to max_attempts. Exhaustion falls back to library routing. Gateway failures
/// surface as WriterError(BackendUnavailable).
WrittenPrompt write_edit_prompt(const bench::Sample& sample, const bench::ImageBlob& image,
                                const std::vector<Demonstration>& demos, const WriterConfig& config,
                                const gateway::BackendClient& writer,
                                const prompts::PromptLibrary& library);

}  // namespace vthink::writer
