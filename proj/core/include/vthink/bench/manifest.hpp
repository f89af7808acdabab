#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "vthink/common/error.hpp"

namespace vthink::bench {

enum class Category { Perception, LogicReasoning, SpatialReasoning };

inline constexpr std::array<Category, 3> kAllCategories = {
    Category::Perception, Category::LogicReasoning, Category::SpatialReasoning};

std::string_view to_string(Category c);
std::optional<Category> parse_category(std::string_view s);

struct Option {
  std::string label;
  std::string text;

  bool operator==(const Option&) const = default;
};

/// One VQA item.
struct Sample {
  std::string sample_id;
  std::string image_ref;
  std::string question;
  std::vector<Option> options;  // empty for free-form questions
  std::string gold_answer;      // verbatim from the manifest
  std::string gold_normalized;  // trimmed, uppercased
  std::string task;
  Category category = Category::Perception;
  std::string source;
  std::optional<std::string> prompt_key;

  bool operator==(const Sample&) const = default;
};

struct ManifestMetadata {
  std::string name;
  std::string version;
  std::vector<std::string> sources;  // sorted, unique

  bool operator==(const ManifestMetadata&) const = default;
};

enum class ManifestErrc { MalformedRecord, DuplicateId, UnknownCategory, AnswerNotInOptions };

std::string_view to_string(ManifestErrc e);

class ManifestError : public CodedError<ManifestErrc> {
 public:
  /// `line` is 1-based; 0 when the error is not tied to a line.
  ManifestError(ManifestErrc code, std::size_t line, const std::string& detail);

  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// An immutable, validated benchmark manifest.
class Manifest {
 public:
  Manifest() = default;

  /// Validates every invariant; throws ManifestError with the 1-based index
  /// of the offending sample as the line number.
  static Manifest from_samples(std::vector<Sample> samples, std::string name = {},
                               std::string version = {});

  [[nodiscard]] const std::vector<Sample>& samples() const noexcept { return samples_; }
  [[nodiscard]] const ManifestMetadata& metadata() const noexcept { return metadata_; }
  [[nodiscard]] std::size_t size() const noexcept { return samples_.size(); }
  [[nodiscard]] bool empty() const noexcept { return samples_.empty(); }

  [[nodiscard]] const Sample* find(std::string_view sample_id) const;
  [[nodiscard]] std::map<Category, std::size_t> category_counts() const;
  [[nodiscard]] std::optional<Category> task_category(std::string_view task) const;

  bool operator==(const Manifest& other) const {
    return samples_ == other.samples_ && metadata_ == other.metadata_;
  }

 private:
  std::vector<Sample> samples_;
  ManifestMetadata metadata_;
  std::unordered_map<std::string, std::size_t> index_;
  std::map<std::string, Category, std::less<>> task_categories_;
};

/// Parses one manifest record. `line` is only used for error messages.
Sample sample_from_json(const nlohmann::json& record, std::size_t line = 0);
nlohmann::json sample_to_json(const Sample& sample);

Manifest parse_manifest(const std::filesystem::path& path);
Manifest parse_manifest(std::istream& in, std::string name = {});

/// Writes one record per line, in manifest order.
void serialize_manifest(const Manifest& manifest, std::ostream& out);

/// Buckets samples by task. Order within a bucket follows manifest order.
std::map<std::string, std::vector<Sample>> partition_by_task(const Manifest& manifest);

}  // namespace vthink::bench
