#include "vthink/bench/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "vthink/common/text.hpp"

namespace vthink::bench {

using nlohmann::json;

std::string_view to_string(Category c) {
  switch (c) {
    case Category::Perception: return "Perception";
    case Category::LogicReasoning: return "LogicReasoning";
    case Category::SpatialReasoning: return "SpatialReasoning";
  }
  return "Perception";
}

std::optional<Category> parse_category(std::string_view s) {
  for (auto c : kAllCategories) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

std::string_view to_string(ManifestErrc e) {
  switch (e) {
    case ManifestErrc::MalformedRecord: return "MalformedRecord";
    case ManifestErrc::DuplicateId: return "DuplicateId";
    case ManifestErrc::UnknownCategory: return "UnknownCategory";
    case ManifestErrc::AnswerNotInOptions: return "AnswerNotInOptions";
  }
  return "MalformedRecord";
}

ManifestError::ManifestError(ManifestErrc code, std::size_t line, const std::string& detail)
    : CodedError(code, line > 0 ? fmt::format("{} at line {}: {}", to_string(code), line, detail)
                                : fmt::format("{}: {}", to_string(code), detail)),
      line_(line) {}

namespace {

std::string required_string(const json& rec, const char* field, std::size_t line) {
  auto it = rec.find(field);
  if (it == rec.end()) {
    throw ManifestError(ManifestErrc::MalformedRecord, line, fmt::format("missing field '{}'", field));
  }
  if (!it->is_string()) {
    throw ManifestError(ManifestErrc::MalformedRecord, line,
                        fmt::format("field '{}' must be a string", field));
  }
  return it->get<std::string>();
}

void require_non_empty(const std::string& value, const char* field, std::size_t line) {
  if (text::trim(value).empty()) {
    throw ManifestError(ManifestErrc::MalformedRecord, line,
                        fmt::format("field '{}' must not be empty", field));
  }
}

}  // namespace

Sample sample_from_json(const json& rec, std::size_t line) {
  if (!rec.is_object()) {
    throw ManifestError(ManifestErrc::MalformedRecord, line, "record is not a JSON object");
  }
  Sample s;
  s.sample_id = required_string(rec, "sample_id", line);
  require_non_empty(s.sample_id, "sample_id", line);
  s.image_ref = required_string(rec, "image", line);
  require_non_empty(s.image_ref, "image", line);
  s.question = required_string(rec, "question", line);
  require_non_empty(s.question, "question", line);
  s.gold_answer = required_string(rec, "answer", line);
  require_non_empty(s.gold_answer, "answer", line);
  s.task = required_string(rec, "task", line);
  require_non_empty(s.task, "task", line);
  s.source = required_string(rec, "source", line);

  auto opts = rec.find("options");
  if (opts == rec.end() || !opts->is_array()) {
    throw ManifestError(ManifestErrc::MalformedRecord, line, "field 'options' must be an array");
  }
  std::set<std::string> labels;
  for (const auto& o : *opts) {
    if (!o.is_object() || !o.contains("label") || !o.contains("text") || !o["label"].is_string() ||
        !o["text"].is_string()) {
      throw ManifestError(ManifestErrc::MalformedRecord, line,
                          "each option must be an object with string 'label' and 'text'");
    }
    Option opt{o["label"].get<std::string>(), o["text"].get<std::string>()};
    require_non_empty(opt.label, "options.label", line);
    if (!labels.insert(text::to_upper(text::trim(opt.label))).second) {
      throw ManifestError(ManifestErrc::MalformedRecord, line,
                          fmt::format("duplicate option label '{}'", opt.label));
    }
    s.options.push_back(std::move(opt));
  }

  if (auto pk = rec.find("prompt_key"); pk != rec.end() && !pk->is_null()) {
    if (!pk->is_string()) {
      throw ManifestError(ManifestErrc::MalformedRecord, line, "field 'prompt_key' must be a string");
    }
    s.prompt_key = pk->get<std::string>();
  }

  auto category = required_string(rec, "category", line);
  auto parsed = parse_category(category);
  if (!parsed) {
    throw ManifestError(ManifestErrc::UnknownCategory, line,
                        fmt::format("category '{}' is not one of Perception, LogicReasoning, "
                                    "SpatialReasoning",
                                    category));
  }
  s.category = *parsed;

  s.gold_normalized = text::to_upper(text::trim(s.gold_answer));
  if (!s.options.empty() && !labels.contains(s.gold_normalized)) {
    throw ManifestError(ManifestErrc::AnswerNotInOptions, line,
                        fmt::format("answer '{}' does not match any option label", s.gold_answer));
  }
  return s;
}

json sample_to_json(const Sample& s) {
  json options = json::array();
  for (const auto& o : s.options) options.push_back({{"label", o.label}, {"text", o.text}});
  json rec = {{"sample_id", s.sample_id}, {"image", s.image_ref},      {"question", s.question},
              {"options", options},       {"answer", s.gold_answer},   {"task", s.task},
              {"category", to_string(s.category)}, {"source", s.source}};
  if (s.prompt_key) rec["prompt_key"] = *s.prompt_key;
  return rec;
}

Manifest Manifest::from_samples(std::vector<Sample> samples, std::string name, std::string version) {
  Manifest m;
  std::set<std::string> sources;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (!m.index_.emplace(s.sample_id, i).second) {
      throw ManifestError(ManifestErrc::DuplicateId, i + 1,
                          fmt::format("sample_id '{}' already defined", s.sample_id));
    }
    auto [it, inserted] = m.task_categories_.emplace(s.task, s.category);
    if (!inserted && it->second != s.category) {
      throw ManifestError(ManifestErrc::MalformedRecord, i + 1,
                          fmt::format("task '{}' is assigned to both {} and {}", s.task,
                                      to_string(it->second), to_string(s.category)));
    }
    sources.insert(s.source);
  }
  m.samples_ = std::move(samples);
  m.metadata_.name = std::move(name);
  m.metadata_.version = std::move(version);
  m.metadata_.sources.assign(sources.begin(), sources.end());
  return m;
}

const Sample* Manifest::find(std::string_view sample_id) const {
  auto it = index_.find(std::string(sample_id));
  return it == index_.end() ? nullptr : &samples_[it->second];
}

std::map<Category, std::size_t> Manifest::category_counts() const {
  std::map<Category, std::size_t> counts;
  for (auto c : kAllCategories) counts[c] = 0;
  for (const auto& s : samples_) ++counts[s.category];
  return counts;
}

std::optional<Category> Manifest::task_category(std::string_view task) const {
  auto it = task_categories_.find(task);
  if (it == task_categories_.end()) return std::nullopt;
  return it->second;
}

Manifest parse_manifest(std::istream& in, std::string name) {
  std::vector<Sample> samples;
  std::set<std::string> ids;
  std::map<std::string, Category> task_categories;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ManifestError(ManifestErrc::MalformedRecord, line_no,
                          fmt::format("invalid JSON: {}", e.what()));
    }
    auto sample = sample_from_json(rec, line_no);
    if (!ids.insert(sample.sample_id).second) {
      throw ManifestError(ManifestErrc::DuplicateId, line_no,
                          fmt::format("sample_id '{}' already defined", sample.sample_id));
    }
    auto [it, inserted] = task_categories.emplace(sample.task, sample.category);
    if (!inserted && it->second != sample.category) {
      throw ManifestError(ManifestErrc::MalformedRecord, line_no,
                          fmt::format("task '{}' is assigned to both {} and {}", sample.task,
                                      to_string(it->second), to_string(sample.category)));
    }
    samples.push_back(std::move(sample));
  }
  return Manifest::from_samples(std::move(samples), std::move(name));
}

Manifest parse_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ManifestError(ManifestErrc::MalformedRecord, 0,
                        fmt::format("cannot open manifest '{}'", path.string()));
  }
  return parse_manifest(in, path.stem().string());
}

void serialize_manifest(const Manifest& manifest, std::ostream& out) {
  for (const auto& s : manifest.samples()) out << sample_to_json(s).dump() << '\n';
}

std::map<std::string, std::vector<Sample>> partition_by_task(const Manifest& manifest) {
  std::map<std::string, std::vector<Sample>> buckets;
  for (const auto& s : manifest.samples()) buckets[s.task].push_back(s);
  return buckets;
}

}  // namespace vthink::bench
