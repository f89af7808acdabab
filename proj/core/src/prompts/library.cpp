#include "vthink/prompts/library.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "vthink/common/text.hpp"

namespace vthink::prompts {

using nlohmann::json;

std::string_view to_string(Family f) {
  return f == Family::Enhancement ? "Enhancement" : "Expansion";
}

std::optional<Family> parse_family(std::string_view s) {
  if (s == "Enhancement") return Family::Enhancement;
  if (s == "Expansion") return Family::Expansion;
  return std::nullopt;
}

std::string_view to_string(PromptErrc e) {
  switch (e) {
    case PromptErrc::InvalidPrompt: return "InvalidPrompt";
    case PromptErrc::UnknownPromptKey: return "UnknownPromptKey";
    case PromptErrc::LeakageDetected: return "LeakageDetected";
  }
  return "InvalidPrompt";
}

namespace {

constexpr std::string_view kQuestionPlaceholder = "{question}";

[[noreturn]] void invalid(const std::string& msg) {
  throw PromptError(PromptErrc::InvalidPrompt, "InvalidPrompt: " + msg);
}

}  // namespace

void validate(const EditPrompt& p) {
  if (text::trim(p.key).empty()) invalid("empty key");
  auto ops = known_operations();
  if (std::find(ops.begin(), ops.end(), p.operation) == ops.end()) {
    invalid(fmt::format("'{}': unknown operation '{}'", p.key, p.operation));
  }
  if (text::trim(p.template_text).empty()) invalid(fmt::format("'{}': empty template", p.key));
  std::string_view t = p.template_text;
  for (std::size_t pos = t.find('{'); pos != std::string_view::npos; pos = t.find('{', pos + 1)) {
    if (t.substr(pos, kQuestionPlaceholder.size()) != kQuestionPlaceholder) {
      invalid(fmt::format("'{}': template has a placeholder other than {{question}}", p.key));
    }
  }
  for (std::size_t pos = t.find('}'); pos != std::string_view::npos; pos = t.find('}', pos + 1)) {
    if (pos + 1 < kQuestionPlaceholder.size() ||
        t.substr(pos + 1 - kQuestionPlaceholder.size(), kQuestionPlaceholder.size()) !=
            kQuestionPlaceholder) {
      invalid(fmt::format("'{}': unbalanced '}}' in template", p.key));
    }
  }
}

EditPrompt prompt_from_json(const json& rec) {
  if (!rec.is_object()) invalid("record is not a JSON object");
  auto str = [&](const char* field) {
    auto it = rec.find(field);
    if (it == rec.end() || !it->is_string()) invalid(fmt::format("field '{}' must be a string", field));
    return it->get<std::string>();
  };
  EditPrompt p;
  p.key = str("key");
  auto family = str("family");
  auto parsed = parse_family(family);
  if (!parsed) invalid(fmt::format("'{}': unknown family '{}'", p.key, family));
  p.family = *parsed;
  p.operation = str("operation");
  p.template_text = str("template");
  if (auto tags = rec.find("task_tags"); tags != rec.end()) {
    if (!tags->is_array()) invalid("field 'task_tags' must be an array");
    for (const auto& t : *tags) {
      if (!t.is_string()) invalid("task_tags entries must be strings");
      p.task_tags.push_back(t.get<std::string>());
    }
  }
  validate(p);
  return p;
}

json prompt_to_json(const EditPrompt& p) {
  return {{"key", p.key},
          {"family", to_string(p.family)},
          {"operation", p.operation},
          {"template", p.template_text},
          {"task_tags", p.task_tags}};
}

PromptLibrary::PromptLibrary(std::vector<EditPrompt> entries, std::string fallback_key)
    : entries_(std::move(entries)) {
  std::set<std::string> keys;
  for (const auto& e : entries_) {
    validate(e);
    if (!keys.insert(e.key).second) invalid(fmt::format("duplicate key '{}'", e.key));
  }
  auto it = std::find_if(entries_.begin(), entries_.end(),
                         [&](const EditPrompt& e) { return e.key == fallback_key; });
  if (it == entries_.end()) invalid(fmt::format("fallback key '{}' not in catalog", fallback_key));
  fallback_index_ = static_cast<std::size_t>(it - entries_.begin());
}

PromptLibrary PromptLibrary::builtin() { return PromptLibrary(builtin_catalog()); }

PromptLibrary PromptLibrary::load(std::istream& in) {
  std::vector<EditPrompt> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      entries.push_back(prompt_from_json(json::parse(line)));
    } catch (const json::parse_error& e) {
      invalid(fmt::format("line {}: invalid JSON: {}", line_no, e.what()));
    } catch (const PromptError& e) {
      throw PromptError(e.code(), fmt::format("line {}: {}", line_no, e.what()));
    }
  }
  bool has_fallback = std::any_of(entries.begin(), entries.end(), [](const EditPrompt& e) {
    return e.key == kDefaultFallbackKey;
  });
  if (!has_fallback) {
    // The built-in table carries the fallback, so this never recurses while
    // builtin_catalog() is initialising.
    const auto& builtin = builtin_catalog();
    entries.push_back(*std::find_if(builtin.begin(), builtin.end(), [](const EditPrompt& e) {
      return e.key == kDefaultFallbackKey;
    }));
  }
  return PromptLibrary(std::move(entries));
}

PromptLibrary PromptLibrary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) invalid(fmt::format("cannot open prompt table '{}'", path.string()));
  return load(in);
}

const EditPrompt* PromptLibrary::find(std::string_view key) const {
  auto it = std::find_if(entries_.begin(), entries_.end(),
                         [&](const EditPrompt& e) { return e.key == key; });
  return it == entries_.end() ? nullptr : &*it;
}

const EditPrompt& PromptLibrary::route(const bench::Sample& sample) const {
  if (sample.prompt_key) {
    const auto* p = find(*sample.prompt_key);
    if (p == nullptr) {
      throw PromptError(PromptErrc::UnknownPromptKey,
                        fmt::format("UnknownPromptKey: '{}' (sample '{}')", *sample.prompt_key,
                                    sample.sample_id));
    }
    return *p;
  }
  for (const auto& e : entries_) {
    if (std::find(e.task_tags.begin(), e.task_tags.end(), sample.task) != e.task_tags.end()) {
      return e;
    }
  }
  return fallback();
}

bool PromptLibrary::has_route_for(std::string_view task) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const EditPrompt& e) {
    return std::find(e.task_tags.begin(), e.task_tags.end(), task) != e.task_tags.end();
  });
}

LeakCheck check_leakage(std::string_view candidate, const bench::Sample& sample) {
  auto haystack = text::normalize(candidate);
  auto leaks = [&](std::string_view needle) {
    auto n = text::normalize(needle);
    return n.size() >= kMinLeakNeedle && haystack.find(n) != std::string::npos;
  };
  if (leaks(sample.gold_answer)) {
    return {true, fmt::format("contains the gold answer '{}'", sample.gold_answer)};
  }
  for (const auto& o : sample.options) {
    if (leaks(o.text)) {
      return {true, fmt::format("contains the text of option {} ('{}')", o.label, o.text)};
    }
  }
  return {};
}

std::string render_prompt(const EditPrompt& prompt, const bench::Sample& sample) {
  std::string out;
  std::string_view t = prompt.template_text;
  std::size_t pos = 0;
  for (std::size_t hit = t.find(kQuestionPlaceholder); hit != std::string_view::npos;
       hit = t.find(kQuestionPlaceholder, pos)) {
    out.append(t.substr(pos, hit - pos));
    out.append(sample.question);
    pos = hit + kQuestionPlaceholder.size();
  }
  out.append(t.substr(pos));

  if (auto leak = check_leakage(out, sample); leak.leaked) {
    throw PromptError(PromptErrc::LeakageDetected,
                      fmt::format("LeakageDetected: prompt '{}' for sample '{}' {}", prompt.key,
                                  sample.sample_id, leak.reason));
  }
  return out;
}

}  // namespace vthink::prompts
