#include "vthink/scoring/extract.hpp"

#include <cctype>
#include <vector>

#include "vthink/common/text.hpp"

namespace vthink::scoring {

std::string_view to_string(ExtractionRule r) {
  switch (r) {
    case ExtractionRule::OptionLabel: return "option_label";
    case ExtractionRule::OptionText: return "option_text";
    case ExtractionRule::YesNo: return "yes_no";
    case ExtractionRule::Unparseable: return "unparseable";
  }
  return "unparseable";
}

std::optional<ExtractionRule> parse_extraction_rule(std::string_view s) {
  for (auto r : {ExtractionRule::OptionLabel, ExtractionRule::OptionText, ExtractionRule::YesNo,
                 ExtractionRule::Unparseable}) {
    if (to_string(r) == s) return r;
  }
  return std::nullopt;
}

namespace {

bool is_wrapper(char c) { return c == '(' || c == ')' || c == '[' || c == ']' || c == '{' || c == '}'; }
bool is_trailing_punct(char c) { return c == '.' || c == ':' || c == ',' || c == ';' || c == '!' || c == '?'; }
bool is_quote(char c) { return c == '"' || c == '\'' || c == '*' || c == '`'; }

std::vector<std::string_view> whitespace_tokens(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t b = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > b) out.push_back(s.substr(b, i - b));
  }
  return out;
}

std::optional<std::string> match_label(std::string_view raw, std::span<const bench::Option> options) {
  auto tokens = whitespace_tokens(raw);
  for (auto tok : tokens) {
    bool decorated = false;
    std::string_view core = tok;
    while (!core.empty() && (is_quote(core.front()) || is_wrapper(core.front()))) {
      decorated |= is_wrapper(core.front());
      core.remove_prefix(1);
    }
    while (!core.empty() && (is_quote(core.back()) || is_wrapper(core.back()) ||
                             is_trailing_punct(core.back()))) {
      decorated |= is_wrapper(core.back()) || core.back() == '.' || core.back() == ':';
      core.remove_suffix(1);
    }
    if (core.empty()) continue;
    bool has_lower = false;
    for (char c : core) has_lower |= std::islower(static_cast<unsigned char>(c)) != 0;
    bool whole_response = tokens.size() == 1;
    for (const auto& o : options) {
      if (text::to_upper(core) != text::to_upper(text::trim(o.label))) continue;
      bool single_letter = core.size() == 1;
      if (single_letter && has_lower && !decorated && !whole_response) continue;
      return text::to_upper(text::trim(o.label));
    }
  }
  return std::nullopt;
}

std::optional<std::string> match_option_text(std::string_view raw,
                                             std::span<const bench::Option> options) {
  auto hay = text::normalize(raw);
  std::size_t best_len = 0;
  std::optional<std::string> best;
  for (const auto& o : options) {
    auto needle = text::normalize(o.text);
    if (needle.empty()) continue;
    if (text::find_word(hay, needle) != std::string_view::npos && needle.size() > best_len) {
      best_len = needle.size();
      best = text::to_upper(text::trim(o.label));
    }
  }
  return best;
}

bool is_yes_no_text(std::string_view s) {
  auto n = text::normalize(s);
  return n == "yes" || n == "no";
}

std::optional<std::string> match_yes_no(std::string_view raw, std::span<const bench::Option> options) {
  if (!options.empty()) {
    for (const auto& o : options) {
      if (!is_yes_no_text(o.text)) return std::nullopt;
    }
  }
  auto words = text::word_tokens(raw);
  for (const auto& w : words) {
    if (w != "yes" && w != "no") continue;
    if (options.empty()) return text::to_upper(w);
    for (const auto& o : options) {
      if (text::normalize(o.text) == w) return text::to_upper(text::trim(o.label));
    }
  }
  return std::nullopt;
}

}  // namespace

Extraction extract_answer(std::string_view raw, std::span<const bench::Option> options) {
  if (auto label = match_label(raw, options)) return {std::move(label), ExtractionRule::OptionLabel};
  if (auto label = match_option_text(raw, options)) return {std::move(label), ExtractionRule::OptionText};
  if (auto yn = match_yes_no(raw, options)) return {std::move(yn), ExtractionRule::YesNo};
  return {std::nullopt, ExtractionRule::Unparseable};
}

bool is_correct(const Extraction& extraction, const bench::Sample& sample) {
  return extraction.answer && *extraction.answer == sample.gold_normalized;
}

}  // namespace vthink::scoring
