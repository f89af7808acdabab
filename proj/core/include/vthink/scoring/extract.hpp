#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "vthink/bench/manifest.hpp"

namespace vthink::scoring {

enum class ExtractionRule { OptionLabel, OptionText, YesNo, Unparseable };

std::string_view to_string(ExtractionRule r);
std::optional<ExtractionRule> parse_extraction_rule(std::string_view s);

struct Extraction {
  std::optional<std::string> answer;  // canonical: uppercased option label, or YES/NO
  ExtractionRule rule = ExtractionRule::Unparseable;

  bool operator==(const Extraction&) const = default;
};

/// Rule cascade, case-insensitive, first rule to fire wins:
///  1. a standalone option label token ("B", "(B)", "B.", "[b]");
///  2. an option text appearing verbatim as whole words (longest wins, ties
///     by option order);
///  3. yes/no for binary questions (no options, or Yes/No options);
///  4. Unparseable.
/// A bare lowercase single letter is not read as a label, so "a red car"
/// does not select option A.
Extraction extract_answer(std::string_view raw, std::span<const bench::Option> options);

bool is_correct(const Extraction& extraction, const bench::Sample& sample);

}  // namespace vthink::scoring
