#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace vthink::text {

std::string to_lower(std::string_view s);
std::string to_upper(std::string_view s);
std::string trim(std::string_view s);

/// Lowercase, collapse whitespace runs to one space, trim.
std::string normalize(std::string_view s);

/// Lowercased maximal runs of ASCII letters/digits.
std::vector<std::string> word_tokens(std::string_view s);

/// True if `needle` occurs in `haystack` after normalizing both. An empty
/// normalized needle never matches.
bool contains_normalized(std::string_view haystack, std::string_view needle);

/// Finds `needle` in `haystack` at a position not adjacent to another
/// alphanumeric character. Both arguments are used as given.
std::size_t find_word(std::string_view haystack, std::string_view needle);

}  // namespace vthink::text
