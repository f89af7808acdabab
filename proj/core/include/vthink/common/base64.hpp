#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "vthink/common/bytes.hpp"

namespace vthink {

std::string base64_encode(ByteView data);

/// Strict standard-alphabet decode with padding. Returns nullopt on any
/// malformed input.
std::optional<Bytes> base64_decode(std::string_view text);

}  // namespace vthink
