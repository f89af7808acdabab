#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "vthink/common/bytes.hpp"

namespace vthink {

/// Incremental SHA-256. Digests are lowercase hex.
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  Sha256& update(ByteView data);
  Sha256& update(std::string_view data);
  // Length-prefixed field, so that ("ab","c") and ("a","bc") hash differently.
  Sha256& update_field(std::string_view data);
  std::string hex_digest();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::string sha256_hex(ByteView data);
std::string sha256_hex(std::string_view data);

/// FNV-1a. Stable across platforms; used for seeds and mock decisions, never
/// for content addressing.
std::uint64_t stable_hash64(std::string_view data);

}  // namespace vthink
