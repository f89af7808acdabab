#pragma once

#include <atomic>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "vthink/common/bytes.hpp"
#include "vthink/gateway/types.hpp"

namespace vthink::pipeline {

/// Content hash of everything that determines an edit: original image
/// content, instruction, steps, both guidance scales and the seed. The
/// question is deliberately not part of the key.
std::string thought_cache_key(std::string_view image_hash, std::string_view instruction,
                              const gateway::GenParams& params);

struct CachedThought {
  std::string source_image_hash;  // hash of the original image the edit was made from
  Bytes image;
  std::string instruction;
  gateway::GenParams params;
};

enum class LookupStatus { Hit, Miss, Corrupt };

struct LookupResult {
  LookupStatus status = LookupStatus::Miss;
  std::optional<CachedThought> thought;
};

/// Content-addressed store of generated images:
///   <root>/<key[0:2]>/<key>.png   image bytes
///   <root>/<key[0:2]>/<key>.meta  JSON: instruction, params, source_image_hash,
///                                 image_sha256, created_at
/// Writes go to a temporary file and are renamed into place. Concurrent
/// writers of the same key write identical content; the last rename wins.
class ThoughtCache {
 public:
  explicit ThoughtCache(std::filesystem::path root);

  /// A sidecar/image hash mismatch or unreadable entry reports Corrupt,
  /// which callers treat as a miss.
  LookupResult lookup(const std::string& key) const;
  void store(const std::string& key, const CachedThought& thought) const;

  [[nodiscard]] std::filesystem::path image_path(const std::string& key) const;
  [[nodiscard]] std::filesystem::path meta_path(const std::string& key) const;
  [[nodiscard]] const std::filesystem::path& root() const noexcept { return root_; }

 private:
  std::filesystem::path root_;
};

}  // namespace vthink::pipeline
