#include "vthink/pipeline/cache.hpp"

#include <chrono>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "vthink/common/hash.hpp"

namespace vthink::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

std::string thought_cache_key(std::string_view image_hash, std::string_view instruction,
                              const gateway::GenParams& params) {
  Sha256 h;
  h.update_field("vthink.thought.v1");
  h.update_field(image_hash);
  h.update_field(instruction);
  h.update_field(std::to_string(params.steps));
  h.update_field(fmt::format("{:.17g}", params.cfg_text));
  h.update_field(fmt::format("{:.17g}", params.cfg_image));
  h.update_field(params.seed ? std::to_string(*params.seed) : std::string("none"));
  return h.hex_digest();
}

ThoughtCache::ThoughtCache(fs::path root) : root_(std::move(root)) {}

fs::path ThoughtCache::image_path(const std::string& key) const {
  return root_ / key.substr(0, 2) / (key + ".png");
}

fs::path ThoughtCache::meta_path(const std::string& key) const {
  return root_ / key.substr(0, 2) / (key + ".meta");
}

namespace {

std::optional<std::string> read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_atomically(const fs::path& target, std::string_view data) {
  thread_local std::mt19937_64 rng{std::random_device{}() ^
                                   std::hash<std::thread::id>{}(std::this_thread::get_id())};
  auto tmp = target;
  tmp += fmt::format(".tmp-{:016x}", rng());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(fmt::format("cache: cannot write '{}'", tmp.string()));
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw std::runtime_error(fmt::format("cache: short write to '{}'", tmp.string()));
  }
  fs::rename(tmp, target);
}

}  // namespace

LookupResult ThoughtCache::lookup(const std::string& key) const {
  auto meta_text = read_file(meta_path(key));
  auto image = read_file(image_path(key));
  if (!meta_text || !image) return {LookupStatus::Miss, std::nullopt};

  auto meta = json::parse(*meta_text, nullptr, false);
  if (meta.is_discarded() || !meta.is_object() || !meta.contains("image_sha256") ||
      !meta["image_sha256"].is_string()) {
    return {LookupStatus::Corrupt, std::nullopt};
  }
  if (sha256_hex(std::string_view(*image)) != meta["image_sha256"].get<std::string>()) {
    return {LookupStatus::Corrupt, std::nullopt};
  }
  CachedThought thought;
  try {
    thought.instruction = meta.at("instruction").get<std::string>();
    thought.params = gateway::gen_params_from_json(meta.at("params"));
  } catch (const std::exception&) {
    return {LookupStatus::Corrupt, std::nullopt};
  }
  thought.source_image_hash = meta.value("source_image_hash", std::string());
  if (thought_cache_key(thought.source_image_hash, thought.instruction, thought.params) != key) {
    return {LookupStatus::Corrupt, std::nullopt};
  }
  thought.image = to_bytes(*image);
  return {LookupStatus::Hit, std::move(thought)};
}

void ThoughtCache::store(const std::string& key, const CachedThought& thought) const {
  fs::create_directories(image_path(key).parent_path());
  auto created = std::chrono::duration_cast<std::chrono::seconds>(
                     std::chrono::system_clock::now().time_since_epoch())
                     .count();
  json meta = {{"instruction", thought.instruction},
               {"params", gateway::to_json(thought.params)},
               {"source_image_hash", thought.source_image_hash},
               {"image_sha256", sha256_hex(ByteView(thought.image))},
               {"created_at", created}};
  // Image first: a reader only trusts an entry once its sidecar exists.
  write_atomically(image_path(key), as_string_view(thought.image));
  write_atomically(meta_path(key), meta.dump(2) + "\n");
}

}  // namespace vthink::pipeline
