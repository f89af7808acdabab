#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "vthink/bench/image_store.hpp"
#include "vthink/bench/manifest.hpp"
#include "vthink/common/bytes.hpp"

namespace vthink::testing {

std::filesystem::path data_dir();

/// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  [[nodiscard]] const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Valid single-colour RGB PNG.
Bytes tiny_png(std::uint8_t r, std::uint8_t g, std::uint8_t b, int side = 4);

/// Four-option multiple-choice sample; `answer_index` selects the gold label.
bench::Sample mc_sample(const std::string& id, const std::string& task = "counting",
                        bench::Category category = bench::Category::Perception,
                        const std::string& source = "MME", int answer_index = 0);

/// `n` samples over `tasks` tasks, round-robin, with images images/<id>.png.
std::vector<bench::Sample> synthetic_samples(std::size_t n, std::size_t tasks = 4);

/// In-memory image source serving a distinct PNG per image reference.
class MemoryImages final : public bench::ImageSource {
 public:
  bench::ImageBlob load(std::string_view image_ref) const override;
};

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace vthink::testing
