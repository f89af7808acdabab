#include "support/fixtures.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include <zlib.h>

#include "vthink/common/hash.hpp"

namespace vthink::testing {

namespace fs = std::filesystem;

fs::path data_dir() { return VTHINK_TEST_DATA_DIR; }

TempDir::TempDir() {
  std::random_device rd;
  auto base = fs::temp_directory_path();
  for (;;) {
    auto candidate = base / ("vthink-test-" + std::to_string(rd()));
    if (fs::create_directory(candidate)) {
      path_ = candidate;
      return;
    }
  }
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

namespace {

void put_u32(Bytes& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

void chunk(Bytes& out, const char* tag, const Bytes& data) {
  put_u32(out, static_cast<std::uint32_t>(data.size()));
  Bytes body(tag, tag + 4);
  body.insert(body.end(), data.begin(), data.end());
  out.insert(out.end(), body.begin(), body.end());
  put_u32(out, static_cast<std::uint32_t>(crc32(0, body.data(), static_cast<uInt>(body.size()))));
}

}  // namespace

Bytes tiny_png(std::uint8_t r, std::uint8_t g, std::uint8_t b, int side) {
  Bytes raw;
  for (int y = 0; y < side; ++y) {
    raw.push_back(0);
    for (int x = 0; x < side; ++x) raw.insert(raw.end(), {r, g, b});
  }
  uLongf len = compressBound(static_cast<uLong>(raw.size()));
  Bytes packed(len);
  compress(packed.data(), &len, raw.data(), static_cast<uLong>(raw.size()));
  packed.resize(len);

  Bytes out = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  Bytes ihdr;
  put_u32(ihdr, static_cast<std::uint32_t>(side));
  put_u32(ihdr, static_cast<std::uint32_t>(side));
  ihdr.insert(ihdr.end(), {8, 2, 0, 0, 0});
  chunk(out, "IHDR", ihdr);
  chunk(out, "IDAT", packed);
  chunk(out, "IEND", {});
  return out;
}

bench::Sample mc_sample(const std::string& id, const std::string& task, bench::Category category,
                        const std::string& source, int answer_index) {
  bench::Sample s;
  s.sample_id = id;
  s.image_ref = "images/" + id + ".png";
  s.question = "Which colour is the largest object in " + id + "?";
  s.options = {{"A", "crimson"}, {"B", "turquoise"}, {"C", "amber"}, {"D", "violet"}};
  s.gold_answer = std::string(1, static_cast<char>('A' + answer_index));
  s.gold_normalized = s.gold_answer;
  s.task = task;
  s.category = category;
  s.source = source;
  return s;
}

std::vector<bench::Sample> synthetic_samples(std::size_t n, std::size_t tasks) {
  std::vector<bench::Sample> out;
  for (std::size_t i = 0; i < n; ++i) {
    auto cat = bench::kAllCategories[(i % tasks) % bench::kAllCategories.size()];
    char id[32];
    std::snprintf(id, sizeof id, "s%04zu", i);
    out.push_back(mc_sample(id, "task-" + std::to_string(i % tasks), cat,
                            i % 2 == 0 ? "BenchA" : "BenchB", static_cast<int>(i % 4)));
  }
  return out;
}

bench::ImageBlob MemoryImages::load(std::string_view image_ref) const {
  auto h = stable_hash64(image_ref);
  auto bytes = tiny_png(static_cast<std::uint8_t>(h), static_cast<std::uint8_t>(h >> 8),
                        static_cast<std::uint8_t>(h >> 16));
  bench::ImageBlob blob;
  blob.content_hash = sha256_hex(ByteView(bytes));
  blob.bytes = std::move(bytes);
  blob.format = bench::ImageFormat::Png;
  return blob;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << content;
}

}  // namespace vthink::testing
