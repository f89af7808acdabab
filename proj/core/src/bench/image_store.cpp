#include "vthink/bench/image_store.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>
#include <iterator>

#include <fmt/format.h>

#include "vthink/common/hash.hpp"

namespace vthink::bench {

namespace fs = std::filesystem;

std::string_view to_string(ImageFormat f) {
  switch (f) {
    case ImageFormat::Png: return "png";
    case ImageFormat::Jpeg: return "jpeg";
    case ImageFormat::Gif: return "gif";
    case ImageFormat::Bmp: return "bmp";
    case ImageFormat::Webp: return "webp";
  }
  return "png";
}

std::string_view to_string(ImageErrc e) {
  switch (e) {
    case ImageErrc::NotFound: return "NotFound";
    case ImageErrc::UnreadableImage: return "UnreadableImage";
  }
  return "NotFound";
}

namespace {

bool starts_with(ByteView b, std::string_view magic, std::size_t offset = 0) {
  if (b.size() < offset + magic.size()) return false;
  return std::memcmp(b.data() + offset, magic.data(), magic.size()) == 0;
}

}  // namespace

std::optional<ImageFormat> sniff_image_format(ByteView b) {
  if (starts_with(b, "\x89PNG\r\n\x1a\n")) return ImageFormat::Png;
  if (starts_with(b, "\xFF\xD8\xFF")) return ImageFormat::Jpeg;
  if (starts_with(b, "GIF87a") || starts_with(b, "GIF89a")) return ImageFormat::Gif;
  if (starts_with(b, "BM") && b.size() >= 26) return ImageFormat::Bmp;
  if (starts_with(b, "RIFF") && starts_with(b, "WEBP", 8)) return ImageFormat::Webp;
  return std::nullopt;
}

ImageStore::ImageStore(fs::path root) : root_(std::move(root)) {}

ImageBlob ImageStore::load(std::string_view image_ref) const {
  std::string_view ref = image_ref;
  if (ref.starts_with("file://")) {
    ref.remove_prefix(7);
  } else if (ref.find("://") != std::string_view::npos) {
    throw ImageError(ImageErrc::NotFound,
                     fmt::format("NotFound: unsupported image URI scheme '{}'", image_ref));
  }

  fs::path rel(ref);
  fs::path root = fs::weakly_canonical(root_);
  fs::path full = fs::weakly_canonical(rel.is_absolute() ? rel : root / rel);
  auto [root_end, _] = std::mismatch(root.begin(), root.end(), full.begin(), full.end());
  if (root_end != root.end()) {
    throw ImageError(ImageErrc::NotFound,
                     fmt::format("NotFound: '{}' resolves outside the data root", image_ref));
  }

  std::error_code ec;
  if (!fs::is_regular_file(full, ec)) {
    throw ImageError(ImageErrc::NotFound, fmt::format("NotFound: '{}'", full.string()));
  }
  std::ifstream in(full, std::ios::binary);
  if (!in) {
    throw ImageError(ImageErrc::NotFound, fmt::format("NotFound: cannot open '{}'", full.string()));
  }
  Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  auto format = sniff_image_format(bytes);
  if (!format) {
    throw ImageError(ImageErrc::UnreadableImage,
                     fmt::format("UnreadableImage: '{}' has no recognised image header", image_ref));
  }
  ImageBlob blob;
  blob.content_hash = sha256_hex(ByteView(bytes));
  blob.bytes = std::move(bytes);
  blob.format = *format;
  return blob;
}

namespace {

// 1x1 grey PNG.
constexpr std::array<std::uint8_t, 69> kPlaceholderPng = {
    0x89, 0x50, 0x4E, 0x47, 0x0D, 0x0A, 0x1A, 0x0A, 0x00, 0x00, 0x00, 0x0D, 0x49, 0x48,
    0x44, 0x52, 0x00, 0x00, 0x00, 0x01, 0x00, 0x00, 0x00, 0x01, 0x08, 0x00, 0x00, 0x00,
    0x00, 0x3A, 0x7E, 0x9B, 0x55, 0x00, 0x00, 0x00, 0x0C, 0x49, 0x44, 0x41, 0x54, 0x78,
    0xDA, 0x63, 0x68, 0x00, 0x00, 0x00, 0x82, 0x00, 0x81, 0x4C, 0x17, 0xD7, 0xDF, 0x00,
    0x00, 0x00, 0x00, 0x49, 0x45, 0x4E, 0x44, 0xAE, 0x42, 0x60, 0x82};

}  // namespace

ImageBlob PlaceholderImageSource::load(std::string_view) const {
  ImageBlob blob;
  blob.bytes.assign(kPlaceholderPng.begin(), kPlaceholderPng.end());
  blob.content_hash = sha256_hex(ByteView(blob.bytes));
  blob.format = ImageFormat::Png;
  return blob;
}

}  // namespace vthink::bench
