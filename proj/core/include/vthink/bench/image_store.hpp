#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "vthink/common/bytes.hpp"
#include "vthink/common/error.hpp"

namespace vthink::bench {

enum class ImageFormat { Png, Jpeg, Gif, Bmp, Webp };

std::string_view to_string(ImageFormat f);

/// Header sniffing only; no pixel decoding.
std::optional<ImageFormat> sniff_image_format(ByteView bytes);

struct ImageBlob {
  Bytes bytes;
  std::string content_hash;  // sha256 hex of bytes
  ImageFormat format = ImageFormat::Png;
};

enum class ImageErrc { NotFound, UnreadableImage };

std::string_view to_string(ImageErrc e);

using ImageError = CodedError<ImageErrc>;

class ImageSource {
 public:
  virtual ~ImageSource() = default;
  virtual ImageBlob load(std::string_view image_ref) const = 0;
};

/// Resolves image references (relative paths or file:// URIs) under a root
/// directory. References escaping the root are treated as missing.
class ImageStore final : public ImageSource {
 public:
  explicit ImageStore(std::filesystem::path root);

  ImageBlob load(std::string_view image_ref) const override;

  [[nodiscard]] const std::filesystem::path& root() const noexcept { return root_; }

 private:
  std::filesystem::path root_;
};

/// Serves the same small valid PNG for every reference. Used when replaying
/// transcripts, where original pixels are not needed.
class PlaceholderImageSource final : public ImageSource {
 public:
  ImageBlob load(std::string_view image_ref) const override;
};

}  // namespace vthink::bench
