#include <cstring>
#include <memory>

#include <fmt/format.h>
#include <png.h>

#include "scriptid/error.hpp"
#include "scriptid/raster.hpp"

namespace scriptid {
namespace {

struct PngImageGuard {
  png_image* image;
  ~PngImageGuard() { png_image_free(image); }
};

void write_png(const std::filesystem::path& path, std::size_t width, std::size_t height,
               png_uint_32 format, const std::vector<std::uint8_t>& buffer) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = format;
  if (!png_image_write_to_file(&image, path.string().c_str(), 0, buffer.data(), 0, nullptr)) {
    throw IoError(fmt::format("cannot write PNG '{}': {}", path.string(), image.message));
  }
}

}  // namespace

RgbImage load_png(const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  PngImageGuard guard{&image};
  if (!png_image_begin_read_from_file(&image, path.string().c_str())) {
    throw FormatError(fmt::format("'{}': PNG decode failed: {}", path.string(), image.message));
  }
  if (image.format & PNG_FORMAT_FLAG_LINEAR) {
    throw FormatError(fmt::format("'{}': 16-bit PNG is not supported (8-bit gray or RGB only)", path.string()));
  }

  // Read in the file's own channel layout so no color conversion happens;
  // palettes expand to RGB and alpha is ignored.
  const bool gray = (image.format & PNG_FORMAT_FLAG_COLOR) == 0;
  const bool alpha = (image.format & PNG_FORMAT_FLAG_ALPHA) != 0;
  png_uint_32 format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  if (alpha) format |= PNG_FORMAT_FLAG_ALPHA;
  image.format = format;

  const std::size_t channels = PNG_IMAGE_SAMPLE_CHANNELS(format);
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    throw FormatError(fmt::format("'{}': PNG decode failed: {}", path.string(), image.message));
  }

  const std::size_t w = image.width;
  const std::size_t h = image.height;
  std::vector<Rgb> px(w * h);
  for (std::size_t i = 0; i < px.size(); ++i) {
    const std::uint8_t* p = buffer.data() + i * channels;
    px[i] = gray ? Rgb{p[0], p[0], p[0]} : Rgb{p[0], p[1], p[2]};
  }
  return RgbImage(w, h, std::move(px));
}

void save_png(const std::filesystem::path& path, const GrayImage& img) {
  std::vector<std::uint8_t> buffer(img.size());
  const auto v = img.values();
  for (std::size_t i = 0; i < buffer.size(); ++i) buffer[i] = static_cast<std::uint8_t>(gray_level(v[i]));
  write_png(path, img.width(), img.height(), PNG_FORMAT_GRAY, buffer);
}

void save_png(const std::filesystem::path& path, const RgbImage& img) {
  std::vector<std::uint8_t> buffer;
  buffer.reserve(img.width() * img.height() * 3);
  for (const Rgb& p : img.pixels()) buffer.insert(buffer.end(), p.begin(), p.end());
  write_png(path, img.width(), img.height(), PNG_FORMAT_RGB, buffer);
}

}  // namespace scriptid
