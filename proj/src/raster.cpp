#include "scriptid/raster.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>

#include <fmt/format.h>

#include "scriptid/error.hpp"

namespace scriptid {

RgbImage::RgbImage(std::size_t width, std::size_t height, Rgb fill)
    : width_(width), height_(height), data_(width * height, fill) {}

RgbImage::RgbImage(std::size_t width, std::size_t height, std::vector<Rgb> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (data_.size() != width_ * height_) {
    throw ParameterError(fmt::format("RgbImage: {} pixels given for {}x{}", data_.size(), width_, height_));
  }
}

GrayImage::GrayImage(std::size_t width, std::size_t height, double fill)
    : width_(width), height_(height), data_(width * height, fill) {
  if (!(fill >= 0.0 && fill <= 1.0)) {
    throw ParameterError(fmt::format("GrayImage: fill value {} outside [0,1]", fill));
  }
}

GrayImage::GrayImage(std::size_t width, std::size_t height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (data_.size() != width_ * height_) {
    throw ParameterError(fmt::format("GrayImage: {} values given for {}x{}", data_.size(), width_, height_));
  }
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!(data_[i] >= 0.0 && data_[i] <= 1.0)) {
      throw ParameterError(fmt::format("GrayImage: value {} at index {} outside [0,1]", data_[i], i));
    }
  }
}

GrayImage GrayImage::crop(std::size_t row, std::size_t col, std::size_t w, std::size_t h) const {
  if (row + h > height_ || col + w > width_) {
    throw ParameterError(fmt::format("crop window {}x{} at ({},{}) exceeds {}x{} image", w, h, row, col,
                                     width_, height_));
  }
  GrayImage out(w, h);
  for (std::size_t r = 0; r < h; ++r) {
    const double* src = data_.data() + (row + r) * width_ + col;
    std::copy(src, src + w, out.data_.data() + r * w);
  }
  return out;
}

double GrayImage::mean() const {
  if (data_.empty()) return 0.0;
  return std::accumulate(data_.begin(), data_.end(), 0.0) / static_cast<double>(data_.size());
}

GrayImage to_grayscale(const RgbImage& img) {
  std::vector<double> out(img.width() * img.height());
  const auto px = img.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    // Integer numerator keeps the result correctly rounded: a gray triple
    // (v,v,v) gives exactly v/255.
    const long num = 299L * px[i][0] + 587L * px[i][1] + 114L * px[i][2];
    out[i] = std::clamp(static_cast<double>(num) / 255000.0, 0.0, 1.0);
  }
  return GrayImage(img.width(), img.height(), std::move(out));
}

RgbImage load_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError(fmt::format("error reading '{}'", path.string()));

  static constexpr std::uint8_t kPngSig[8] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
  if (bytes.size() >= 8 && std::equal(kPngSig, kPngSig + 8, bytes.begin())) {
    return load_png(path);
  }
  if (bytes.size() >= 2 && bytes[0] == 'B' && bytes[1] == 'M') {
    try {
      return decode_bmp(bytes);
    } catch (const FormatError& e) {
      throw FormatError(fmt::format("'{}': {}", path.string(), e.what()));
    }
  }
  throw FormatError(fmt::format("'{}': unsupported image format (expected BMP or PNG)", path.string()));
}

void save_pgm(const std::filesystem::path& path, std::size_t width, std::size_t height,
              std::span<const std::uint8_t> data) {
  if (data.size() != width * height) throw ParameterError("save_pgm: data size mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  const std::string header = fmt::format("P5\n{} {}\n255\n", width, height);
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError(fmt::format("error writing '{}'", path.string()));
}

}  // namespace scriptid
