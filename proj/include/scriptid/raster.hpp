#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace scriptid {

using Rgb = std::array<std::uint8_t, 3>;

// 8-bit RGB raster, row-major.
class RgbImage {
 public:
  RgbImage() = default;
  RgbImage(std::size_t width, std::size_t height, Rgb fill = {0, 0, 0});
  RgbImage(std::size_t width, std::size_t height, std::vector<Rgb> data);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  bool empty() const { return data_.empty(); }

  const Rgb& at(std::size_t row, std::size_t col) const { return data_[row * width_ + col]; }
  Rgb& at(std::size_t row, std::size_t col) { return data_[row * width_ + col]; }

  std::span<const Rgb> pixels() const { return data_; }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<Rgb> data_;
};

// Intensity raster with values in [0,1], row-major. The constructor taking
// data validates length and range; mutable access is unchecked and callers
// that write through it are responsible for keeping values in range.
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(std::size_t width, std::size_t height, double fill = 0.0);
  GrayImage(std::size_t width, std::size_t height, std::vector<double> data);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double at(std::size_t row, std::size_t col) const { return data_[row * width_ + col]; }
  double& at(std::size_t row, std::size_t col) { return data_[row * width_ + col]; }

  std::span<const double> values() const { return data_; }
  std::span<double> values() { return data_; }

  // Copy of the window [row, row+h) x [col, col+w). The window must lie
  // inside the image.
  GrayImage crop(std::size_t row, std::size_t col, std::size_t w, std::size_t h) const;

  double mean() const;

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<double> data_;
};

// Decodes an 8-bit BMP (palette, RLE8, 24- or 32-bit) or 8-bit PNG. The
// format is chosen from the file signature, not the extension.
RgbImage load_image(const std::filesystem::path& path);

RgbImage decode_bmp(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_bmp(const RgbImage& img);  // 24-bit BI_RGB

RgbImage load_png(const std::filesystem::path& path);

// Writes an 8-bit grayscale PNG; intensities are quantized as round(255 v).
void save_png(const std::filesystem::path& path, const GrayImage& img);
void save_png(const std::filesystem::path& path, const RgbImage& img);

// Binary (P5) PGM, 8-bit.
void save_pgm(const std::filesystem::path& path, std::size_t width, std::size_t height,
              std::span<const std::uint8_t> data);

// BT.601 luma, (0.299 r + 0.587 g + 0.114 b) / 255.
GrayImage to_grayscale(const RgbImage& img);

// Gray level in [0,255] used by histogramming and binarization.
inline int gray_level(double v) {
  const double q = v * 255.0 + 0.5;
  return q <= 0.0 ? 0 : q >= 255.0 ? 255 : static_cast<int>(q);
}

}  // namespace scriptid
