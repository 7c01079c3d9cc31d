#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "scriptid/raster.hpp"

namespace scriptid {

// Two-tone raster: 1 = object (ink), 0 = background.
class BinaryImage {
 public:
  BinaryImage() = default;
  BinaryImage(std::size_t width, std::size_t height, std::vector<std::uint8_t> labels);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::uint8_t at(std::size_t row, std::size_t col) const { return labels_[row * width_ + col]; }
  std::span<const std::uint8_t> labels() const { return labels_; }

  // Labels as intensities (0.0 / 1.0), the input of the Gaussian denoiser.
  GrayImage to_gray() const;

  friend bool operator==(const BinaryImage&, const BinaryImage&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<std::uint8_t> labels_;
};

enum class Polarity {
  kAuto,      // dark ink if the page mean intensity exceeds 0.5
  kDarkInk,   // object = gray level <= t
  kLightInk,  // object = gray level > t
};

enum class GaborInput {
  kSmoothedBinary,
  kGray,
};

Polarity parse_polarity(std::string_view s);
std::string_view to_string(Polarity p);
GaborInput parse_gabor_input(std::string_view s);
std::string_view to_string(GaborInput g);

using Histogram = std::array<std::uint64_t, 256>;

Histogram gray_histogram(const GrayImage& img);

// Otsu's global threshold over the 256-bin histogram of round(255 v).
// Returns the smallest t maximizing the between-class variance, with bins
// <= t forming class 0. Throws DegenerateError when only one bin is occupied.
int otsu_threshold(const GrayImage& img);
int otsu_threshold(const Histogram& hist);

// Between-class variance w0 w1 (mu0 - mu1)^2 for a split after bin t.
double between_class_variance(const Histogram& hist, int t);

BinaryImage binarize(const GrayImage& img, int threshold, Polarity polarity = Polarity::kAuto);

// Separable Gaussian blur, kernel exp(-i^2 / 2 sigma^2) on [-radius, radius]
// normalized to unit sum, with edge replication at the borders.
GrayImage gaussian_smooth(const GrayImage& img, double sigma, int radius);

struct PreprocessConfig {
  Polarity polarity = Polarity::kAuto;
  GaborInput gabor_input = GaborInput::kSmoothedBinary;
  double smooth_sigma = 1.0;
  int smooth_radius = 3;

  friend bool operator==(const PreprocessConfig&, const PreprocessConfig&) = default;
};

// Page-level pipeline feeding the quad-tree: gray -> Otsu binarize ->
// Gaussian smooth (or the gray page itself for GaborInput::kGray). A page
// with a single gray level binarizes to all background.
GrayImage preprocess_page(const GrayImage& gray, const PreprocessConfig& cfg);

}  // namespace scriptid
