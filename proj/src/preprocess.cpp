#include "scriptid/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <fmt/format.h>

#include "scriptid/error.hpp"

namespace scriptid {

BinaryImage::BinaryImage(std::size_t width, std::size_t height, std::vector<std::uint8_t> labels)
    : width_(width), height_(height), labels_(std::move(labels)) {
  if (labels_.size() != width_ * height_) throw ParameterError("BinaryImage: label count mismatch");
  for (auto v : labels_) {
    if (v > 1) throw ParameterError("BinaryImage: labels must be 0 or 1");
  }
}

GrayImage BinaryImage::to_gray() const {
  std::vector<double> v(labels_.begin(), labels_.end());
  return GrayImage(width_, height_, std::move(v));
}

Polarity parse_polarity(std::string_view s) {
  if (s == "auto") return Polarity::kAuto;
  if (s == "dark-ink") return Polarity::kDarkInk;
  if (s == "light-ink") return Polarity::kLightInk;
  throw ParameterError(fmt::format("unknown polarity '{}'", s));
}

std::string_view to_string(Polarity p) {
  switch (p) {
    case Polarity::kAuto: return "auto";
    case Polarity::kDarkInk: return "dark-ink";
    case Polarity::kLightInk: return "light-ink";
  }
  return "auto";
}

GaborInput parse_gabor_input(std::string_view s) {
  if (s == "smoothed-binary") return GaborInput::kSmoothedBinary;
  if (s == "gray") return GaborInput::kGray;
  throw ParameterError(fmt::format("unknown gabor input '{}'", s));
}

std::string_view to_string(GaborInput g) {
  return g == GaborInput::kGray ? "gray" : "smoothed-binary";
}

Histogram gray_histogram(const GrayImage& img) {
  Histogram hist{};
  for (double v : img.values()) ++hist[static_cast<std::size_t>(gray_level(v))];
  return hist;
}

namespace {

// Exact integer class sums make every candidate's variance reproducible
// bit-for-bit regardless of how the sums were accumulated.
double class_variance(std::uint64_t total, std::uint64_t sum_all, std::uint64_t n0, std::uint64_t s0) {
  const std::uint64_t n1 = total - n0;
  if (n0 == 0 || n1 == 0) return 0.0;
  const double mu0 = static_cast<double>(s0) / static_cast<double>(n0);
  const double mu1 = static_cast<double>(sum_all - s0) / static_cast<double>(n1);
  const double n = static_cast<double>(total);
  return (static_cast<double>(n0) / n) * (static_cast<double>(n1) / n) * (mu0 - mu1) * (mu0 - mu1);
}

}  // namespace

double between_class_variance(const Histogram& hist, int t) {
  std::uint64_t total = 0, sum_all = 0, n0 = 0, s0 = 0;
  for (int i = 0; i < 256; ++i) {
    total += hist[i];
    sum_all += static_cast<std::uint64_t>(i) * hist[i];
    if (i <= t) {
      n0 += hist[i];
      s0 += static_cast<std::uint64_t>(i) * hist[i];
    }
  }
  return class_variance(total, sum_all, n0, s0);
}

int otsu_threshold(const Histogram& hist) {
  const auto occupied = std::count_if(hist.begin(), hist.end(), [](std::uint64_t c) { return c > 0; });
  if (occupied == 0) throw ParameterError("otsu_threshold: empty histogram");
  if (occupied == 1) throw DegenerateError("otsu_threshold: histogram has a single occupied gray level");

  std::uint64_t total = 0;
  std::uint64_t sum_all = 0;
  for (int i = 0; i < 256; ++i) {
    total += hist[i];
    sum_all += static_cast<std::uint64_t>(i) * hist[i];
  }
  std::uint64_t n0 = 0;
  std::uint64_t s0 = 0;
  double best = -1.0;
  int best_t = 0;
  for (int t = 0; t < 256; ++t) {
    n0 += hist[t];
    s0 += static_cast<std::uint64_t>(t) * hist[t];
    const double var = class_variance(total, sum_all, n0, s0);
    if (var > best) {
      best = var;
      best_t = t;
    }
  }
  return best_t;
}

int otsu_threshold(const GrayImage& img) {
  if (img.empty()) throw ParameterError("otsu_threshold: image has no pixels");
  return otsu_threshold(gray_histogram(img));
}

BinaryImage binarize(const GrayImage& img, int threshold, Polarity polarity) {
  if (threshold < 0 || threshold > 255) {
    throw ParameterError(fmt::format("binarize: threshold {} outside [0,255]", threshold));
  }
  if (polarity == Polarity::kAuto) polarity = img.mean() > 0.5 ? Polarity::kDarkInk : Polarity::kLightInk;
  const bool dark = polarity == Polarity::kDarkInk;
  std::vector<std::uint8_t> labels(img.size());
  const auto v = img.values();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int level = gray_level(v[i]);
    labels[i] = static_cast<std::uint8_t>(dark ? level <= threshold : level > threshold);
  }
  return BinaryImage(img.width(), img.height(), std::move(labels));
}

GrayImage gaussian_smooth(const GrayImage& img, double sigma, int radius) {
  if (!(sigma > 0.0)) throw ParameterError(fmt::format("gaussian_smooth: sigma must be > 0, got {}", sigma));
  if (radius < 1) throw ParameterError(fmt::format("gaussian_smooth: radius must be >= 1, got {}", radius));

  std::vector<double> kernel(2 * static_cast<std::size_t>(radius) + 1);
  double z = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double g = std::exp(-static_cast<double>(i * i) / (2.0 * sigma * sigma));
    kernel[static_cast<std::size_t>(i + radius)] = g;
    z += g;
  }
  for (double& g : kernel) g /= z;

  const auto w = static_cast<std::ptrdiff_t>(img.width());
  const auto h = static_cast<std::ptrdiff_t>(img.height());
  if (w == 0 || h == 0) return img;
  auto clampi = [](std::ptrdiff_t i, std::ptrdiff_t n) { return std::clamp<std::ptrdiff_t>(i, 0, n - 1); };

  std::vector<double> tmp(img.size());
  const auto src = img.values();
  for (std::ptrdiff_t r = 0; r < h; ++r) {
    for (std::ptrdiff_t c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        acc += kernel[static_cast<std::size_t>(i + radius)] * src[static_cast<std::size_t>(r * w + clampi(c + i, w))];
      }
      tmp[static_cast<std::size_t>(r * w + c)] = acc;
    }
  }
  std::vector<double> out(img.size());
  for (std::ptrdiff_t r = 0; r < h; ++r) {
    for (std::ptrdiff_t c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        acc += kernel[static_cast<std::size_t>(i + radius)] * tmp[static_cast<std::size_t>(clampi(r + i, h) * w + c)];
      }
      out[static_cast<std::size_t>(r * w + c)] = std::clamp(acc, 0.0, 1.0);
    }
  }
  return GrayImage(img.width(), img.height(), std::move(out));
}

GrayImage preprocess_page(const GrayImage& gray, const PreprocessConfig& cfg) {
  if (cfg.gabor_input == GaborInput::kGray) return gray;
  int t = 0;
  try {
    t = otsu_threshold(gray);
  } catch (const DegenerateError&) {
    // Blank page: no object pixels.
    return GrayImage(gray.width(), gray.height(), 0.0);
  }
  return gaussian_smooth(binarize(gray, t, cfg.polarity).to_gray(), cfg.smooth_sigma, cfg.smooth_radius);
}

}  // namespace scriptid
