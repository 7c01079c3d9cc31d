#include "scriptid/quadtree.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "scriptid/error.hpp"

namespace scriptid {

GrayImage pad_to_level(const GrayImage& img, int level) {
  if (level < 0 || level > kMaxLevel) {
    throw ParameterError(fmt::format("level {} outside [0,{}]", level, kMaxLevel));
  }
  const std::size_t unit = std::size_t{1} << level;
  const std::size_t w = (img.width() + unit - 1) / unit * unit;
  const std::size_t h = (img.height() + unit - 1) / unit * unit;
  if (w == img.width() && h == img.height()) return img;
  GrayImage out(w, h, 0.0);
  for (std::size_t r = 0; r < img.height(); ++r) {
    for (std::size_t c = 0; c < img.width(); ++c) out.at(r, c) = img.at(r, c);
  }
  return out;
}

PageDecomposition decompose(const GrayImage& img, int level, std::string page_id) {
  if (level < 0 || level > kMaxLevel) {
    throw ParameterError(fmt::format("decomposition level {} outside [0,{}]", level, kMaxLevel));
  }
  if (img.empty()) throw ParameterError("decompose: empty image");
  const GrayImage padded = pad_to_level(img, level);
  const std::size_t side = std::size_t{1} << level;
  const std::size_t bw = padded.width() / side;
  const std::size_t bh = padded.height() / side;

  PageDecomposition out{std::move(page_id), level, {}};
  out.blocks.reserve(side * side);
  for (std::size_t r = 0; r < side; ++r) {
    for (std::size_t c = 0; c < side; ++c) {
      out.blocks.push_back(Block{level, r, c, padded.crop(r * bh, c * bw, bw, bh)});
    }
  }
  return out;
}

GrayImage reassemble(const PageDecomposition& decomposition) {
  const std::size_t side = decomposition.blocks_per_side();
  if (decomposition.blocks.size() != side * side) {
    throw ParameterError("reassemble: block count does not match level");
  }
  const std::size_t bw = decomposition.blocks.front().pixels.width();
  const std::size_t bh = decomposition.blocks.front().pixels.height();
  GrayImage out(bw * side, bh * side, 0.0);
  for (const Block& b : decomposition.blocks) {
    if (b.pixels.width() != bw || b.pixels.height() != bh) throw ParameterError("reassemble: unequal blocks");
    for (std::size_t r = 0; r < bh; ++r) {
      for (std::size_t c = 0; c < bw; ++c) out.at(b.row * bh + r, b.col * bw + c) = b.pixels.at(r, c);
    }
  }
  return out;
}

double foreground_ratio(const Block& block, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw ParameterError(fmt::format("foreground threshold {} outside [0,1]", threshold));
  }
  const auto v = block.pixels.values();
  if (v.empty()) return 0.0;
  const auto n = std::count_if(v.begin(), v.end(), [&](double x) { return x > threshold; });
  return static_cast<double>(n) / static_cast<double>(v.size());
}

}  // namespace scriptid
