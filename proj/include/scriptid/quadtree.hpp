#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "scriptid/raster.hpp"

namespace scriptid {

inline constexpr int kMaxLevel = 6;

// One leaf of a fixed-level quad-tree.
struct Block {
  int level = 0;
  std::size_t row = 0;
  std::size_t col = 0;
  GrayImage pixels;
};

struct PageDecomposition {
  std::string page_id;
  int level = 0;
  std::vector<Block> blocks;  // row-major: index = row * 2^level + col

  std::size_t blocks_per_side() const { return std::size_t{1} << level; }
};

// Pads on the right and bottom with 0.0 up to the next multiple of 2^level.
GrayImage pad_to_level(const GrayImage& img, int level);

// Splits the padded page into 4^level equal blocks. Level must be in
// [0, kMaxLevel].
PageDecomposition decompose(const GrayImage& img, int level, std::string page_id = {});

// Inverse of decompose: tiles the blocks back into the padded page.
GrayImage reassemble(const PageDecomposition& decomposition);

// Fraction of pixels strictly above threshold.
double foreground_ratio(const Block& block, double threshold = 0.5);

}  // namespace scriptid
