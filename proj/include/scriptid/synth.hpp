#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "scriptid/features.hpp"

namespace scriptid {

// One texture class: a square-wave stroke grating.
struct SynthClass {
  std::string label;
  double orientation = 0.0;  // radians; the grating varies along (sin, cos) in (row, col)
  double frequency = 0.0;    // radians per pixel
  double duty = 0.35;        // ink fraction of each period
};

struct SynthSpec {
  std::vector<SynthClass> classes;
  std::size_t page_width = 256;
  std::size_t page_height = 256;
  std::size_t pages_per_class = 10;
  double noise_level = 0.1;  // std-dev of additive Gaussian noise
  std::uint64_t seed = 42;

  void validate() const;
};

// Classes built from the Gabor bank's own wave vectors. With 6 classes:
// the six orientations at scale nu = 2. With more: orientations at nu = 2
// first, then at nu = 4 (11 classes = 12 combinations minus the last one).
// At most 12 classes.
SynthSpec default_synth_spec(std::size_t class_count, OrientationStep step = OrientationStep::kPiOver6);

// Dark ink (0) on white paper (1): a pixel is ink when its position within
// the grating period, offset by `phase`, falls in the first `duty` fraction.
// Noise is added, then values are clamped and quantized to 8-bit levels.
GrayImage gen_page(const SynthClass& cls, std::size_t width, std::size_t height, double noise_level,
                   std::uint64_t page_seed);

// Seed of page `page` of class `class_index`.
std::uint64_t synth_page_seed(std::uint64_t seed, std::size_t class_index, std::size_t page);

// Page ids are "{label}_{index}" with the index zero-padded to a common width.
std::string synth_page_id(const std::string& label, std::size_t page, std::size_t pages_per_class);

std::vector<PageSource> gen_corpus(const SynthSpec& spec);

// Writes out/<label>/<page_id>.png for every page; returns the paths.
std::vector<std::filesystem::path> write_corpus(const SynthSpec& spec, const std::filesystem::path& out_dir);

}  // namespace scriptid
