#include "scriptid/synth.hpp"

#include <cmath>
#include <random>
#include <set>

#include <fmt/format.h>

namespace scriptid {

void SynthSpec::validate() const {
  if (classes.empty()) throw ParameterError("synth: no classes");
  std::set<std::pair<double, double>> seen;
  std::set<std::string> labels;
  for (const auto& c : classes) {
    if (c.label.empty()) throw ParameterError("synth: empty class label");
    if (!labels.insert(c.label).second) throw ParameterError(fmt::format("synth: duplicate label '{}'", c.label));
    if (!seen.insert({c.orientation, c.frequency}).second) {
      throw ParameterError(fmt::format("synth: class '{}' repeats another class's orientation and frequency", c.label));
    }
    if (!(c.frequency > 0.0)) throw ParameterError(fmt::format("synth: class '{}' frequency must be > 0", c.label));
    if (!(c.duty > 0.0 && c.duty < 1.0)) {
      throw ParameterError(fmt::format("synth: class '{}' duty cycle must be in (0,1)", c.label));
    }
  }
  if (page_width == 0 || page_height == 0 || page_width % 16 != 0 || page_height % 16 != 0) {
    throw ParameterError(fmt::format("synth: page size {}x{} must be a positive multiple of 16", page_width,
                                     page_height));
  }
  if (pages_per_class == 0) throw ParameterError("synth: pages per class must be >= 1");
  if (!(noise_level >= 0.0 && noise_level <= 0.5)) {
    throw ParameterError(fmt::format("synth: noise level {} outside [0,0.5]", noise_level));
  }
}

SynthSpec default_synth_spec(std::size_t class_count, OrientationStep step) {
  constexpr std::size_t kMaxClasses = 2 * kOrientationCount;
  if (class_count < 1 || class_count > kMaxClasses) {
    throw ParameterError(fmt::format("synth: class count {} outside [1,{}]", class_count, kMaxClasses));
  }
  SynthSpec spec;
  for (std::size_t i = 0; i < class_count; ++i) {
    const int scale = i < kOrientationCount ? 2 : 4;
    const int mu = static_cast<int>(i % kOrientationCount);
    const WaveVector k = wave_vector(scale, mu, step);
    const auto degrees = static_cast<int>(std::lround(k.orientation * 180.0 / std::numbers::pi));
    spec.classes.push_back(SynthClass{fmt::format("v{}_o{:03}", scale, degrees), k.orientation, k.frequency, 0.35});
  }
  return spec;
}

GrayImage gen_page(const SynthClass& cls, std::size_t width, std::size_t height, double noise_level,
                   std::uint64_t page_seed) {
  std::mt19937_64 rng(page_seed);
  std::uniform_real_distribution<double> phase_dist(0.0, 1.0);
  const double phase = phase_dist(rng);
  std::normal_distribution<double> noise(0.0, noise_level > 0.0 ? noise_level : 1.0);

  const double kr = cls.frequency * std::sin(cls.orientation);
  const double kc = cls.frequency * std::cos(cls.orientation);
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  std::vector<double> px(width * height);
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      const double cycles = (kr * static_cast<double>(r) + kc * static_cast<double>(c)) / kTwoPi + phase;
      const double pos = cycles - std::floor(cycles);
      double v = pos < cls.duty ? 0.0 : 1.0;
      if (noise_level > 0.0) v += noise(rng);
      px[r * width + c] = gray_level(std::clamp(v, 0.0, 1.0)) / 255.0;
    }
  }
  return GrayImage(width, height, std::move(px));
}

std::uint64_t synth_page_seed(std::uint64_t seed, std::size_t class_index, std::size_t page) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(class_index), static_cast<std::uint32_t>(page)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (std::uint64_t{out[0]} << 32) | out[1];
}

std::string synth_page_id(const std::string& label, std::size_t page, std::size_t pages_per_class) {
  const std::size_t width = fmt::format("{}", pages_per_class > 0 ? pages_per_class - 1 : 0).size();
  return fmt::format("{}_{:0{}}", label, page, width);
}

std::vector<PageSource> gen_corpus(const SynthSpec& spec) {
  spec.validate();
  std::vector<PageSource> pages;
  pages.reserve(spec.classes.size() * spec.pages_per_class);
  for (std::size_t ci = 0; ci < spec.classes.size(); ++ci) {
    const SynthClass& cls = spec.classes[ci];
    for (std::size_t p = 0; p < spec.pages_per_class; ++p) {
      pages.push_back(PageSource{synth_page_id(cls.label, p, spec.pages_per_class), cls.label,
                                 gen_page(cls, spec.page_width, spec.page_height, spec.noise_level,
                                          synth_page_seed(spec.seed, ci, p))});
    }
  }
  return pages;
}

std::vector<std::filesystem::path> write_corpus(const SynthSpec& spec, const std::filesystem::path& out_dir) {
  std::vector<std::filesystem::path> written;
  for (const PageSource& page : gen_corpus(spec)) {
    const auto dir = out_dir / page.label;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError(fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
    const auto path = dir / (page.page_id + ".png");
    save_png(path, std::get<GrayImage>(page.source));
    written.push_back(path);
  }
  return written;
}

}  // namespace scriptid
