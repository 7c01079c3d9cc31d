#include "scriptid/features.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>

#include <fmt/format.h>

namespace scriptid {

const std::vector<std::string>& feature_column_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    n.reserve(kFeatureCount);
    for (int nu = 1; nu <= kScaleCount; ++nu) {
      for (int mu = 0; mu < kOrientationCount; ++mu) {
        n.push_back(fmt::format("e_v{}_o{}", nu, mu));
        n.push_back(fmt::format("h_v{}_o{}", nu, mu));
      }
    }
    return n;
  }();
  return names;
}

double energy(const SubbandResponse& r) {
  const auto v = r.values.values();
  if (v.empty()) throw ParameterError("energy: empty response");
  double sum = 0.0;
  for (const Complex& z : v) sum += std::norm(z);
  return sum / static_cast<double>(v.size());
}

double entropy(const SubbandResponse& r) {
  const auto v = r.values.values();
  if (v.empty()) throw ParameterError("entropy: empty response");
  double total = 0.0;
  for (const Complex& z : v) total += std::norm(z);
  if (total == 0.0) return 0.0;
  double h = 0.0;
  for (const Complex& z : v) {
    const double p = std::norm(z) / total;
    if (p > 0.0) h -= p * std::log2(p);
  }
  return std::max(h, 0.0);
}

FeatureVector features_from_responses(std::span<const SubbandResponse> responses) {
  if (responses.size() != static_cast<std::size_t>(kSubbandCount)) {
    throw ParameterError(fmt::format("expected {} sub-band responses, got {}", kSubbandCount, responses.size()));
  }
  FeatureVector fv;
  for (const SubbandResponse& r : responses) {
    fv.values[FeatureVector::index(r.scale, r.orientation, Stat::kEnergy)] = energy(r);
    fv.values[FeatureVector::index(r.scale, r.orientation, Stat::kEntropy)] = entropy(r);
  }
  return fv;
}

FeatureVector extract_features(const GrayImage& block, const FilterBank& bank) {
  return features_from_responses(filter_block(block, bank));
}

FeatureVector extract_features(const GrayImage& block, const SpectralFilterBank& bank) {
  return features_from_responses(bank.filter(block));
}

std::size_t Dataset::class_index(std::string_view label) const {
  const auto it = std::find(classes.begin(), classes.end(), label);
  if (it == classes.end()) throw DataError(fmt::format("label '{}' is not a declared class", label));
  return static_cast<std::size_t>(it - classes.begin());
}

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(classes.size(), 0);
  for (const auto& s : samples) ++counts[class_index(s.label)];
  return counts;
}

std::vector<std::size_t> Dataset::label_indices() const {
  std::vector<std::size_t> idx;
  idx.reserve(samples.size());
  for (const auto& s : samples) idx.push_back(class_index(s.label));
  return idx;
}

void Dataset::validate() const {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    class_index(s.label);
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      if (!std::isfinite(s.features.values[f])) {
        throw DataError(fmt::format("sample {} (page '{}', block {},{}): feature {} is not finite", i, s.page_id,
                                    s.row, s.col, feature_column_names()[f]));
      }
    }
  }
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.classes = classes;
  out.samples.reserve(indices.size());
  for (std::size_t i : indices) out.samples.push_back(samples.at(i));
  return out;
}

GrayImage load_page(const PageSource& page) {
  if (const auto* img = std::get_if<GrayImage>(&page.source)) return *img;
  const auto& path = std::get<std::filesystem::path>(page.source);
  try {
    return to_grayscale(load_image(path));
  } catch (const IoError& e) {
    throw IoError(fmt::format("page '{}': {}", page.page_id, e.what()));
  } catch (const FormatError& e) {
    throw FormatError(fmt::format("page '{}': {}", page.page_id, e.what()));
  }
}

namespace {

class SpectralCache {
 public:
  explicit SpectralCache(const FilterBank& bank) : bank_(bank) {}

  const SpectralFilterBank& get(std::size_t w, std::size_t h) {
    auto it = cache_.find({w, h});
    if (it == cache_.end()) it = cache_.emplace(std::pair{w, h}, SpectralFilterBank(bank_, w, h)).first;
    return it->second;
  }

 private:
  const FilterBank& bank_;
  std::map<std::pair<std::size_t, std::size_t>, SpectralFilterBank> cache_;
};

std::vector<BlockFeatures> extract_page_cached(const GrayImage& gray, SpectralCache& cache,
                                               const ExtractConfig& cfg) {
  const GrayImage prepared = preprocess_page(gray, cfg.preprocess);
  const PageDecomposition dec = decompose(prepared, cfg.level);
  std::vector<BlockFeatures> out;
  out.reserve(dec.blocks.size());
  for (const Block& b : dec.blocks) {
    BlockFeatures bf;
    bf.row = b.row;
    bf.col = b.col;
    bf.foreground = foreground_ratio(b, cfg.foreground_threshold);
    bf.kept = cfg.min_foreground <= 0.0 || bf.foreground >= cfg.min_foreground;
    if (bf.kept) bf.features = extract_features(b.pixels, cache.get(b.pixels.width(), b.pixels.height()));
    out.push_back(bf);
  }
  return out;
}

void check_config(const ExtractConfig& cfg) {
  if (cfg.level < 0 || cfg.level > kMaxLevel) {
    throw ParameterError(fmt::format("decomposition level {} outside [0,{}]", cfg.level, kMaxLevel));
  }
  if (cfg.preprocess.gabor_input == GaborInput::kSmoothedBinary) {
    if (!(cfg.preprocess.smooth_sigma > 0.0)) throw ParameterError("smoothing sigma must be > 0");
    if (cfg.preprocess.smooth_radius < 1) throw ParameterError("smoothing radius must be >= 1");
  }
}

}  // namespace

std::vector<BlockFeatures> extract_page(const GrayImage& gray, const FilterBank& bank, const ExtractConfig& cfg) {
  check_config(cfg);
  SpectralCache cache(bank);
  return extract_page_cached(gray, cache, cfg);
}

Dataset extract_dataset(std::span<const PageSource> pages, const FilterBank& bank, const ExtractConfig& cfg) {
  if (pages.empty()) throw ParameterError("extract_dataset: no pages");
  if (cfg.level < 1 || cfg.level > kMaxLevel) {
    throw ParameterError(fmt::format("decomposition level {} outside [1,{}]", cfg.level, kMaxLevel));
  }
  check_config(cfg);

  Dataset ds;
  for (const PageSource& p : pages) {
    if (std::find(ds.classes.begin(), ds.classes.end(), p.label) == ds.classes.end()) ds.classes.push_back(p.label);
  }

  SpectralCache cache(bank);
  std::size_t dropped = 0;
  for (const PageSource& p : pages) {
    const GrayImage gray = load_page(p);
    for (const BlockFeatures& bf : extract_page_cached(gray, cache, cfg)) {
      if (!bf.kept) {
        ++dropped;
        continue;
      }
      ds.samples.push_back(LabeledSample{bf.features, p.label, p.page_id, cfg.level, bf.row, bf.col});
    }
  }

  auto warn = [&](const std::string& msg) {
    if (cfg.warn) {
      cfg.warn(msg);
    } else {
      std::cerr << "warning: " << msg << '\n';
    }
  };
  if (ds.samples.empty()) {
    warn(fmt::format("all {} blocks fell below min-foreground {}; dataset is empty", dropped, cfg.min_foreground));
  } else if (dropped > 0) {
    warn(fmt::format("dropped {} of {} blocks below min-foreground {}", dropped, dropped + ds.samples.size(),
                     cfg.min_foreground));
  }
  return ds;
}

}  // namespace scriptid
