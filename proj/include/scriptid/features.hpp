#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "scriptid/error.hpp"
#include "scriptid/gabor.hpp"
#include "scriptid/preprocess.hpp"
#include "scriptid/quadtree.hpp"

namespace scriptid {

inline constexpr std::size_t kFeatureCount = 2 * kSubbandCount;

enum class Stat : std::size_t { kEnergy = 0, kEntropy = 1 };

// 60 features; sub-band (nu, mu) contributes energy at 2 (6 (nu-1) + mu)
// and entropy right after it.
struct FeatureVector {
  std::array<double, kFeatureCount> values{};

  static constexpr std::size_t index(int scale, int orientation, Stat stat) {
    return 2 * FilterBank::index(scale, orientation) + static_cast<std::size_t>(stat);
  }
  double energy(int scale, int orientation) const { return values[index(scale, orientation, Stat::kEnergy)]; }
  double entropy(int scale, int orientation) const { return values[index(scale, orientation, Stat::kEntropy)]; }

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

// e_v1_o0, h_v1_o0, e_v1_o1, ..., h_v5_o5
const std::vector<std::string>& feature_column_names();

// Mean squared magnitude (1/P) sum |J|^2.
double energy(const SubbandResponse& r);

// Shannon entropy (bits) of p = |J|^2 / sum |J|^2; 0 for an all-zero response.
double entropy(const SubbandResponse& r);

FeatureVector features_from_responses(std::span<const SubbandResponse> responses);
FeatureVector extract_features(const GrayImage& block, const FilterBank& bank);
FeatureVector extract_features(const GrayImage& block, const SpectralFilterBank& bank);

struct LabeledSample {
  FeatureVector features;
  std::string label;
  std::string page_id;
  int level = 0;
  std::size_t row = 0;
  std::size_t col = 0;
};

struct Dataset {
  std::vector<std::string> classes;
  std::vector<LabeledSample> samples;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }

  // Position of label in classes; throws DataError when absent.
  std::size_t class_index(std::string_view label) const;
  std::vector<std::size_t> class_counts() const;
  std::vector<std::size_t> label_indices() const;

  // Checks that every label is declared and every feature finite.
  void validate() const;

  Dataset subset(std::span<const std::size_t> indices) const;
};

// A page either already in memory or to be loaded from disk.
struct PageSource {
  std::string page_id;
  std::string label;
  std::variant<std::filesystem::path, GrayImage> source;
};

struct ExtractConfig {
  int level = 2;
  PreprocessConfig preprocess;
  double min_foreground = 0.0;        // drop blocks whose foreground ratio is below this
  double foreground_threshold = 0.5;  // object pixel test used by the ratio
  std::function<void(std::string_view)> warn;  // defaults to stderr when empty
};

// Loads (if needed) and converts a page to grayscale; I/O and format errors
// are rethrown with the page id in the message.
GrayImage load_page(const PageSource& page);

struct BlockFeatures {
  std::size_t row = 0;
  std::size_t col = 0;
  double foreground = 0.0;
  bool kept = true;
  FeatureVector features;
};

// Steps for one page: preprocess, decompose, filter, extract. Blocks failing
// the foreground filter are returned with kept = false and zero features.
std::vector<BlockFeatures> extract_page(const GrayImage& gray, const FilterBank& bank, const ExtractConfig& cfg);

// Runs extract_page over every page. Classes are the labels in order of
// first appearance; samples are ordered by page, then block row-major.
Dataset extract_dataset(std::span<const PageSource> pages, const FilterBank& bank, const ExtractConfig& cfg);

// Dataset directory layout root/<label>/<page>.(png|bmp). Labels and pages
// are sorted by name; page ids are file stems.
std::vector<PageSource> scan_dataset_dir(const std::filesystem::path& root);

// Malformed feature CSV; line is 1-based.
class CsvFormatError : public FormatError {
 public:
  CsvFormatError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

void write_feature_csv(std::ostream& out, const Dataset& ds);
void write_feature_csv(const std::filesystem::path& path, const Dataset& ds);
Dataset read_feature_csv(std::istream& in);
Dataset read_feature_csv(const std::filesystem::path& path);

}  // namespace scriptid
