#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "scriptid/scriptid.hpp"

namespace scriptid::cli {

// Stable process exit codes.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,            // parameter errors and anything unclassified
  kEmptyDataset = 2,       // missing/empty dataset directory, or nothing extracted
  kUnreadablePage = 3,     // an image could not be read or decoded
  kMalformedCsv = 4,       // feature CSV does not follow the column contract
  kContractMismatch = 5,   // predict flags differ from the model's extraction settings
  kDegenerateDataset = 6,  // fewer than two classes, or a class smaller than the fold count
  kUsage = 64,             // command-line parse error
};

struct RunConfig {
  // extraction
  int level = 2;
  double gabor_sigma = kDefaultGaborSigma;
  int kernel_size = kDefaultKernelSize;
  std::string orientation_step = "pi/6";
  std::string polarity = "auto";
  std::string gabor_input = "smoothed-binary";
  double smooth_sigma = 1.0;
  int smooth_radius = 3;
  double min_foreground = 0.0;

  // evaluation / training
  std::size_t folds = 3;
  std::uint64_t seed = 42;
  std::string classifier = "mlp";
  std::size_t knn_k = 1;
  bool no_stratify = false;
  std::vector<int> hidden{35};
  int epochs = 500;
  double lr = 0.1;
  double momentum = 0.9;
  double l2 = 0.0;

  bool json = false;

  ExtractionSettings extraction() const;
  ExtractConfig extract_config() const;
  FilterBank bank() const;
  CvConfig cv_config() const;

  // Parses the enumerated fields and checks every precondition; throws
  // ParameterError before any work starts.
  void validate() const;
};

struct SynthArgs {
  std::size_t classes = 6;
  std::size_t pages = 10;
  double noise = 0.1;
  std::size_t page_size = 256;
  std::filesystem::path out;
};

struct ExtractArgs {
  std::filesystem::path dataset;
  std::filesystem::path out;
};

struct TrainArgs {
  std::filesystem::path features;
  std::filesystem::path model;
};

struct EvalArgs {
  std::filesystem::path features;
  std::filesystem::path dataset;
  std::filesystem::path report;
  std::string sweep_levels;
  std::filesystem::path sweep_out;
};

struct PredictArgs {
  std::filesystem::path model;
  std::filesystem::path image;
};

struct DumpArgs {
  std::filesystem::path out;
};

int cmd_synth(const SynthArgs& args, const RunConfig& cfg);
int cmd_extract(const ExtractArgs& args, const RunConfig& cfg);
int cmd_train(const TrainArgs& args, const RunConfig& cfg);
int cmd_eval(const EvalArgs& args, const RunConfig& cfg);
int cmd_predict(const PredictArgs& args, const RunConfig& cfg);
int cmd_dump_kernels(const DumpArgs& args, const RunConfig& cfg);

}  // namespace scriptid::cli
