#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "scriptid/features.hpp"
#include "scriptid/mlp.hpp"

namespace scriptid {

inline constexpr int kModelFormatVersion = 1;
inline constexpr const char* kFeatureContractTag = "e/h v1..v5 o0..o5";

// Feature-extraction settings a model was trained under. Prediction must use
// the same values or the features are not comparable.
struct ExtractionSettings {
  int level = 2;
  double gabor_sigma = kDefaultGaborSigma;
  int kernel_size = kDefaultKernelSize;
  OrientationStep orientation_step = OrientationStep::kPiOver6;
  PreprocessConfig preprocess;

  friend bool operator==(const ExtractionSettings&, const ExtractionSettings&) = default;
};

nlohmann::json to_json(const ExtractionSettings& s);
ExtractionSettings extraction_settings_from_json(const nlohmann::json& j);

struct StoredModel {
  MlpModel model;
  ExtractionSettings extraction;
};

nlohmann::json model_to_json(const MlpModel& model, const ExtractionSettings& extraction);
StoredModel model_from_json(const nlohmann::json& j);

void save_model(const std::filesystem::path& path, const MlpModel& model, const ExtractionSettings& extraction);
StoredModel load_model(const std::filesystem::path& path);

}  // namespace scriptid
