#include "scriptid/model_io.hpp"

#include <fstream>

#include <fmt/format.h>

namespace scriptid {

nlohmann::json to_json(const ExtractionSettings& s) {
  return {{"level", s.level},
          {"gabor_sigma", s.gabor_sigma},
          {"kernel_size", s.kernel_size},
          {"orientation_step", to_string(s.orientation_step)},
          {"polarity", to_string(s.preprocess.polarity)},
          {"gabor_input", to_string(s.preprocess.gabor_input)},
          {"smooth_sigma", s.preprocess.smooth_sigma},
          {"smooth_radius", s.preprocess.smooth_radius}};
}

ExtractionSettings extraction_settings_from_json(const nlohmann::json& j) {
  ExtractionSettings s;
  s.level = j.at("level").get<int>();
  s.gabor_sigma = j.at("gabor_sigma").get<double>();
  s.kernel_size = j.at("kernel_size").get<int>();
  s.orientation_step = parse_orientation_step(j.at("orientation_step").get<std::string>());
  s.preprocess.polarity = parse_polarity(j.at("polarity").get<std::string>());
  s.preprocess.gabor_input = parse_gabor_input(j.at("gabor_input").get<std::string>());
  s.preprocess.smooth_sigma = j.at("smooth_sigma").get<double>();
  s.preprocess.smooth_radius = j.at("smooth_radius").get<int>();
  return s;
}

nlohmann::json model_to_json(const MlpModel& model, const ExtractionSettings& extraction) {
  nlohmann::json scaler = nlohmann::json::array();
  for (std::size_t i = 0; i < model.scaler.dim(); ++i) scaler.push_back({model.scaler.min[i], model.scaler.max[i]});

  nlohmann::json weights = nlohmann::json::array();
  nlohmann::json biases = nlohmann::json::array();
  for (const DenseLayer& layer : model.layers) {
    nlohmann::json w = nlohmann::json::array();
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) row.push_back(layer.weights(r, c));
      w.push_back(std::move(row));
    }
    weights.push_back(std::move(w));
    biases.push_back(std::vector<double>(layer.bias.data(), layer.bias.data() + layer.bias.size()));
  }

  const TrainConfig& tc = model.train_config;
  return {{"format_version", kModelFormatVersion},
          {"class_labels", model.class_labels},
          {"input_dim", model.input_dim},
          {"hidden_sizes", model.hidden_sizes},
          {"activation", {{"hidden", "sigmoid"}, {"output", "softmax"}}},
          {"scaler", scaler},
          {"weights", weights},
          {"biases", biases},
          {"train_config",
           {{"epochs", tc.epochs},
            {"learning_rate", tc.learning_rate},
            {"momentum", tc.momentum},
            {"seed", tc.seed},
            {"hidden_sizes", tc.hidden_sizes},
            {"l2", tc.l2}}},
          {"feature_contract", kFeatureContractTag},
          {"extraction", to_json(extraction)}};
}

StoredModel model_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format_version").get<int>() != kModelFormatVersion) {
      throw FormatError(fmt::format("unsupported model format_version {}", j.at("format_version").dump()));
    }
    if (j.at("feature_contract").get<std::string>() != kFeatureContractTag) {
      throw FormatError("model was trained on a different feature layout");
    }
    StoredModel out;
    MlpModel& m = out.model;
    m.class_labels = j.at("class_labels").get<std::vector<std::string>>();
    m.input_dim = j.at("input_dim").get<std::size_t>();
    m.hidden_sizes = j.at("hidden_sizes").get<std::vector<int>>();

    for (const auto& pair : j.at("scaler")) {
      m.scaler.min.push_back(pair.at(0).get<double>());
      m.scaler.max.push_back(pair.at(1).get<double>());
    }
    if (m.scaler.dim() != m.input_dim) throw FormatError("model scaler does not match input_dim");

    const auto& weights = j.at("weights");
    const auto& biases = j.at("biases");
    if (weights.size() != m.hidden_sizes.size() + 1 || biases.size() != weights.size()) {
      throw FormatError("model layer count does not match hidden_sizes");
    }
    std::size_t fan_in = m.input_dim;
    for (std::size_t l = 0; l < weights.size(); ++l) {
      const std::size_t fan_out = l < m.hidden_sizes.size() ? static_cast<std::size_t>(m.hidden_sizes[l])
                                                           : m.class_labels.size();
      const auto& w = weights[l];
      const auto& b = biases[l];
      if (w.size() != fan_out || b.size() != fan_out) throw FormatError(fmt::format("layer {} has wrong shape", l));
      DenseLayer layer;
      layer.weights.resize(static_cast<Eigen::Index>(fan_out), static_cast<Eigen::Index>(fan_in));
      layer.bias.resize(static_cast<Eigen::Index>(fan_out));
      for (std::size_t r = 0; r < fan_out; ++r) {
        if (w[r].size() != fan_in) throw FormatError(fmt::format("layer {} row {} has wrong width", l, r));
        for (std::size_t c = 0; c < fan_in; ++c) {
          layer.weights(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = w[r][c].get<double>();
        }
        layer.bias(static_cast<Eigen::Index>(r)) = b[r].get<double>();
      }
      m.layers.push_back(std::move(layer));
      fan_in = fan_out;
    }

    const auto& tc = j.at("train_config");
    m.train_config.epochs = tc.at("epochs").get<int>();
    m.train_config.learning_rate = tc.at("learning_rate").get<double>();
    m.train_config.momentum = tc.at("momentum").get<double>();
    m.train_config.seed = tc.at("seed").get<std::uint64_t>();
    m.train_config.hidden_sizes = tc.at("hidden_sizes").get<std::vector<int>>();
    m.train_config.l2 = tc.at("l2").get<double>();

    out.extraction = extraction_settings_from_json(j.at("extraction"));
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(fmt::format("malformed model file: {}", e.what()));
  } catch (const ParameterError& e) {
    throw FormatError(fmt::format("malformed model file: {}", e.what()));
  }
}

void save_model(const std::filesystem::path& path, const MlpModel& model, const ExtractionSettings& extraction) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  out << model_to_json(model, extraction).dump(2) << '\n';
  if (!out) throw IoError(fmt::format("error writing '{}'", path.string()));
}

StoredModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(fmt::format("'{}' is not valid JSON: {}", path.string(), e.what()));
  }
  return model_from_json(j);
}

}  // namespace scriptid
