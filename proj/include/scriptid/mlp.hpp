#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "scriptid/features.hpp"

namespace scriptid {

// Per-feature min-max scaling to [0,1], fitted on training rows. Constant
// features map to 0; values outside the fitted range are clamped.
struct MinMaxScaler {
  std::vector<double> min;
  std::vector<double> max;

  static MinMaxScaler fit(const Eigen::MatrixXd& rows);
  std::size_t dim() const { return min.size(); }
  Eigen::MatrixXd transform(const Eigen::MatrixXd& rows) const;
  Eigen::RowVectorXd transform(std::span<const double> row) const;
};

// Rows = samples, columns = the 60 features in contract order.
Eigen::MatrixXd feature_matrix(const Dataset& ds);

struct TrainConfig {
  int epochs = 500;
  double learning_rate = 0.1;
  double momentum = 0.9;
  std::uint64_t seed = 42;
  std::vector<int> hidden_sizes{35};
  double l2 = 0.0;

  void validate() const;
};

struct DenseLayer {
  Eigen::MatrixXd weights;  // outputs x inputs
  Eigen::VectorXd bias;
};

// Feed-forward net: sigmoid hidden layers, softmax output. The scaler is
// part of the model; probabilities() applies it, forward() does not.
struct MlpModel {
  std::vector<std::string> class_labels;
  std::size_t input_dim = kFeatureCount;
  std::vector<int> hidden_sizes;
  std::vector<DenseLayer> layers;
  MinMaxScaler scaler;
  TrainConfig train_config;

  std::size_t class_count() const { return class_labels.size(); }

  // Softmax outputs for already-scaled rows.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& scaled_rows) const;

  // Scales the raw feature row, then runs forward().
  Eigen::RowVectorXd probabilities(std::span<const double> features) const;
};

// Layers chained input_dim -> hidden_sizes... -> classes, every weight and
// bias drawn uniformly from [-0.5, 0.5] with a seeded mt19937_64. The scaler
// is the identity on [0,1].
MlpModel init_mlp(std::size_t input_dim, const std::vector<int>& hidden_sizes,
                  std::vector<std::string> class_labels, std::uint64_t seed);

// Mean cross-entropy of scaled rows against class indices, plus
// (l2 / 2) * sum of squared weights (biases excluded).
double cross_entropy(const MlpModel& model, const Eigen::MatrixXd& scaled_rows, std::span<const std::size_t> labels,
                     double l2 = 0.0);

struct Gradients {
  double loss = 0.0;
  std::vector<DenseLayer> layers;  // same shapes as the model's layers
};

// Backpropagated gradient of cross_entropy().
Gradients loss_gradient(const MlpModel& model, const Eigen::MatrixXd& scaled_rows,
                        std::span<const std::size_t> labels, double l2 = 0.0);

struct TrainStats {
  std::vector<double> loss_history;  // loss before each epoch's update
  double final_loss = 0.0;
  double train_accuracy = 0.0;
};

// Full-batch gradient descent with momentum on raw rows. Fits the scaler on
// `rows`; deterministic given (rows, labels, cfg).
MlpModel train_mlp(const Eigen::MatrixXd& rows, std::span<const std::size_t> labels,
                   std::vector<std::string> class_labels, const TrainConfig& cfg, TrainStats* stats = nullptr);

// Dataset front end: checks for >= 2 classes with samples and finite
// features before training.
MlpModel train_mlp(const Dataset& train, const TrainConfig& cfg, TrainStats* stats = nullptr);

struct Prediction {
  std::size_t class_index = 0;
  std::string label;
  std::vector<double> probabilities;
};

// Argmax of the softmax output, ties to the earliest class.
Prediction predict(const MlpModel& model, std::span<const double> features);
inline Prediction predict(const MlpModel& model, const FeatureVector& fv) { return predict(model, fv.values); }

}  // namespace scriptid
