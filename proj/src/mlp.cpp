#include "scriptid/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

namespace scriptid {

MinMaxScaler MinMaxScaler::fit(const Eigen::MatrixXd& rows) {
  MinMaxScaler s;
  s.min.resize(static_cast<std::size_t>(rows.cols()));
  s.max.resize(static_cast<std::size_t>(rows.cols()));
  for (Eigen::Index c = 0; c < rows.cols(); ++c) {
    s.min[static_cast<std::size_t>(c)] = rows.rows() ? rows.col(c).minCoeff() : 0.0;
    s.max[static_cast<std::size_t>(c)] = rows.rows() ? rows.col(c).maxCoeff() : 0.0;
  }
  return s;
}

Eigen::MatrixXd MinMaxScaler::transform(const Eigen::MatrixXd& rows) const {
  if (static_cast<std::size_t>(rows.cols()) != dim()) {
    throw ParameterError(fmt::format("scaler expects {} features, got {}", dim(), rows.cols()));
  }
  Eigen::MatrixXd out(rows.rows(), rows.cols());
  for (Eigen::Index c = 0; c < rows.cols(); ++c) {
    const double lo = min[static_cast<std::size_t>(c)];
    const double range = max[static_cast<std::size_t>(c)] - lo;
    for (Eigen::Index r = 0; r < rows.rows(); ++r) {
      out(r, c) = range > 0.0 ? std::clamp((rows(r, c) - lo) / range, 0.0, 1.0) : 0.0;
    }
  }
  return out;
}

Eigen::RowVectorXd MinMaxScaler::transform(std::span<const double> row) const {
  Eigen::MatrixXd m(1, static_cast<Eigen::Index>(row.size()));
  for (std::size_t i = 0; i < row.size(); ++i) m(0, static_cast<Eigen::Index>(i)) = row[i];
  return transform(m).row(0);
}

Eigen::MatrixXd feature_matrix(const Dataset& ds) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(ds.size()), static_cast<Eigen::Index>(kFeatureCount));
  for (std::size_t r = 0; r < ds.size(); ++r) {
    for (std::size_t c = 0; c < kFeatureCount; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = ds.samples[r].features.values[c];
    }
  }
  return m;
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ParameterError(fmt::format("epochs must be >= 1, got {}", epochs));
  if (!(learning_rate > 0.0)) throw ParameterError(fmt::format("learning rate must be > 0, got {}", learning_rate));
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw ParameterError(fmt::format("momentum must be in [0,1), got {}", momentum));
  }
  if (!(l2 >= 0.0)) throw ParameterError(fmt::format("l2 must be >= 0, got {}", l2));
  for (int h : hidden_sizes) {
    if (h < 1) throw ParameterError(fmt::format("hidden layer width must be >= 1, got {}", h));
  }
}

namespace {

Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& z) { return (1.0 + (-z.array()).exp()).inverse().matrix(); }

// Row-wise softmax, shifted by the row max.
Eigen::MatrixXd softmax_rows(Eigen::MatrixXd z) {
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    const double m = z.row(r).maxCoeff();
    z.row(r) = (z.row(r).array() - m).exp().matrix();
    z.row(r) /= z.row(r).sum();
  }
  return z;
}

Eigen::MatrixXd affine(const Eigen::MatrixXd& in, const DenseLayer& layer) {
  Eigen::MatrixXd z = in * layer.weights.transpose();
  z.rowwise() += layer.bias.transpose();
  return z;
}

// Activations of every layer; acts[0] is the input, acts.back() the softmax.
std::vector<Eigen::MatrixXd> forward_all(const MlpModel& model, const Eigen::MatrixXd& x) {
  std::vector<Eigen::MatrixXd> acts;
  acts.reserve(model.layers.size() + 1);
  acts.push_back(x);
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    Eigen::MatrixXd z = affine(acts.back(), model.layers[l]);
    acts.push_back(l + 1 == model.layers.size() ? softmax_rows(std::move(z)) : sigmoid(z));
  }
  return acts;
}

double weight_penalty(const MlpModel& model, double l2) {
  if (l2 == 0.0) return 0.0;
  double s = 0.0;
  for (const auto& layer : model.layers) s += layer.weights.squaredNorm();
  return 0.5 * l2 * s;
}

double mean_nll(const Eigen::MatrixXd& probs, std::span<const std::size_t> labels) {
  double loss = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double p = probs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(labels[i]));
    loss -= std::log(std::max(p, 1e-300));
  }
  return loss / static_cast<double>(labels.size());
}

void check_batch(const MlpModel& model, const Eigen::MatrixXd& x, std::span<const std::size_t> labels) {
  if (static_cast<std::size_t>(x.cols()) != model.input_dim) {
    throw ParameterError(fmt::format("model expects {} inputs, got {}", model.input_dim, x.cols()));
  }
  if (static_cast<std::size_t>(x.rows()) != labels.size()) throw ParameterError("row/label count mismatch");
  if (labels.empty()) throw ParameterError("empty batch");
  for (std::size_t y : labels) {
    if (y >= model.class_count()) throw ParameterError(fmt::format("label index {} out of range", y));
  }
}

std::size_t argmax(const Eigen::RowVectorXd& p) {
  std::size_t best = 0;
  for (Eigen::Index i = 1; i < p.size(); ++i) {
    if (p(i) > p(static_cast<Eigen::Index>(best))) best = static_cast<std::size_t>(i);
  }
  return best;
}

}  // namespace

Eigen::MatrixXd MlpModel::forward(const Eigen::MatrixXd& scaled_rows) const {
  return forward_all(*this, scaled_rows).back();
}

Eigen::RowVectorXd MlpModel::probabilities(std::span<const double> features) const {
  if (features.size() != input_dim) {
    throw ParameterError(fmt::format("model expects {} features, got {}", input_dim, features.size()));
  }
  const Eigen::MatrixXd x = scaler.transform(features);
  return forward(x).row(0);
}

MlpModel init_mlp(std::size_t input_dim, const std::vector<int>& hidden_sizes,
                  std::vector<std::string> class_labels, std::uint64_t seed) {
  if (input_dim == 0) throw ParameterError("input dimension must be >= 1");
  if (class_labels.size() < 2) throw DegenerateError("an MLP needs at least two classes");
  MlpModel model;
  model.class_labels = std::move(class_labels);
  model.input_dim = input_dim;
  model.hidden_sizes = hidden_sizes;
  model.scaler.min.assign(input_dim, 0.0);
  model.scaler.max.assign(input_dim, 1.0);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-0.5, 0.5);
  std::vector<std::size_t> widths{input_dim};
  for (int h : hidden_sizes) {
    if (h < 1) throw ParameterError(fmt::format("hidden layer width must be >= 1, got {}", h));
    widths.push_back(static_cast<std::size_t>(h));
  }
  widths.push_back(model.class_count());
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    DenseLayer layer;
    layer.weights.resize(static_cast<Eigen::Index>(widths[l + 1]), static_cast<Eigen::Index>(widths[l]));
    layer.bias.resize(static_cast<Eigen::Index>(widths[l + 1]));
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) layer.weights(r, c) = dist(rng);
    }
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias(r) = dist(rng);
    model.layers.push_back(std::move(layer));
  }
  return model;
}

double cross_entropy(const MlpModel& model, const Eigen::MatrixXd& scaled_rows, std::span<const std::size_t> labels,
                     double l2) {
  check_batch(model, scaled_rows, labels);
  return mean_nll(model.forward(scaled_rows), labels) + weight_penalty(model, l2);
}

Gradients loss_gradient(const MlpModel& model, const Eigen::MatrixXd& scaled_rows,
                        std::span<const std::size_t> labels, double l2) {
  check_batch(model, scaled_rows, labels);
  const auto acts = forward_all(model, scaled_rows);
  const auto n = static_cast<double>(labels.size());

  Gradients g;
  g.loss = mean_nll(acts.back(), labels) + weight_penalty(model, l2);
  g.layers.resize(model.layers.size());

  // Softmax + cross-entropy: dL/dz = (p - onehot) / n.
  Eigen::MatrixXd delta = acts.back();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    delta(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(labels[i])) -= 1.0;
  }
  delta /= n;

  for (std::size_t l = model.layers.size(); l-- > 0;) {
    g.layers[l].weights = delta.transpose() * acts[l];
    if (l2 != 0.0) g.layers[l].weights += l2 * model.layers[l].weights;
    g.layers[l].bias = delta.colwise().sum().transpose();
    if (l > 0) {
      const Eigen::MatrixXd& h = acts[l];
      delta = ((delta * model.layers[l].weights).array() * h.array() * (1.0 - h.array())).matrix();
    }
  }
  return g;
}

MlpModel train_mlp(const Eigen::MatrixXd& rows, std::span<const std::size_t> labels,
                   std::vector<std::string> class_labels, const TrainConfig& cfg, TrainStats* stats) {
  cfg.validate();
  MlpModel model = init_mlp(static_cast<std::size_t>(rows.cols()), cfg.hidden_sizes, std::move(class_labels), cfg.seed);
  model.train_config = cfg;
  model.scaler = MinMaxScaler::fit(rows);
  const Eigen::MatrixXd x = model.scaler.transform(rows);
  check_batch(model, x, labels);

  std::vector<DenseLayer> velocity;
  for (const auto& layer : model.layers) {
    velocity.push_back({Eigen::MatrixXd::Zero(layer.weights.rows(), layer.weights.cols()),
                        Eigen::VectorXd::Zero(layer.bias.size())});
  }
  if (stats) {
    stats->loss_history.clear();
    stats->loss_history.reserve(static_cast<std::size_t>(cfg.epochs));
  }
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const Gradients g = loss_gradient(model, x, labels, cfg.l2);
    if (stats) stats->loss_history.push_back(g.loss);
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
      velocity[l].weights = cfg.momentum * velocity[l].weights - cfg.learning_rate * g.layers[l].weights;
      velocity[l].bias = cfg.momentum * velocity[l].bias - cfg.learning_rate * g.layers[l].bias;
      model.layers[l].weights += velocity[l].weights;
      model.layers[l].bias += velocity[l].bias;
    }
  }

  if (stats) {
    const Eigen::MatrixXd probs = model.forward(x);
    stats->final_loss = mean_nll(probs, labels) + weight_penalty(model, cfg.l2);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      correct += argmax(probs.row(static_cast<Eigen::Index>(i))) == labels[i];
    }
    stats->train_accuracy = static_cast<double>(correct) / static_cast<double>(labels.size());
  }
  return model;
}

MlpModel train_mlp(const Dataset& train, const TrainConfig& cfg, TrainStats* stats) {
  train.validate();
  const auto counts = train.class_counts();
  const auto populated = std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; });
  if (populated < 2) {
    throw DegenerateError(fmt::format("training set has samples from {} class(es); at least 2 are required",
                                      populated));
  }
  const auto labels = train.label_indices();
  return train_mlp(feature_matrix(train), labels, train.classes, cfg, stats);
}

Prediction predict(const MlpModel& model, std::span<const double> features) {
  const Eigen::RowVectorXd p = model.probabilities(features);
  Prediction out;
  out.class_index = argmax(p);
  out.label = model.class_labels[out.class_index];
  out.probabilities.assign(p.data(), p.data() + p.size());
  return out;
}

}  // namespace scriptid
