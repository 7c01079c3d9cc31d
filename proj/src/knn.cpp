#include "scriptid/knn.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

namespace scriptid {

KnnClassifier::KnnClassifier(const Dataset& train, std::size_t k) : classes_(train.classes), k_(k) {
  if (train.empty()) throw ParameterError("k-NN: empty training set");
  if (k < 1 || k > train.size()) {
    throw ParameterError(fmt::format("k-NN: k = {} must be in [1, {}]", k, train.size()));
  }
  train.validate();
  labels_ = train.label_indices();
  const Eigen::MatrixXd raw = feature_matrix(train);
  scaler_ = MinMaxScaler::fit(raw);
  scaled_ = scaler_.transform(raw);
}

Prediction KnnClassifier::predict(std::span<const double> features) const {
  if (features.size() != static_cast<std::size_t>(scaled_.cols())) {
    throw ParameterError(fmt::format("k-NN expects {} features, got {}", scaled_.cols(), features.size()));
  }
  const Eigen::RowVectorXd q = scaler_.transform(features);
  const Eigen::VectorXd dist2 = (scaled_.rowwise() - q).rowwise().squaredNorm();

  std::vector<std::size_t> order(labels_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dist2(static_cast<Eigen::Index>(a)) < dist2(static_cast<Eigen::Index>(b));
  });

  std::vector<std::size_t> votes(classes_.size(), 0);
  for (std::size_t i = 0; i < k_; ++i) ++votes[labels_[order[i]]];
  const std::size_t top = *std::max_element(votes.begin(), votes.end());

  Prediction out;
  for (std::size_t i = 0; i < k_; ++i) {
    if (votes[labels_[order[i]]] == top) {
      out.class_index = labels_[order[i]];
      break;
    }
  }
  out.label = classes_[out.class_index];
  out.probabilities.resize(classes_.size());
  for (std::size_t c = 0; c < classes_.size(); ++c) {
    out.probabilities[c] = static_cast<double>(votes[c]) / static_cast<double>(k_);
  }
  return out;
}

std::string knn_predict(const Dataset& train, const FeatureVector& fv, std::size_t k) {
  return KnnClassifier(train, k).predict(fv.values).label;
}

}  // namespace scriptid
