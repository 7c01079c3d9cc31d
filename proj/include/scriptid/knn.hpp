#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "scriptid/mlp.hpp"

namespace scriptid {

// k-nearest-neighbour classifier on min-max scaled features (scaler fitted
// on the training set). Neighbours are ranked by Euclidean distance, ties by
// training index; vote ties go to the tied label met first in that ranking.
class KnnClassifier {
 public:
  KnnClassifier(const Dataset& train, std::size_t k);

  // Vote fractions per class, plus the winning class.
  Prediction predict(std::span<const double> features) const;

  std::size_t k() const { return k_; }

 private:
  std::vector<std::string> classes_;
  std::vector<std::size_t> labels_;
  MinMaxScaler scaler_;
  Eigen::MatrixXd scaled_;
  std::size_t k_;
};

std::string knn_predict(const Dataset& train, const FeatureVector& fv, std::size_t k = 1);

}  // namespace scriptid
