#include "scriptid/crossval.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include <fmt/format.h>

namespace scriptid {

std::vector<Fold> kfold_split(const Dataset& ds, std::size_t k, std::uint64_t seed, bool stratify) {
  if (k < 2) throw ParameterError(fmt::format("fold count must be >= 2, got {}", k));
  const auto labels = ds.label_indices();

  std::vector<std::vector<std::size_t>> groups;
  if (stratify) {
    groups.resize(ds.classes.size());
    for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(i);
    for (std::size_t c = 0; c < groups.size(); ++c) {
      if (groups[c].size() < k) {
        throw StratificationError(fmt::format("class '{}' has {} samples, fewer than the {} folds", ds.classes[c],
                                              groups[c].size(), k));
      }
    }
  } else {
    if (ds.size() < k) throw ParameterError(fmt::format("{} samples cannot fill {} folds", ds.size(), k));
    groups.emplace_back(ds.size());
    std::iota(groups[0].begin(), groups[0].end(), std::size_t{0});
  }

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> fold_of(ds.size(), 0);
  std::size_t deal = 0;
  for (auto& g : groups) {
    std::shuffle(g.begin(), g.end(), rng);
    for (std::size_t i : g) fold_of[i] = deal++ % k;
  }

  std::vector<Fold> folds(k);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (std::size_t f = 0; f < k; ++f) (f == fold_of[i] ? folds[f].test : folds[f].train).push_back(i);
  }
  return folds;
}

ClassifierKind parse_classifier(std::string_view s) {
  if (s == "mlp") return ClassifierKind::kMlp;
  if (s == "knn") return ClassifierKind::kKnn;
  throw ParameterError(fmt::format("unknown classifier '{}' (expected mlp or knn)", s));
}

std::string_view to_string(ClassifierKind c) { return c == ClassifierKind::kKnn ? "knn" : "mlp"; }

std::uint64_t fold_seed(std::uint64_t seed, std::size_t fold) {
  // splitmix64 of (seed, fold)
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(fold) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

CvResult cross_validate(const Dataset& ds, const CvConfig& cfg) {
  ds.validate();
  const auto folds = kfold_split(ds, cfg.folds, cfg.seed, cfg.stratify);
  const auto labels = ds.label_indices();
  const std::size_t c = ds.classes.size();

  CvResult res;
  res.fold_of.assign(ds.size(), 0);
  res.predicted.assign(ds.size(), 0);
  res.probabilities.assign(ds.size(), std::vector<double>(c, 0.0));

  for (std::size_t f = 0; f < folds.size(); ++f) {
    const Dataset train = ds.subset(folds[f].train);
    std::vector<std::size_t> fold_truth;
    std::vector<std::size_t> fold_pred;
    std::vector<std::vector<double>> fold_prob;

    auto record = [&](std::size_t i, const Prediction& p) {
      res.fold_of[i] = f;
      res.predicted[i] = p.class_index;
      res.probabilities[i] = p.probabilities;
      fold_truth.push_back(labels[i]);
      fold_pred.push_back(p.class_index);
      fold_prob.push_back(p.probabilities);
    };

    if (cfg.classifier == ClassifierKind::kMlp) {
      TrainConfig tc = cfg.train;
      tc.seed = fold_seed(cfg.seed, f);
      const MlpModel model = train_mlp(train, tc);
      for (std::size_t i : folds[f].test) record(i, predict(model, ds.samples[i].features));
    } else {
      const KnnClassifier knn(train, cfg.knn_k);
      for (std::size_t i : folds[f].test) record(i, knn.predict(ds.samples[i].features.values));
    }
    res.per_fold.push_back(evaluate(fold_truth, fold_pred, fold_prob, ds.classes));
  }
  res.aggregate = evaluate(labels, res.predicted, res.probabilities, ds.classes);
  return res;
}

}  // namespace scriptid
