#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "scriptid/knn.hpp"
#include "scriptid/metrics.hpp"
#include "scriptid/mlp.hpp"

namespace scriptid {

struct Fold {
  std::vector<std::size_t> train;  // ascending sample indices
  std::vector<std::size_t> test;
};

// Stratified: each class's samples are shuffled with the seeded RNG and dealt
// round-robin into k folds, the dealing position carrying over from one class
// to the next. Unstratified: the whole dataset is shuffled and dealt.
std::vector<Fold> kfold_split(const Dataset& ds, std::size_t k, std::uint64_t seed, bool stratify = true);

enum class ClassifierKind { kMlp, kKnn };

ClassifierKind parse_classifier(std::string_view s);
std::string_view to_string(ClassifierKind c);

struct CvConfig {
  std::size_t folds = 3;
  std::uint64_t seed = 42;
  bool stratify = true;
  ClassifierKind classifier = ClassifierKind::kMlp;
  TrainConfig train;
  std::size_t knn_k = 1;
};

struct CvResult {
  EvalReport aggregate;             // pooled over every test fold
  std::vector<EvalReport> per_fold;
  std::vector<std::size_t> fold_of;      // per sample
  std::vector<std::size_t> predicted;    // per sample, class index
  std::vector<std::vector<double>> probabilities;
};

// Seed of fold `fold`'s model, derived from the run seed.
std::uint64_t fold_seed(std::uint64_t seed, std::size_t fold);

CvResult cross_validate(const Dataset& ds, const CvConfig& cfg);

}  // namespace scriptid
