#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "scriptid/crossval.hpp"
#include "scriptid/error.hpp"
#include "scriptid/knn.hpp"

using namespace scriptid;

namespace {

LabeledSample sample(std::string label, std::initializer_list<double> head) {
  LabeledSample s;
  std::copy(head.begin(), head.end(), s.features.values.begin());
  s.label = std::move(label);
  return s;
}

Dataset grid(std::size_t classes, std::size_t per_class, std::uint64_t seed) {
  Dataset ds;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 0.2);
  for (std::size_t c = 0; c < classes; ++c) ds.classes.push_back("k" + std::to_string(c));
  for (std::size_t c = 0; c < classes; ++c) {
    for (std::size_t i = 0; i < per_class; ++i) {
      LabeledSample s;
      for (std::size_t f = 0; f < kFeatureCount; ++f) s.features.values[f] = (f % classes == c ? 2.0 : 0.0) + g(rng);
      s.label = ds.classes[c];
      s.page_id = s.label + "_" + std::to_string(i / 16);
      ds.samples.push_back(s);
    }
  }
  return ds;
}

}  // namespace

TEST_SUITE("knn") {
  TEST_CASE("nearest neighbour and vote ties") {
    Dataset ds;
    ds.classes = {"a", "b"};
    ds.samples = {sample("a", {0.0, 0.0}), sample("b", {1.0, 1.0}), sample("a", {0.1, 0.0}), sample("b", {0.9, 1.0})};
    FeatureVector q;
    q.values[0] = 0.8;
    q.values[1] = 0.8;
    CHECK(knn_predict(ds, q, 1) == "b");
    q.values[0] = 0.2;
    q.values[1] = 0.1;
    CHECK(knn_predict(ds, q, 3) == "a");

    // k = 2 with one neighbour of each class: the nearer one wins.
    q.values[0] = 0.48;
    q.values[1] = 0.5;
    const KnnClassifier knn(ds, 2);
    const Prediction p = knn.predict(q.values);
    CHECK(p.probabilities == std::vector<double>{0.5, 0.5});
    CHECK(p.label == "a");
  }

  TEST_CASE("invariant to per-feature affine maps") {
    const Dataset ds = grid(3, 20, 8);
    Dataset moved = ds;
    for (auto& s : moved.samples)
      for (std::size_t f = 0; f < kFeatureCount; ++f) s.features.values[f] = 3.5 * s.features.values[f] + f;
    const KnnClassifier a(ds, 3);
    const KnnClassifier b(moved, 3);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g(0.5, 1.0);
    for (int t = 0; t < 30; ++t) {
      FeatureVector q;
      for (auto& v : q.values) v = g(rng);
      FeatureVector m = q;
      for (std::size_t f = 0; f < kFeatureCount; ++f) m.values[f] = 3.5 * q.values[f] + f;
      CHECK(a.predict(q.values).label == b.predict(m.values).label);
    }
  }

  TEST_CASE("k bounds") {
    const Dataset ds = grid(2, 3, 1);
    CHECK_THROWS_AS(KnnClassifier(ds, 0), ParameterError);
    CHECK_THROWS_AS(KnnClassifier(ds, 7), ParameterError);
  }
}

TEST_SUITE("crossval") {
  TEST_CASE("folds partition the samples") {
    const Dataset ds = grid(4, 23, 2);
    for (bool stratify : {true, false}) {
      const auto folds = kfold_split(ds, 3, 42, stratify);
      REQUIRE(folds.size() == 3);
      std::vector<int> seen(ds.size(), 0);
      for (const auto& f : folds) {
        CHECK(std::is_sorted(f.test.begin(), f.test.end()));
        CHECK(f.train.size() + f.test.size() == ds.size());
        for (auto i : f.test) ++seen[i];
        std::set<std::size_t> train(f.train.begin(), f.train.end());
        for (auto i : f.test) CHECK(train.count(i) == 0);
      }
      for (int s : seen) CHECK(s == 1);
    }
  }

  TEST_CASE("stratified fold sizes for 11 x 160 blocks") {
    const Dataset ds = grid(11, 160, 3);
    const auto folds = kfold_split(ds, 3, 42, true);
    std::vector<std::size_t> sizes;
    for (const auto& f : folds) sizes.push_back(f.test.size());
    std::sort(sizes.begin(), sizes.end());
    CHECK(sizes == std::vector<std::size_t>{586, 587, 587});
    const auto labels = ds.label_indices();
    for (const auto& f : folds) {
      std::vector<std::size_t> per(11, 0);
      for (auto i : f.test) ++per[labels[i]];
      for (auto n : per) CHECK((n == 53 || n == 54));
    }
  }

  TEST_CASE("split depends only on the seed") {
    const Dataset ds = grid(3, 10, 4);
    const auto a = kfold_split(ds, 3, 7);
    const auto b = kfold_split(ds, 3, 7);
    const auto c = kfold_split(ds, 3, 8);
    for (std::size_t i = 0; i < 3; ++i) CHECK(a[i].test == b[i].test);
    bool differs = false;
    for (std::size_t i = 0; i < 3; ++i) differs |= a[i].test != c[i].test;
    CHECK(differs);
    CHECK(fold_seed(42, 0) != fold_seed(42, 1));
  }

  TEST_CASE("too few samples per class") {
    const Dataset ds = grid(2, 2, 5);
    CHECK_THROWS_AS(kfold_split(ds, 3, 1, true), StratificationError);
  }

  TEST_CASE("every sample is predicted once") {
    const Dataset ds = grid(3, 12, 6);
    CvConfig cfg;
    cfg.train.epochs = 200;
    const CvResult r = cross_validate(ds, cfg);
    CHECK(r.aggregate.total == ds.size());
    CHECK(r.per_fold.size() == 3);
    CHECK(r.predicted.size() == ds.size());
    CHECK(r.aggregate.accuracy >= 0.95);

    cfg.classifier = ClassifierKind::kKnn;
    const CvResult k = cross_validate(ds, cfg);
    CHECK(k.aggregate.total == ds.size());
    CHECK(k.aggregate.accuracy >= 0.95);
    CHECK(parse_classifier("knn") == ClassifierKind::kKnn);
    CHECK_THROWS_AS(parse_classifier("svm"), ParameterError);
  }
}
