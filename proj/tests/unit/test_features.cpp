#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "scriptid/error.hpp"
#include "scriptid/features.hpp"
#include "scriptid/synth.hpp"

using namespace scriptid;

namespace {

GrayImage random_block(std::size_t n, std::uint64_t seed, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, hi);
  std::vector<double> v(n * n);
  for (auto& x : v) x = u(rng);
  return GrayImage(n, n, v);
}

SubbandResponse random_response(std::size_t w, std::size_t h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  SubbandResponse r{1, 0, ComplexGrid(w, h)};
  for (auto& v : r.values.values()) v = Complex(g(rng), g(rng));
  return r;
}

Dataset small_dataset() {
  Dataset ds;
  ds.classes = {"beta", "alpha"};
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  for (int i = 0; i < 5; ++i) {
    LabeledSample s;
    for (auto& v : s.features.values) v = g(rng) * std::pow(10.0, static_cast<int>(rng() % 20) - 10);
    s.label = i % 2 ? "alpha" : "beta";
    s.page_id = "page " + std::to_string(i / 2);
    s.level = 2;
    s.row = static_cast<std::size_t>(i);
    s.col = 3;
    ds.samples.push_back(s);
  }
  return ds;
}

}  // namespace

TEST_SUITE("features") {
  TEST_CASE("column layout") {
    const auto& names = feature_column_names();
    REQUIRE(names.size() == 60);
    CHECK(names[0] == "e_v1_o0");
    CHECK(names[1] == "h_v1_o0");
    CHECK(names[FeatureVector::index(3, 4, Stat::kEnergy)] == "e_v3_o4");
    CHECK(names[59] == "h_v5_o5");
  }

  TEST_CASE("energy and entropy match the definitions") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto r = random_response(9, 7, seed);
      const std::vector<Complex> v(r.values.values().begin(), r.values.values().end());
      CHECK(energy(r) == doctest::Approx(oracle::energy(v)).epsilon(1e-13));
      CHECK(entropy(r) == doctest::Approx(oracle::entropy(v)).epsilon(1e-13));
    }
  }

  TEST_CASE("entropy of a flat response is log2 N") {
    for (std::size_t n : {1, 4, 16, 100}) {
      SubbandResponse r{1, 0, ComplexGrid(n, 1)};
      for (auto& v : r.values.values()) v = Complex(0.3, -0.4);
      CHECK(std::abs(entropy(r) - std::log2(static_cast<double>(n))) < 1e-12);
    }
    SubbandResponse zero{1, 0, ComplexGrid(4, 4)};
    CHECK(entropy(zero) == 0.0);
    CHECK(energy(zero) == 0.0);
  }

  TEST_CASE("intensity scaling") {
    const FilterBank bank = make_filter_bank();
    const GrayImage block = random_block(32, 7, 0.5);
    const FeatureVector base = extract_features(block, bank);
    for (double alpha : {0.5, 2.0}) {
      std::vector<double> v(block.values().begin(), block.values().end());
      for (auto& x : v) x *= alpha;
      const FeatureVector scaled = extract_features(GrayImage(32, 32, v), bank);
      for (int nu = 1; nu <= 5; ++nu) {
        for (int mu = 0; mu < 6; ++mu) {
          CHECK(std::abs(scaled.energy(nu, mu) - alpha * alpha * base.energy(nu, mu)) <=
                1e-9 * std::max(1.0, base.energy(nu, mu)));
          CHECK(std::abs(scaled.entropy(nu, mu) - base.entropy(nu, mu)) < 1e-9);
        }
      }
    }
  }

  TEST_CASE("page extraction yields 4^l finite vectors") {
    const SynthSpec spec = default_synth_spec(6);
    const GrayImage page = gen_page(spec.classes[2], 128, 128, 0.1, 5);
    const FilterBank bank = make_filter_bank();
    ExtractConfig cfg;
    cfg.level = 2;
    const auto blocks = extract_page(page, bank, cfg);
    REQUIRE(blocks.size() == 16);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      CHECK(blocks[i].row * 4 + blocks[i].col == i);
      CHECK(blocks[i].kept);
      for (double v : blocks[i].features.values) CHECK(std::isfinite(v));
    }
  }

  TEST_CASE("foreground filter drops blank blocks") {
    GrayImage page(64, 64, 1.0);
    for (std::size_t r = 0; r < 32; ++r)
      for (std::size_t c = 0; c < 32; ++c) page.at(r, c) = (c / 2) % 2 ? 1.0 : 0.0;
    ExtractConfig cfg;
    cfg.level = 1;
    cfg.min_foreground = 0.05;
    std::vector<std::string> warnings;
    cfg.warn = [&](std::string_view w) { warnings.emplace_back(w); };
    const auto blocks = extract_page(page, make_filter_bank(), cfg);
    REQUIRE(blocks.size() == 4);
    CHECK(blocks[0].kept);
    CHECK_FALSE(blocks[1].kept);
    CHECK_FALSE(blocks[3].kept);

    const std::vector<PageSource> pages = {{"p", "x", page}};
    const Dataset ds = extract_dataset(pages, make_filter_bank(), cfg);
    CHECK(ds.size() == 1);
    CHECK_FALSE(warnings.empty());
  }

  TEST_CASE("dataset bookkeeping") {
    const Dataset ds = small_dataset();
    CHECK(ds.class_index("alpha") == 1);
    CHECK_THROWS_AS(ds.class_index("gamma"), DataError);
    CHECK(ds.class_counts() == std::vector<std::size_t>{3, 2});
    CHECK(ds.label_indices() == std::vector<std::size_t>{0, 1, 0, 1, 0});
    const std::vector<std::size_t> pick = {1, 3};
    const Dataset sub = ds.subset(pick);
    CHECK(sub.size() == 2);
    CHECK(sub.classes == ds.classes);
    Dataset bad = ds;
    bad.samples[0].features.values[5] = std::nan("");
    CHECK_THROWS_AS(bad.validate(), DataError);
  }

  TEST_CASE("csv round trip is exact") {
    const Dataset ds = small_dataset();
    std::stringstream ss;
    write_feature_csv(ss, ds);
    const Dataset back = read_feature_csv(ss);
    REQUIRE(back.size() == ds.size());
    CHECK(back.classes == ds.classes);
    for (std::size_t i = 0; i < ds.size(); ++i) {
      CHECK(back.samples[i].features == ds.samples[i].features);
      CHECK(back.samples[i].label == ds.samples[i].label);
      CHECK(back.samples[i].page_id == ds.samples[i].page_id);
      CHECK(back.samples[i].row == ds.samples[i].row);
      CHECK(back.samples[i].col == ds.samples[i].col);
      CHECK(back.samples[i].level == 2);
    }
  }

  TEST_CASE("malformed csv reports the line") {
    const Dataset ds = small_dataset();
    std::stringstream good;
    write_feature_csv(good, ds);
    const std::string text = good.str();

    auto line_of = [](const std::string& csv) -> std::size_t {
      std::stringstream in(csv);
      try {
        read_feature_csv(in);
      } catch (const CsvFormatError& e) {
        return e.line();
      }
      return 0;
    };
    CHECK(line_of("label,page_id\n") == 1);

    std::string short_row = text;
    const auto third = short_row.find('\n', short_row.find('\n', short_row.find('\n') + 1) + 1);
    short_row.insert(third, "\nalpha,p,2,0,0,1.0");
    CHECK(line_of(short_row) == 4);

    std::string bad_number = text;
    const auto second_line = bad_number.find('\n') + 1;
    const auto last_comma = bad_number.find('\n', second_line);
    bad_number.replace(last_comma - 1, 1, "x");
    CHECK(line_of(bad_number) == 2);
  }
}
