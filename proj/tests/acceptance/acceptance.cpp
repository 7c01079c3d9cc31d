// Acceptance suite: one PASS/FAIL line per criterion. Run with a criterion
// number to execute only that one.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include <fmt/format.h>

#include "oracles.hpp"
#include "scriptid/scriptid.hpp"

namespace fs = std::filesystem;
using namespace scriptid;

namespace {

// Tolerances and budgets.
constexpr double kMinAccuracy6 = 0.95;
constexpr double kMinAccuracy11 = 0.90;
constexpr double kBudgetAccuracySec = 180.0;
constexpr double kBudgetSweepSec = 600.0;
constexpr double kBudgetConvolutionSec = 30.0;
constexpr double kConvolutionTol = 1e-9;
constexpr double kMaxDcRatio = 0.05;
constexpr double kRotationTol = 1e-12;
constexpr double kCenterTol = 1e-12;
constexpr double kScalingTol = 1e-9;
constexpr double kUniformEntropyTol = 1e-12;
constexpr double kGradientRelTol = 1e-4;
constexpr double kMetricTol = 1e-12;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

fs::path work_root() {
  static const fs::path root = [] {
    const fs::path p = fs::temp_directory_path() / fmt::format("scriptid_acceptance_{}", ::getpid());
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return root;
}

int run_cli(const std::string& args, const fs::path& stdout_file = {}) {
  std::string cmd = fmt::format("\"{}\" {}", SCRIPTID_CLI, args);
  cmd += stdout_file.empty() ? " > /dev/null" : fmt::format(" > \"{}\"", stdout_file.string());
  cmd += " 2> /dev/null";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Relative paths and contents of every regular file under root.
std::vector<std::pair<std::string, std::string>> tree(const fs::path& root) {
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files.emplace_back(fs::relative(e.path(), root).string(), slurp(e.path()));
  }
  std::sort(files.begin(), files.end());
  return files;
}

GrayImage random_gray(std::size_t w, std::size_t h, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(w * h);
  for (auto& x : v) x = u(rng);
  return GrayImage(w, h, v);
}

double cv_accuracy(std::size_t classes) {
  SynthSpec spec = default_synth_spec(classes);
  const auto pages = gen_corpus(spec);
  ExtractConfig ec;
  ec.level = 2;
  const Dataset ds = extract_dataset(pages, make_filter_bank(), ec);
  return cross_validate(ds, CvConfig{}).aggregate.accuracy;
}

Outcome synthetic_accuracy() {
  const auto t0 = Clock::now();
  const double a6 = cv_accuracy(6);
  const double a11 = cv_accuracy(11);
  const double sec = seconds_since(t0);
  return {a6 >= kMinAccuracy6 && a11 >= kMinAccuracy11 && sec < kBudgetAccuracySec,
          fmt::format("6-class accuracy {:.4f} (>= {}), 11-class {:.4f} (>= {}), {:.1f} s (< {} s)", a6,
                      kMinAccuracy6, a11, kMinAccuracy11, sec, kBudgetAccuracySec)};
}

Outcome level_sweep() {
  const auto t0 = Clock::now();
  const fs::path dir = work_root() / "sweep";
  const fs::path corpus = dir / "corpus";
  const fs::path csv = dir / "sweep.csv";
  fs::create_directories(dir);
  if (run_cli(fmt::format("synth --out \"{}\"", corpus.string())) != 0) return {false, "synth failed"};
  const int rc = run_cli(
      fmt::format("eval --dataset \"{}\" --sweep-levels 2,3,4 --sweep-out \"{}\"", corpus.string(), csv.string()));
  if (rc != 0) return {false, fmt::format("eval exited {}", rc)};
  const double sec = seconds_since(t0);

  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  const std::vector<std::size_t> want = {160, 640, 2560};
  std::vector<std::string> rows;
  bool counts_ok = true;
  std::string detail;
  for (std::size_t i = 0; std::getline(in, line); ++i) {
    rows.push_back(line);
    std::stringstream ss(line);
    std::vector<std::string> cells;
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    if (cells.size() != 6 || i >= want.size()) {
      counts_ok = false;
      continue;
    }
    const auto lo = std::stoul(cells[2]);
    const auto hi = std::stoul(cells[3]);
    counts_ok &= lo == want[i] && hi == want[i] && std::stoi(cells[0]) == static_cast<int>(i) + 2;
    detail += fmt::format("l={}: {}/class acc {}; ", cells[0], lo, cells[4]);
  }
  const bool pass = counts_ok && rows.size() == 3 && sec < kBudgetSweepSec;
  return {pass, fmt::format("{}rows {}, {:.1f} s (< {} s)", detail, rows.size(), sec, kBudgetSweepSec)};
}

Outcome convolution_oracle() {
  const auto t0 = Clock::now();
  const FilterBank bank = make_filter_bank();
  const SpectralFilterBank spectral(bank, 64, 64);
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int b = 0; b < 20; ++b) {
    const GrayImage block = random_gray(64, 64, rng);
    const auto fast = spectral.filter(block);
    for (std::size_t k = 0; k < bank.kernels.size(); ++k) {
      const auto direct = convolve_direct(block, bank.kernels[k]);
      const auto single = convolve(block, bank.kernels[k]);
      for (std::size_t i = 0; i < direct.values.size(); ++i) {
        worst = std::max(worst, std::abs(fast[k].values.values()[i] - direct.values.values()[i]));
        worst = std::max(worst, std::abs(single.values.values()[i] - direct.values.values()[i]));
      }
    }
  }
  const double sec = seconds_since(t0);
  return {worst <= kConvolutionTol && sec < kBudgetConvolutionSec,
          fmt::format("max |fft - direct| {:.3e} (<= {:.0e}) over 20 blocks x 30 kernels, {:.1f} s", worst,
                      kConvolutionTol, sec)};
}

Outcome kernel_invariants() {
  const FilterBank bank = make_filter_bank();
  double worst_dc = 0.0;
  std::vector<std::string> over;
  for (const auto& k : bank.kernels) {
    const double r = k.dc_ratio();
    worst_dc = std::max(worst_dc, r);
    if (r >= kMaxDcRatio) over.push_back(fmt::format("v{}o{}={:.3f}", k.scale, k.orientation, r));
  }
  double worst_rot = 0.0;
  for (int nu = 1; nu <= kScaleCount; ++nu) {
    const auto& a = bank.at(nu, 0).values;
    const auto& b = bank.at(nu, 3).values;
    for (std::size_t r = 0; r < a.height(); ++r)
      for (std::size_t c = 0; c < a.width(); ++c) worst_rot = std::max(worst_rot, std::abs(b.at(r, c) - a.at(c, r)));
  }
  double worst_center = 0.0;
  const double s = kDefaultGaborSigma;
  for (int nu = 1; nu <= kScaleCount; ++nu) {
    const double k = oracle::frequency(nu);
    const double want = k * k / (s * s) * (1.0 - std::exp(-s * s / 2.0));
    for (int mu = 0; mu < kOrientationCount; ++mu) {
      // The even 16-grid has no center sample; the wavelet itself and an
      // odd-sized kernel both expose it.
      worst_center = std::max(worst_center, std::abs(gabor_wavelet(wave_vector(nu, mu), s, 0.0, 0.0) - want));
      worst_center = std::max(worst_center, std::abs(make_kernel(nu, mu, 17).values.at(8, 8) - want));
    }
  }
  std::string over_list;
  for (const auto& o : over) over_list += (over_list.empty() ? "" : " ") + o;
  const bool pass = over.empty() && worst_rot <= kRotationTol && worst_center <= kCenterTol;
  return {pass, fmt::format("max dc ratio {:.4f} (< {}; {} of 30 over{}{}), rotation {:.1e}, center {:.1e}", worst_dc,
                            kMaxDcRatio, over.size(), over.empty() ? "" : ": ", over_list, worst_rot, worst_center)};
}

Outcome orientation_selectivity() {
  SynthSpec spec = default_synth_spec(6);
  spec.noise_level = 0.0;
  const auto pages = gen_corpus(spec);
  ExtractConfig ec;
  ec.level = 2;
  const FilterBank bank = make_filter_bank();
  std::size_t blocks = 0;
  std::size_t ok = 0;
  for (std::size_t p = 0; p < pages.size(); ++p) {
    const int mu = static_cast<int>(p / spec.pages_per_class);
    for (const auto& b : extract_page(std::get<GrayImage>(pages[p].source), bank, ec)) {
      ++blocks;
      bool wins = true;
      for (int other = 0; other < kOrientationCount; ++other) {
        if (other != mu) wins &= b.features.energy(2, mu) > b.features.energy(2, other);
      }
      ok += wins;
    }
  }
  return {ok == blocks && blocks > 0, fmt::format("{}/{} blocks matched", ok, blocks)};
}

Outcome quadtree_exactness() {
  std::mt19937_64 rng(6);
  std::size_t failures = 0;
  for (const auto [w, h] : {std::pair<std::size_t, std::size_t>{256, 256}, {203, 171}}) {
    const GrayImage page = random_gray(w, h, rng);
    for (int l = 0; l <= 4; ++l) {
      const auto d = decompose(page, l);
      const GrayImage padded = pad_to_level(page, l);
      failures += d.blocks.size() != (std::size_t{1} << (2 * l));
      for (const auto& b : d.blocks) {
        failures += b.pixels.width() != d.blocks.front().pixels.width();
        failures += b.pixels.height() != d.blocks.front().pixels.height();
      }
      failures += !(reassemble(d) == padded);
      if (l == 4) continue;
      // Nesting is checked on the page padded for the finest level, so both
      // levels see the same raster.
      const GrayImage common = pad_to_level(page, 4);
      const auto coarse = decompose(common, l);
      const auto fine = decompose(common, l + 1);
      const std::size_t bw = fine.blocks.front().pixels.width();
      const std::size_t bh = fine.blocks.front().pixels.height();
      for (const auto& b : coarse.blocks) {
        for (std::size_t dr = 0; dr < 2; ++dr) {
          for (std::size_t dc = 0; dc < 2; ++dc) {
            const auto& child = fine.blocks[(2 * b.row + dr) * fine.blocks_per_side() + 2 * b.col + dc];
            failures += !(child.pixels == b.pixels.crop(dr * bh, dc * bw, bw, bh));
          }
        }
      }
    }
  }
  return {failures == 0, fmt::format("levels 0..4 on 256x256 and 203x171 pages, {} mismatches", failures)};
}

Outcome otsu_oracle() {
  std::mt19937_64 rng(77);
  int agree = 0;
  for (int t = 0; t < 50; ++t) {
    Histogram h{};
    const int occupied = 2 + static_cast<int>(rng() % 60);
    for (int i = 0; i < occupied; ++i) h[rng() % 256] += 1 + rng() % 5000;
    agree += otsu_threshold(h) == oracle::otsu(h);
  }
  return {agree == 50, fmt::format("{}/50 histograms agree with the exhaustive search", agree)};
}

Outcome feature_contract() {
  SynthSpec spec = default_synth_spec(6);
  spec.pages_per_class = 2;
  ExtractConfig ec;
  ec.level = 2;
  const FilterBank bank = make_filter_bank();
  const Dataset ds = extract_dataset(gen_corpus(spec), bank, ec);
  std::size_t bad = 0;
  for (const auto& s : ds.samples) {
    bad += s.features.values.size() != 60;
    for (double v : s.features.values) bad += !std::isfinite(v);
  }

  std::mt19937_64 rng(8);
  double worst_e = 0.0;
  double worst_h = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    GrayImage block = random_gray(32, 32, rng);
    for (auto& v : block.values()) v *= 0.5;
    const FeatureVector base = extract_features(block, bank);
    for (double alpha : {0.5, 2.0}) {
      std::vector<double> v(block.values().begin(), block.values().end());
      for (auto& x : v) x *= alpha;
      const FeatureVector scaled = extract_features(GrayImage(32, 32, v), bank);
      for (int nu = 1; nu <= kScaleCount; ++nu) {
        for (int mu = 0; mu < kOrientationCount; ++mu) {
          const double e = base.energy(nu, mu);
          worst_e = std::max(worst_e, std::abs(scaled.energy(nu, mu) - alpha * alpha * e) / std::max(1.0, e));
          worst_h = std::max(worst_h, std::abs(scaled.entropy(nu, mu) - base.entropy(nu, mu)));
        }
      }
    }
  }

  double worst_uniform = 0.0;
  for (std::size_t n : {1, 2, 16, 64, 1024}) {
    SubbandResponse r{1, 0, ComplexGrid(n, 1)};
    for (auto& v : r.values.values()) v = Complex(1.5, 2.0);
    worst_uniform = std::max(worst_uniform, std::abs(entropy(r) - std::log2(static_cast<double>(n))));
  }
  const bool pass = bad == 0 && !ds.empty() && worst_e <= kScalingTol && worst_h <= kScalingTol &&
                    worst_uniform <= kUniformEntropyTol;
  return {pass, fmt::format("{} vectors, {} bad values; energy scaling {:.1e}, entropy drift {:.1e}, uniform {:.1e}",
                            ds.size(), bad, worst_e, worst_h, worst_uniform)};
}

Outcome mlp_gradient() {
  std::mt19937_64 rng(99);
  double worst = 0.0;
  for (int trial = 0; trial < 6; ++trial) {
    const std::size_t in = 3 + rng() % 5;
    const std::size_t classes = 2 + rng() % 3;
    std::vector<std::string> labels;
    for (std::size_t c = 0; c < classes; ++c) labels.push_back(std::to_string(c));
    const MlpModel model = init_mlp(in, {static_cast<int>(2 + rng() % 6)}, labels, rng());
    Eigen::MatrixXd x(8, static_cast<Eigen::Index>(in));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (Eigen::Index r = 0; r < x.rows(); ++r)
      for (Eigen::Index c = 0; c < x.cols(); ++c) x(r, c) = u(rng);
    std::vector<std::size_t> y(8);
    for (auto& v : y) v = rng() % classes;
    const Gradients g = loss_gradient(model, x, y);
    const double h = 1e-6;
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1e-8, std::abs(a) + std::abs(b)); };
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
      for (Eigen::Index r = 0; r < model.layers[l].weights.rows(); ++r) {
        for (Eigen::Index c = 0; c <= model.layers[l].weights.cols(); ++c) {
          MlpModel p = model;
          MlpModel m = model;
          double& wp = c < model.layers[l].weights.cols() ? p.layers[l].weights(r, c) : p.layers[l].bias(r);
          double& wm = c < model.layers[l].weights.cols() ? m.layers[l].weights(r, c) : m.layers[l].bias(r);
          wp += h;
          wm -= h;
          const double numeric = (cross_entropy(p, x, y) - cross_entropy(m, x, y)) / (2 * h);
          const double analytic =
              c < model.layers[l].weights.cols() ? g.layers[l].weights(r, c) : g.layers[l].bias(r);
          worst = std::max(worst, rel(numeric, analytic));
        }
      }
    }
  }

  Eigen::MatrixXd x(60, 6);
  std::vector<std::size_t> y(60);
  std::normal_distribution<double> g(0.0, 1.0);
  for (Eigen::Index r = 0; r < 60; ++r) {
    y[static_cast<std::size_t>(r)] = static_cast<std::size_t>(r % 3);
    for (Eigen::Index c = 0; c < 6; ++c) x(r, c) = g(rng) + (c % 3 == r % 3 ? 2.0 : 0.0);
  }
  TrainConfig cfg;
  cfg.epochs = 50;
  cfg.learning_rate = 0.01;
  cfg.momentum = 0.0;
  TrainStats stats;
  train_mlp(x, y, {"a", "b", "c"}, cfg, &stats);
  std::size_t rises = 0;
  for (std::size_t i = 1; i < stats.loss_history.size(); ++i) rises += stats.loss_history[i] > stats.loss_history[i - 1];
  return {worst < kGradientRelTol && rises == 0 && stats.loss_history.size() == 50,
          fmt::format("max relative gradient error {:.2e} (< {:.0e}); loss rose in {} of 49 steps", worst,
                      kGradientRelTol, rises)};
}

Outcome metric_oracle() {
  std::mt19937_64 rng(1234);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t c = 2 + rng() % 10;
    ConfusionMatrix cm(c, std::vector<std::size_t>(c));
    std::vector<std::string> names;
    for (std::size_t i = 0; i < c; ++i) {
      names.push_back(std::to_string(i));
      for (auto& v : cm[i]) v = rng() % 100;
    }
    const EvalReport r = summarize_confusion(cm, names);
    worst = std::max(worst, std::abs(r.kappa - oracle::kappa(cm)));
    for (std::size_t k = 0; k < c; ++k) {
      const auto o = oracle::rates(cm, k);
      const auto& m = r.per_class[k];
      for (double d : {m.tpr - o.tpr, m.fpr - o.fpr, m.precision - o.precision, m.recall - o.recall,
                       m.f_measure - o.f}) {
        worst = std::max(worst, std::abs(d));
      }
    }
  }
  const EvalReport hand = summarize_confusion({{40, 10}, {20, 30}}, {"a", "b"});

  const std::vector<std::size_t> truth = {0, 1, 1, 0};
  const std::vector<std::vector<double>> prob = {{0.7, 0.3}, {0.2, 0.8}, {0.6, 0.4}, {0.9, 0.1}};
  const EvalReport rep = evaluate(truth, std::vector<std::size_t>{0, 1, 0, 0}, prob, {"a", "b"});
  std::stringstream table(format_report_table(rep));
  std::string header;
  std::getline(table, header);
  std::vector<std::string> cols;
  std::stringstream hs(header);
  for (std::string w; hs >> w;) cols.push_back(w);
  const std::vector<std::string> want = {"Class",     "Kappa",  "MAE",       "RMSE", "TPR", "FPR",
                                         "Precision", "Recall", "F-measure", "AUC"};
  std::vector<std::string> lines;
  for (std::string l; std::getline(table, l);) lines.push_back(l);
  const bool layout = cols == want && lines.size() == 3 && lines.back().rfind("Mean", 0) == 0;
  return {worst <= kMetricTol && hand.kappa == 0.4 && layout,
          fmt::format("max deviation {:.1e} over 100 matrices; hand kappa {}; table columns {}", worst, hand.kappa,
                      layout ? "as required" : "wrong")};
}

Outcome determinism() {
  const fs::path dir = work_root() / "determinism";
  fs::create_directories(dir);
  std::vector<std::string> differs;
  for (int run = 0; run < 2; ++run) {
    const fs::path r = dir / std::to_string(run);
    fs::create_directories(r);
    if (run_cli(fmt::format("synth --out \"{}\"", (r / "corpus").string()), r / "synth.out") != 0 ||
        run_cli(fmt::format("extract --dataset \"{}\" --out \"{}\"", (r / "corpus").string(),
                            (r / "features.csv").string()),
                r / "extract.out") != 0 ||
        run_cli(fmt::format("train --features \"{}\" --model \"{}\"", (r / "features.csv").string(),
                            (r / "model.json").string()),
                r / "train.out") != 0 ||
        run_cli(fmt::format("eval --features \"{}\" --report \"{}\"", (r / "features.csv").string(),
                            (r / "report.json").string()),
                r / "eval.out") != 0) {
      return {false, fmt::format("a command failed in run {}", run)};
    }
  }
  const auto a = tree(dir / "0");
  const auto b = tree(dir / "1");
  if (a.size() != b.size()) return {false, "runs wrote different file sets"};
  for (std::size_t i = 0; i < a.size(); ++i) {
    // Console lines echo the output directory; compare them with it masked.
    auto mask = [](std::string s, const std::string& from) {
      for (std::size_t p; (p = s.find(from)) != std::string::npos;) s.replace(p, from.size(), "<run>");
      return s;
    };
    const std::string ra = mask(a[i].second, (dir / "0").string());
    const std::string rb = mask(b[i].second, (dir / "1").string());
    if (a[i].first != b[i].first || ra != rb) differs.push_back(a[i].first);
  }
  std::string list;
  for (const auto& d : differs) list += " " + d;
  return {differs.empty(), fmt::format("{} files compared across synth/extract/train/eval; {} differ{}", a.size(),
                                       differs.size(), list)};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "synthetic corpus accuracy", synthetic_accuracy},
      {2, "level sweep block counts", level_sweep},
      {3, "fft vs direct convolution", convolution_oracle},
      {4, "kernel invariants", kernel_invariants},
      {5, "orientation selectivity", orientation_selectivity},
      {6, "quad-tree exactness", quadtree_exactness},
      {7, "otsu threshold oracle", otsu_oracle},
      {8, "feature contract", feature_contract},
      {9, "mlp gradient and descent", mlp_gradient},
      {10, "metric suite oracle", metric_oracle},
      {11, "cli determinism", determinism},
  };
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, fmt::format("threw: {}", e.what())};
    }
    failed += !o.pass;
    std::cout << fmt::format("[{}] {:>2} {}: {}", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail) << std::endl;
  }
  fs::remove_all(work_root());
  return failed == 0 ? 0 : 1;
}
