#include "commands.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

namespace scriptid::cli {

ExtractionSettings RunConfig::extraction() const {
  ExtractionSettings s;
  s.level = level;
  s.gabor_sigma = gabor_sigma;
  s.kernel_size = kernel_size;
  s.orientation_step = parse_orientation_step(orientation_step);
  s.preprocess.polarity = parse_polarity(polarity);
  s.preprocess.gabor_input = parse_gabor_input(gabor_input);
  s.preprocess.smooth_sigma = smooth_sigma;
  s.preprocess.smooth_radius = smooth_radius;
  return s;
}

ExtractConfig RunConfig::extract_config() const {
  ExtractConfig c;
  c.level = level;
  c.preprocess = extraction().preprocess;
  c.min_foreground = min_foreground;
  return c;
}

FilterBank RunConfig::bank() const {
  return make_filter_bank(kernel_size, gabor_sigma, parse_orientation_step(orientation_step));
}

CvConfig RunConfig::cv_config() const {
  CvConfig c;
  c.folds = folds;
  c.seed = seed;
  c.stratify = !no_stratify;
  c.classifier = parse_classifier(classifier);
  c.knn_k = knn_k;
  c.train.epochs = epochs;
  c.train.learning_rate = lr;
  c.train.momentum = momentum;
  c.train.seed = seed;
  c.train.hidden_sizes = hidden;
  c.train.l2 = l2;
  return c;
}

void RunConfig::validate() const {
  if (level < 1 || level > kMaxLevel) throw ParameterError(fmt::format("--level {} outside [1,{}]", level, kMaxLevel));
  if (!(gabor_sigma > 0.0)) throw ParameterError("--sigma must be > 0");
  if (kernel_size < 4) throw ParameterError("--kernel-size must be >= 4");
  if (!(smooth_sigma > 0.0)) throw ParameterError("--smooth-sigma must be > 0");
  if (smooth_radius < 1) throw ParameterError("--smooth-radius must be >= 1");
  if (!(min_foreground >= 0.0)) throw ParameterError("--min-foreground must be >= 0");
  if (folds < 2) throw ParameterError("--folds must be >= 2");
  if (knn_k < 1) throw ParameterError("--k must be >= 1");
  extraction();
  cv_config().train.validate();
}

namespace {

void print_error(const std::exception& e) { std::cerr << "error: " << e.what() << '\n'; }

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const CsvFormatError& e) {
    print_error(e);
    return kMalformedCsv;
  } catch (const DegenerateError& e) {
    print_error(e);
    return kDegenerateDataset;
  } catch (const StratificationError& e) {
    print_error(e);
    return kDegenerateDataset;
  } catch (const IoError& e) {
    print_error(e);
    return kUnreadablePage;
  } catch (const FormatError& e) {
    print_error(e);
    return kUnreadablePage;
  } catch (const std::exception& e) {
    print_error(e);
    return kFailure;
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  out << text;
  if (!out) throw IoError(fmt::format("error writing '{}'", path.string()));
}

// A missing root is reported like an empty one (exit 2).
std::vector<PageSource> scan_or_empty(const std::filesystem::path& root) {
  try {
    return scan_dataset_dir(root);
  } catch (const IoError& e) {
    print_error(e);
    return {};
  }
}

nlohmann::json run_metadata(const RunConfig& cfg, int level) {
  return {{"level", level},
          {"sigma", cfg.gabor_sigma},
          {"kernel_size", cfg.kernel_size},
          {"orientation_step", cfg.orientation_step},
          {"polarity", cfg.polarity},
          {"gabor_input", cfg.gabor_input},
          {"smooth_sigma", cfg.smooth_sigma},
          {"smooth_radius", cfg.smooth_radius},
          {"min_foreground", cfg.min_foreground},
          {"folds", cfg.folds},
          {"stratified", !cfg.no_stratify},
          {"seed", cfg.seed},
          {"classifier", cfg.classifier},
          {"knn_k", cfg.knn_k},
          {"hidden_sizes", cfg.hidden},
          {"epochs", cfg.epochs},
          {"learning_rate", cfg.lr},
          {"momentum", cfg.momentum},
          {"l2", cfg.l2}};
}

int single_level(const Dataset& ds) {
  if (ds.empty()) return 0;
  const int level = ds.samples.front().level;
  for (const auto& s : ds.samples) {
    if (s.level != level) throw DataError("feature CSV mixes decomposition levels");
  }
  return level;
}

}  // namespace

int cmd_synth(const SynthArgs& args, const RunConfig& cfg) {
  return guarded([&] {
    SynthSpec spec = default_synth_spec(args.classes, parse_orientation_step(cfg.orientation_step));
    spec.pages_per_class = args.pages;
    spec.noise_level = args.noise;
    spec.page_width = spec.page_height = args.page_size;
    spec.seed = cfg.seed;
    const auto written = write_corpus(spec, args.out);
    std::cout << fmt::format("wrote {} pages ({} classes x {}) to {}\n", written.size(), spec.classes.size(),
                             spec.pages_per_class, args.out.string());
    return kOk;
  });
}

int cmd_extract(const ExtractArgs& args, const RunConfig& cfg) {
  return guarded([&] {
    const auto pages = scan_or_empty(args.dataset);
    if (pages.empty()) {
      std::cerr << fmt::format("error: no pages found under '{}' (expected <root>/<label>/<page>.png|bmp)\n",
                               args.dataset.string());
      return static_cast<int>(kEmptyDataset);
    }
    const Dataset ds = extract_dataset(pages, cfg.bank(), cfg.extract_config());
    if (ds.empty()) return static_cast<int>(kEmptyDataset);
    write_feature_csv(args.out, ds);
    std::cout << fmt::format("extracted {} blocks from {} pages ({} classes, level {}) to {}\n", ds.size(),
                             pages.size(), ds.classes.size(), cfg.level, args.out.string());
    return static_cast<int>(kOk);
  });
}

int cmd_train(const TrainArgs& args, const RunConfig& cfg) {
  return guarded([&] {
    const Dataset ds = read_feature_csv(args.features);
    if (ds.empty()) {
      std::cerr << "error: feature CSV has no rows\n";
      return static_cast<int>(kEmptyDataset);
    }
    if (ds.classes.size() < 2) {
      throw DegenerateError(fmt::format("feature CSV has a single class '{}'; at least 2 are required",
                                        ds.classes.front()));
    }
    ExtractionSettings extraction = cfg.extraction();
    extraction.level = single_level(ds);

    TrainStats stats;
    const MlpModel model = train_mlp(ds, cfg.cv_config().train, &stats);
    save_model(args.model, model, extraction);
    std::cout << fmt::format("trained on {} samples, {} classes: training accuracy {:.4f}, loss {:.6f}\n", ds.size(),
                             ds.classes.size(), stats.train_accuracy, stats.final_loss);
    return static_cast<int>(kOk);
  });
}

namespace {

std::vector<int> parse_levels(const std::string& list) {
  std::vector<int> levels;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      if (v < 1 || v > kMaxLevel) throw ParameterError(fmt::format("sweep level {} outside [1,{}]", v, kMaxLevel));
      levels.push_back(v);
    } catch (const std::logic_error&) {
      throw ParameterError(fmt::format("cannot parse sweep level '{}'", item));
    }
  }
  if (levels.empty()) throw ParameterError("--sweep-levels is empty");
  return levels;
}

int eval_sweep(const EvalArgs& args, const RunConfig& cfg) {
  const auto levels = parse_levels(args.sweep_levels);
  if (args.dataset.empty()) throw ParameterError("--sweep-levels needs --dataset (features are re-extracted per level)");
  const auto pages = scan_or_empty(args.dataset);
  if (pages.empty()) {
    std::cerr << fmt::format("error: no pages found under '{}'\n", args.dataset.string());
    return static_cast<int>(kEmptyDataset);
  }
  const FilterBank bank = cfg.bank();
  std::string csv = "level,samples,blocks_per_class_min,blocks_per_class_max,accuracy,kappa\n";
  nlohmann::json levels_json = nlohmann::json::array();
  for (int level : levels) {
    RunConfig lc = cfg;
    lc.level = level;
    const Dataset ds = extract_dataset(pages, bank, lc.extract_config());
    if (ds.empty()) return static_cast<int>(kEmptyDataset);
    const auto counts = ds.class_counts();
    const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
    const CvResult cv = cross_validate(ds, lc.cv_config());
    const std::string row = fmt::format("{},{},{},{},{:.4f},{:.4f}\n", level, ds.size(), *lo, *hi,
                                        cv.aggregate.accuracy, cv.aggregate.kappa);
    csv += row;
    std::cerr << fmt::format("level {}: {} blocks, accuracy {:.4f}\n", level, ds.size(), cv.aggregate.accuracy);
    nlohmann::json entry = {{"level", level}, {"samples", ds.size()}, {"report", to_json(cv.aggregate)}};
    entry["blocks_per_class"] = counts;
    levels_json.push_back(std::move(entry));
  }
  if (!args.sweep_out.empty()) write_text(args.sweep_out, csv);
  if (!args.report.empty()) {
    nlohmann::json meta = run_metadata(cfg, cfg.level);
    meta.erase("level");
    write_text(args.report, nlohmann::json{{"metadata", meta}, {"levels", levels_json}}.dump(2) + "\n");
  }
  std::cout << csv;
  return static_cast<int>(kOk);
}

}  // namespace

int cmd_eval(const EvalArgs& args, const RunConfig& cfg) {
  return guarded([&] {
    if (!args.sweep_levels.empty()) return eval_sweep(args, cfg);

    Dataset ds;
    int level = cfg.level;
    if (!args.features.empty()) {
      ds = read_feature_csv(args.features);
      level = single_level(ds);
    } else if (!args.dataset.empty()) {
      const auto pages = scan_or_empty(args.dataset);
      if (pages.empty()) {
        std::cerr << fmt::format("error: no pages found under '{}'\n", args.dataset.string());
        return static_cast<int>(kEmptyDataset);
      }
      ds = extract_dataset(pages, cfg.bank(), cfg.extract_config());
    } else {
      throw ParameterError("eval needs --features or --dataset");
    }
    if (ds.empty()) return static_cast<int>(kEmptyDataset);
    if (ds.classes.size() < 2) throw DegenerateError("evaluation needs at least two classes");

    const CvResult cv = cross_validate(ds, cfg.cv_config());
    nlohmann::json fold_acc = nlohmann::json::array();
    for (const auto& f : cv.per_fold) fold_acc.push_back(f.accuracy);
    const nlohmann::json report = {{"metadata", run_metadata(cfg, level)},
                                   {"report", to_json(cv.aggregate)},
                                   {"per_fold_accuracy", fold_acc}};
    if (!args.report.empty()) write_text(args.report, report.dump(2) + "\n");

    if (cfg.json) {
      std::cout << report.dump(2) << '\n';
    } else {
      std::cout << fmt::format("{}-fold cross-validation, {} classifier, {} samples, level {}\n", cfg.folds,
                               cfg.classifier, ds.size(), level);
      std::cout << fmt::format("Accuracy: {:.4f} ({:.2f}%)\n\n", cv.aggregate.accuracy,
                               100.0 * cv.aggregate.accuracy);
      std::cout << format_report_table(cv.aggregate);
    }
    return static_cast<int>(kOk);
  });
}

namespace {

std::string describe(const ExtractionSettings& s) { return to_json(s).dump(); }

}  // namespace

int cmd_predict(const PredictArgs& args, const RunConfig& cfg) {
  return guarded([&] {
    const StoredModel stored = load_model(args.model);
    const ExtractionSettings wanted = cfg.extraction();
    if (!(wanted == stored.extraction)) {
      std::cerr << "error: feature-extraction settings differ from the model's training settings\n"
                << "  model:   " << describe(stored.extraction) << '\n'
                << "  request: " << describe(wanted) << '\n';
      return static_cast<int>(kContractMismatch);
    }
    const GrayImage gray = load_page(PageSource{args.image.stem().string(), "", args.image});
    ExtractConfig ec = cfg.extract_config();
    const auto blocks = extract_page(gray, cfg.bank(), ec);

    const MlpModel& model = stored.model;
    const std::size_t c = model.class_count();
    std::vector<std::size_t> votes(c, 0);
    std::vector<double> prob_sum(c, 0.0);
    nlohmann::json blocks_json = nlohmann::json::array();
    std::string text;
    for (const auto& b : blocks) {
      if (!b.kept) {
        text += fmt::format("block {} {} skipped (foreground {:.4f})\n", b.row, b.col, b.foreground);
        blocks_json.push_back({{"row", b.row}, {"col", b.col}, {"skipped", true}, {"foreground", b.foreground}});
        continue;
      }
      const Prediction p = predict(model, b.features);
      ++votes[p.class_index];
      for (std::size_t k = 0; k < c; ++k) prob_sum[k] += p.probabilities[k];
      text += fmt::format("block {} {} {} {:.4f}\n", b.row, b.col, p.label, p.probabilities[p.class_index]);
      nlohmann::json probs = nlohmann::json::object();
      for (std::size_t k = 0; k < c; ++k) probs[model.class_labels[k]] = p.probabilities[k];
      blocks_json.push_back({{"row", b.row},
                             {"col", b.col},
                             {"label", p.label},
                             {"probability", p.probabilities[p.class_index]},
                             {"probabilities", probs}});
    }

    const std::size_t voted = std::accumulate(votes.begin(), votes.end(), std::size_t{0});
    nlohmann::json page = nlohmann::json(nullptr);
    if (voted > 0) {
      // Majority vote; ties go to the higher mean probability.
      std::size_t best = 0;
      for (std::size_t k = 1; k < c; ++k) {
        if (votes[k] > votes[best] || (votes[k] == votes[best] && prob_sum[k] > prob_sum[best])) best = k;
      }
      page = model.class_labels[best];
      text += fmt::format("page {} (block-majority vote, {}/{} blocks)\n", model.class_labels[best], votes[best],
                          voted);
    } else {
      text += "page none (every block was filtered out)\n";
    }

    if (cfg.json) {
      nlohmann::json vote_json = nlohmann::json::object();
      for (std::size_t k = 0; k < c; ++k) vote_json[model.class_labels[k]] = votes[k];
      std::cout << nlohmann::json{{"image", args.image.string()},
                                  {"level", cfg.level},
                                  {"blocks", blocks_json},
                                  {"page_label", page},
                                  {"page_label_method", "block-majority-vote"},
                                  {"votes", vote_json}}
                       .dump(2)
                << '\n';
    } else {
      std::cout << text;
    }
    return static_cast<int>(kOk);
  });
}

int cmd_dump_kernels(const DumpArgs& args, const RunConfig& cfg) {
  return guarded([&] {
    const auto written = dump_kernels(cfg.bank(), args.out);
    std::cout << fmt::format("wrote {} files to {}\n", written.size(), args.out.string());
    return static_cast<int>(kOk);
  });
}

}  // namespace scriptid::cli
