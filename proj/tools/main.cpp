#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

using namespace scriptid::cli;

int main(int argc, char** argv) {
  CLI::App app{"Script identification from Gabor texture features of quad-tree blocks"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  app.add_option("--level", cfg.level, "Quad-tree decomposition level (4^level blocks per page)");
  app.add_option("--sigma", cfg.gabor_sigma, "Gabor envelope width sigma");
  app.add_option("--kernel-size", cfg.kernel_size, "Gabor kernel side length");
  app.add_option("--orientation-step", cfg.orientation_step, "Orientation spacing: pi/6 or pi/8");
  app.add_option("--polarity", cfg.polarity, "Ink polarity for binarization: auto, dark-ink, light-ink");
  app.add_option("--gabor-input", cfg.gabor_input, "Image filtered by the bank: smoothed-binary or gray");
  app.add_option("--smooth-sigma", cfg.smooth_sigma, "Gaussian denoising sigma");
  app.add_option("--smooth-radius", cfg.smooth_radius, "Gaussian denoising radius");
  app.add_option("--min-foreground", cfg.min_foreground, "Drop blocks with a smaller ink fraction");
  app.add_option("--folds", cfg.folds, "Cross-validation folds");
  app.add_option("--seed", cfg.seed, "Seed for folds, weights and synthetic pages");
  app.add_option("--classifier", cfg.classifier, "mlp or knn");
  app.add_option("--k", cfg.knn_k, "Neighbours for the knn classifier");
  app.add_flag("--no-stratify", cfg.no_stratify, "Plain shuffled folds");
  app.add_option("--hidden", cfg.hidden, "Hidden layer sizes")->delimiter(',');
  app.add_option("--epochs", cfg.epochs, "Training epochs (full batch)");
  app.add_option("--lr", cfg.lr, "Learning rate");
  app.add_option("--momentum", cfg.momentum, "Momentum");
  app.add_option("--l2", cfg.l2, "L2 weight penalty");
  app.add_flag("--json", cfg.json, "Machine-readable output");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic grating corpus");
  synth_cmd->add_option("--classes", synth.classes, "Number of classes (<= 12)");
  synth_cmd->add_option("--pages", synth.pages, "Pages per class");
  synth_cmd->add_option("--noise", synth.noise, "Gaussian noise std-dev");
  synth_cmd->add_option("--page-size", synth.page_size, "Page side in pixels (multiple of 16)");
  synth_cmd->add_option("--out", synth.out, "Output directory")->required();

  ExtractArgs extract;
  auto* extract_cmd = app.add_subcommand("extract", "Extract block features from a dataset directory");
  extract_cmd->add_option("--dataset", extract.dataset, "Dataset root <root>/<label>/<page>")->required();
  extract_cmd->add_option("--out", extract.out, "Feature CSV")->required();

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train an MLP on a feature CSV");
  train_cmd->add_option("--features", train.features, "Feature CSV")->required();
  train_cmd->add_option("--model", train.model, "Model JSON to write")->required();

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Cross-validate a classifier");
  auto* features_opt = eval_cmd->add_option("--features", eval.features, "Feature CSV");
  auto* dataset_opt = eval_cmd->add_option("--dataset", eval.dataset, "Dataset root (features extracted on the fly)");
  features_opt->excludes(dataset_opt);
  eval_cmd->add_option("--report", eval.report, "Write the JSON report here");
  eval_cmd->add_option("--sweep-levels", eval.sweep_levels, "Comma-separated levels to sweep, e.g. 2,3,4")
      ->needs(dataset_opt);
  eval_cmd->add_option("--sweep-out", eval.sweep_out, "Sweep CSV");

  PredictArgs pred;
  auto* predict_cmd = app.add_subcommand("predict", "Classify the blocks of one page");
  predict_cmd->add_option("--model", pred.model, "Model JSON")->required();
  predict_cmd->add_option("--image", pred.image, "Page image (PNG or BMP)")->required();

  DumpArgs dump;
  auto* dump_cmd = app.add_subcommand("dump-kernels", "Write the Gabor kernels as CSV and PGM");
  dump_cmd->add_option("--out", dump.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  try {
    cfg.validate();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }

  if (*synth_cmd) return cmd_synth(synth, cfg);
  if (*extract_cmd) return cmd_extract(extract, cfg);
  if (*train_cmd) return cmd_train(train, cfg);
  if (*eval_cmd) return cmd_eval(eval, cfg);
  if (*predict_cmd) return cmd_predict(pred, cfg);
  if (*dump_cmd) return cmd_dump_kernels(dump, cfg);
  return kUsage;
}
