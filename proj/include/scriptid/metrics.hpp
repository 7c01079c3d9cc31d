#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace scriptid {

// rows = truth, cols = prediction
using ConfusionMatrix = std::vector<std::vector<std::size_t>>;

struct ClassMetrics {
  double tpr = 0.0;
  double fpr = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
  double auc = 0.0;
};

struct EvalReport {
  std::vector<std::string> classes;
  ConfusionMatrix confusion;
  std::size_t total = 0;
  double accuracy = 0.0;
  double kappa = 0.0;
  double mae = 0.0;
  double rmse = 0.0;
  std::vector<ClassMetrics> per_class;
  ClassMetrics mean;  // unweighted mean over classes
};

// Accuracy, kappa and the one-vs-rest rates that need only the confusion
// matrix. mae, rmse and auc are left at zero.
EvalReport summarize_confusion(const ConfusionMatrix& confusion, std::vector<std::string> classes);

// One-vs-rest AUC via the rank-sum statistic with averaged ranks for tied
// scores; 0.5 when either side is empty.
double roc_auc(std::span<const double> scores, std::span<const bool> positive);

// Full report. probabilities[s][c] is the predicted probability of class c
// for sample s.
EvalReport evaluate(std::span<const std::size_t> truth, std::span<const std::size_t> predicted,
                    const std::vector<std::vector<double>>& probabilities, std::vector<std::string> classes);

EvalReport evaluate(std::span<const std::string> truth, std::span<const std::string> predicted,
                    const std::vector<std::vector<double>>& probabilities, std::vector<std::string> classes);

// Kappa, MAE, RMSE, TPR, FPR, Precision, Recall, F-measure, AUC
const std::vector<std::string>& report_columns();

// Console table: one row per class plus a "Mean" row. Kappa, MAE and RMSE
// are aggregate-only and appear on the mean row.
std::string format_report_table(const EvalReport& report);

nlohmann::json to_json(const EvalReport& report);

}  // namespace scriptid
