#include "scriptid/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include <fmt/format.h>

#include "scriptid/error.hpp"

namespace scriptid {
namespace {

double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

}  // namespace

EvalReport summarize_confusion(const ConfusionMatrix& confusion, std::vector<std::string> classes) {
  const std::size_t c = confusion.size();
  if (c == 0 || classes.size() != c) throw ParameterError("confusion matrix does not match the class list");
  for (const auto& row : confusion) {
    if (row.size() != c) throw ParameterError("confusion matrix is not square");
  }

  EvalReport rep;
  rep.classes = std::move(classes);
  rep.confusion = confusion;
  std::vector<double> row_sum(c, 0.0);
  std::vector<double> col_sum(c, 0.0);
  double trace = 0.0;
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      const auto v = static_cast<double>(confusion[i][j]);
      row_sum[i] += v;
      col_sum[j] += v;
      rep.total += confusion[i][j];
    }
    trace += static_cast<double>(confusion[i][i]);
  }
  const auto n = static_cast<double>(rep.total);
  rep.accuracy = ratio(trace, n);

  // Kappa from counts, (n trace - sum r c) / (n^2 - sum r c), keeps integer
  // inputs exact until the final division.
  double chance = 0.0;
  for (std::size_t i = 0; i < c; ++i) chance += row_sum[i] * col_sum[i];
  const double denom = n * n - chance;
  if (denom > 0.0) {
    rep.kappa = (n * trace - chance) / denom;
  } else {
    rep.kappa = rep.accuracy == 1.0 ? 1.0 : 0.0;
  }

  rep.per_class.resize(c);
  for (std::size_t k = 0; k < c; ++k) {
    const auto tp = static_cast<double>(confusion[k][k]);
    const double fn = row_sum[k] - tp;
    const double fp = col_sum[k] - tp;
    const double tn = n - tp - fn - fp;
    ClassMetrics& m = rep.per_class[k];
    m.tpr = ratio(tp, tp + fn);
    m.fpr = ratio(fp, fp + tn);
    m.precision = ratio(tp, tp + fp);
    m.recall = m.tpr;
    m.f_measure = ratio(2.0 * m.precision * m.recall, m.precision + m.recall);
  }
  return rep;
}

double roc_auc(std::span<const double> scores, std::span<const bool> positive) {
  if (scores.size() != positive.size()) throw ParameterError("roc_auc: length mismatch");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double pos_rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t t = i; t < j; ++t) {
      if (positive[order[t]]) {
        pos_rank_sum += avg_rank;
        ++n_pos;
      }
    }
    i = j;
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) return 0.5;
  const auto p = static_cast<double>(n_pos);
  const auto q = static_cast<double>(n_neg);
  return (pos_rank_sum - p * (p + 1.0) / 2.0) / (p * q);
}

EvalReport evaluate(std::span<const std::size_t> truth, std::span<const std::size_t> predicted,
                    const std::vector<std::vector<double>>& probabilities, std::vector<std::string> classes) {
  const std::size_t c = classes.size();
  if (truth.size() != predicted.size() || truth.size() != probabilities.size()) {
    throw ParameterError(fmt::format("evaluate: {} truths, {} predictions, {} probability rows", truth.size(),
                                     predicted.size(), probabilities.size()));
  }
  ConfusionMatrix confusion(c, std::vector<std::size_t>(c, 0));
  for (std::size_t s = 0; s < truth.size(); ++s) {
    if (truth[s] >= c || predicted[s] >= c) throw ParameterError("evaluate: class index out of range");
    if (probabilities[s].size() != c) throw ParameterError("evaluate: probability row has wrong length");
    ++confusion[truth[s]][predicted[s]];
  }
  EvalReport rep = summarize_confusion(confusion, std::move(classes));

  double abs_sum = 0.0;
  double sq_sum = 0.0;
  for (std::size_t s = 0; s < truth.size(); ++s) {
    for (std::size_t k = 0; k < c; ++k) {
      const double d = probabilities[s][k] - (truth[s] == k ? 1.0 : 0.0);
      abs_sum += std::abs(d);
      sq_sum += d * d;
    }
  }
  const double cells = static_cast<double>(truth.size() * c);
  rep.mae = ratio(abs_sum, cells);
  rep.rmse = std::sqrt(ratio(sq_sum, cells));

  std::vector<double> scores(truth.size());
  std::unique_ptr<bool[]> pos(new bool[truth.size()]);
  for (std::size_t k = 0; k < c; ++k) {
    for (std::size_t s = 0; s < truth.size(); ++s) {
      scores[s] = probabilities[s][k];
      pos[s] = truth[s] == k;
    }
    rep.per_class[k].auc = roc_auc(scores, std::span<const bool>(pos.get(), truth.size()));
  }

  ClassMetrics& m = rep.mean;
  for (const ClassMetrics& pc : rep.per_class) {
    m.tpr += pc.tpr;
    m.fpr += pc.fpr;
    m.precision += pc.precision;
    m.recall += pc.recall;
    m.f_measure += pc.f_measure;
    m.auc += pc.auc;
  }
  const auto cd = static_cast<double>(c);
  m.tpr /= cd;
  m.fpr /= cd;
  m.precision /= cd;
  m.recall /= cd;
  m.f_measure /= cd;
  m.auc /= cd;
  return rep;
}

EvalReport evaluate(std::span<const std::string> truth, std::span<const std::string> predicted,
                    const std::vector<std::vector<double>>& probabilities, std::vector<std::string> classes) {
  auto index_of = [&](const std::string& label) {
    const auto it = std::find(classes.begin(), classes.end(), label);
    if (it == classes.end()) throw ParameterError(fmt::format("evaluate: unknown label '{}'", label));
    return static_cast<std::size_t>(it - classes.begin());
  };
  if (truth.size() != predicted.size()) throw ParameterError("evaluate: length mismatch");
  std::vector<std::size_t> t;
  std::vector<std::size_t> p;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    t.push_back(index_of(truth[i]));
    p.push_back(index_of(predicted[i]));
  }
  return evaluate(t, p, probabilities, std::move(classes));
}

const std::vector<std::string>& report_columns() {
  static const std::vector<std::string> cols = {"Kappa", "MAE",       "RMSE",      "TPR", "FPR",
                                                "Precision", "Recall", "F-measure", "AUC"};
  return cols;
}

std::string format_report_table(const EvalReport& report) {
  std::size_t name_w = 5;  // "Class"
  for (const auto& c : report.classes) name_w = std::max(name_w, c.size());
  constexpr int kCol = 10;

  std::string out = fmt::format("{:<{}}", "Class", name_w);
  for (const auto& col : report_columns()) out += fmt::format(" {:>{}}", col, kCol);
  out += '\n';

  auto rates = [&](const ClassMetrics& m) {
    return fmt::format(" {:>{}.4f} {:>{}.4f} {:>{}.4f} {:>{}.4f} {:>{}.4f} {:>{}.4f}", m.tpr, kCol, m.fpr, kCol,
                       m.precision, kCol, m.recall, kCol, m.f_measure, kCol, m.auc, kCol);
  };
  for (std::size_t k = 0; k < report.classes.size(); ++k) {
    out += fmt::format("{:<{}} {:>{}} {:>{}} {:>{}}", report.classes[k], name_w, "", kCol, "", kCol, "", kCol);
    out += rates(report.per_class[k]) + '\n';
  }
  out += fmt::format("{:<{}} {:>{}.4f} {:>{}.4f} {:>{}.4f}", "Mean", name_w, report.kappa, kCol, report.mae, kCol,
                     report.rmse, kCol);
  out += rates(report.mean) + '\n';
  return out;
}

namespace {

nlohmann::json to_json(const ClassMetrics& m) {
  return {{"tpr", m.tpr},       {"fpr", m.fpr},        {"precision", m.precision},
          {"recall", m.recall}, {"f_measure", m.f_measure}, {"auc", m.auc}};
}

}  // namespace

nlohmann::json to_json(const EvalReport& report) {
  nlohmann::json per_class = nlohmann::json::object();
  for (std::size_t k = 0; k < report.classes.size(); ++k) per_class[report.classes[k]] = to_json(report.per_class[k]);
  return {{"classes", report.classes},
          {"confusion", report.confusion},
          {"total", report.total},
          {"accuracy", report.accuracy},
          {"kappa", report.kappa},
          {"mae", report.mae},
          {"rmse", report.rmse},
          {"per_class", per_class},
          {"mean", to_json(report.mean)},
          {"columns", report_columns()}};
}

}  // namespace scriptid
