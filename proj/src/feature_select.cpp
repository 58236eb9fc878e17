#include "eventcast/feature_select.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "eventcast/error.hpp"
#include "eventcast/evaluator.hpp"
#include "eventcast/format.hpp"
#include "eventcast/parallel.hpp"

namespace eventcast {
namespace {

double frequency_chi2(const FeatureColumn& column, std::span<const Code> labels,
                      std::span<const std::size_t> class_rows, bool& degenerate) {
  std::vector<double> observed(class_rows.size(), 0.0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    observed[labels[i]] += static_cast<double>(column.codes[i]);
  }
  const double total = std::accumulate(observed.begin(), observed.end(), 0.0);
  degenerate = total == 0.0;
  if (degenerate) return 0.0;
  const double n = static_cast<double>(labels.size());
  double chi2 = 0.0;
  for (std::size_t c = 0; c < observed.size(); ++c) {
    const double expected = static_cast<double>(class_rows[c]) / n * total;
    if (expected > 0.0) {
      const double d = observed[c] - expected;
      chi2 += d * d / expected;
    }
  }
  return chi2;
}

double contingency_chi2(const FeatureColumn& column, std::span<const Code> labels,
                        std::span<const std::size_t> class_rows, bool& degenerate) {
  const std::size_t classes = class_rows.size();
  const std::size_t bins = column.meta.cardinality + 1;
  std::vector<double> table(bins * classes, 0.0);
  std::vector<double> code_rows(bins, 0.0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    table[column.codes[i] * classes + labels[i]] += 1.0;
    code_rows[column.codes[i]] += 1.0;
  }
  const double n = static_cast<double>(labels.size());
  const auto used = std::count_if(code_rows.begin(), code_rows.end(),
                                  [](double r) { return r > 0.0; });
  degenerate = used < 2;
  double chi2 = 0.0;
  for (std::size_t v = 0; v < bins; ++v) {
    for (std::size_t c = 0; c < classes; ++c) {
      const double expected = code_rows[v] * static_cast<double>(class_rows[c]) / n;
      if (expected > 0.0) {
        const double d = table[v * classes + c] - expected;
        chi2 += d * d / expected;
      }
    }
  }
  return chi2;
}

SweepRow to_row(std::size_t k, const MetricReport& report) {
  return {k, report.accuracy, report.macro_precision, report.macro_recall, report.macro_f1};
}

}  // namespace

FeatureScoreTable chi2_scores(const EncodedDataset& dataset, Chi2Variant variant) {
  if (!dataset.all_discrete()) throw DataError("chi-squared scoring needs discrete features");
  if (dataset.class_count() < 2) throw DataError("chi-squared scoring needs >= 2 classes");
  if (dataset.rows() == 0) throw DataError("chi-squared scoring needs rows");
  const auto class_rows = dataset.class_histogram();
  std::vector<double> scores;
  std::vector<bool> degenerate;
  for (const auto& column : dataset.columns()) {
    bool flag = false;
    scores.push_back(variant == Chi2Variant::kFrequency
                         ? frequency_chi2(column, dataset.labels(), class_rows, flag)
                         : contingency_chi2(column, dataset.labels(), class_rows, flag));
    degenerate.push_back(flag);
  }
  const auto names = dataset.feature_names();
  auto table = make_score_table(names, scores);
  for (std::size_t f = 0; f < table.size(); ++f) table[f].degenerate = degenerate[f];
  return table;
}

std::vector<std::size_t> k_best_indices(const FeatureScoreTable& table, std::size_t k) {
  if (k < 1 || k > table.size()) {
    throw std::invalid_argument("k = " + std::to_string(k) + " is outside 1.." +
                                std::to_string(table.size()));
  }
  std::vector<double> scores;
  for (const auto& row : table) scores.push_back(row.score);
  auto order = rank_order(scores);
  order.resize(k);
  std::sort(order.begin(), order.end());
  return order;
}

EncodedDataset select_k_best(const EncodedDataset& dataset, std::size_t k, Chi2Variant variant) {
  return dataset.select_features(k_best_indices(chi2_scores(dataset, variant), k));
}

std::vector<SweepRow> kbest_sweep(const EncodedDataset& train_set, const EncodedDataset& test_set,
                                  const LearnerParams& params,
                                  std::span<const std::size_t> k_values, std::size_t workers,
                                  Chi2Variant variant) {
  const auto scores = chi2_scores(train_set, variant);
  for (std::size_t k : k_values) k_best_indices(scores, k);  // validates every k up front
  std::vector<SweepRow> rows(k_values.size());
  parallel_for(k_values.size(), workers, [&](std::size_t j) {
    const auto keep = k_best_indices(scores, k_values[j]);
    const auto model = train(train_set.select_features(keep), params);
    rows[j] = to_row(k_values[j], evaluate(model, test_set.select_features(keep)));
  });
  return rows;
}

RfeResult rfe_sweep(const EncodedDataset& train_set, const EncodedDataset& test_set,
                    const LearnerParams& params, std::size_t step, std::size_t floor,
                    std::size_t workers) {
  if (step < 1) throw std::invalid_argument("RFE step must be >= 1");
  if (params.learner == LearnerKind::kNbayes) {
    throw std::invalid_argument("RFE needs a tree-family learner for importances");
  }
  floor = std::max<std::size_t>(floor, 1);
  std::vector<std::size_t> current(train_set.feature_count());
  std::iota(current.begin(), current.end(), 0);

  RfeResult result;
  const auto by_importance = [](const std::vector<double>& importance) {
    // Ascending importance; equal importance: later column first.
    std::vector<std::size_t> order(importance.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (importance[a] != importance[b]) return importance[a] < importance[b];
      return a > b;
    });
    return order;
  };

  while (true) {
    const auto model = train(train_set.select_features(current), params, workers);
    result.rows.push_back(to_row(current.size(), evaluate(model, test_set.select_features(current))));
    const auto order = by_importance(model.importance);
    if (current.size() <= floor) {
      for (std::size_t pos : order) result.elimination_order.push_back(train_set.meta(current[pos]).name);
      break;
    }
    const std::size_t drop = std::min(step, current.size() - floor);
    std::vector<bool> removed(current.size(), false);
    for (std::size_t i = 0; i < drop; ++i) {
      removed[order[i]] = true;
      result.elimination_order.push_back(train_set.meta(current[order[i]]).name);
    }
    std::vector<std::size_t> next;
    for (std::size_t pos = 0; pos < current.size(); ++pos) {
      if (!removed[pos]) next.push_back(current[pos]);
    }
    current = std::move(next);
  }
  return result;
}

std::string sweep_csv(std::span<const SweepRow> rows) {
  std::ostringstream out;
  out << "k,accuracy,precision,recall,f1\n";
  for (const auto& row : rows) {
    out << row.k << ',' << format_double(row.accuracy) << ',' << format_double(row.precision)
        << ',' << format_double(row.recall) << ',' << format_double(row.f1) << '\n';
  }
  return out.str();
}

}  // namespace eventcast
