#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "eventcast/dataset.hpp"

namespace eventcast {

// Rows are true classes, columns predicted classes.
struct ConfusionMatrix {
  std::size_t classes = 0;
  std::vector<std::uint64_t> counts;  // row-major classes x classes
  std::vector<std::string> class_names;

  std::uint64_t at(std::size_t truth, std::size_t predicted) const {
    return counts[truth * classes + predicted];
  }
  std::uint64_t total() const;
  bool operator==(const ConfusionMatrix&) const = default;
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;
};

struct MetricReport {
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  std::vector<ClassMetrics> per_class;
  std::vector<std::string> class_names;
  double train_wall_time = 0.0;  // seconds, filled by the caller
};

ConfusionMatrix confusion(std::span<const Code> y_true, std::span<const Code> y_pred,
                          std::size_t classes);

// One-vs-rest precision, recall and F1 per class; macro values are unweighted
// means over all classes; 0/0 is taken as 0. Throws std::invalid_argument on
// an empty matrix.
MetricReport metrics(const ConfusionMatrix& cm);

struct SplitResult {
  EncodedDataset train;
  EncodedDataset test;
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
};

// Per class, round(n_c * test_fraction) rows (clamped to 1..n_c-1) go to the
// test side. Row order within each side follows the input. Throws DataError
// when a present class has fewer than 2 rows.
SplitResult stratified_split(const EncodedDataset& dataset, double test_fraction,
                             std::uint64_t seed);

// Wall time is left out so the document is reproducible.
std::string metrics_json(const MetricReport& report, int indent = 2);
// One row per class plus a trailing "macro" row.
std::string metrics_csv(const MetricReport& report);
std::string confusion_csv(const ConfusionMatrix& cm);

}  // namespace eventcast

#include "eventcast/learners.hpp"

namespace eventcast {

// Predicts `test` with `model` and scores the result.
MetricReport evaluate(const LearnerModel& model, const EncodedDataset& test);

}  // namespace eventcast
