#pragma once

#include <span>
#include <vector>

#include "eventcast/dataset.hpp"
#include "eventcast/learners.hpp"

namespace eventcast::detail {

// Throws DataError / ConfigError unless `dataset` can be trained on.
void check_trainable(const EncodedDataset& dataset, const LearnerParams& params);

// Column views plus per-feature bin counts (cardinality + 1, so the reserved
// unseen code has a bin of its own).
struct ColumnView {
  std::vector<std::span<const Code>> codes;
  std::vector<std::size_t> bins;

  explicit ColumnView(const EncodedDataset& dataset);
};

LearnerModel make_model(const EncodedDataset& dataset, const LearnerParams& params);

// log with the argument floored at 1e-12.
double safe_log(double x);

}  // namespace eventcast::detail
