#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace eventcast {

// One row of a per-feature score table: raw score, score mapped into
// [0.1, 0.9], and 1-based rank (1 = highest score, ties by column order).
struct FeatureScore {
  std::string feature;
  double score = 0.0;
  double scaled = 0.0;
  std::size_t rank = 0;
  // Set when the score is undefined for the feature (e.g. an all-zero column
  // under chi-squared) and was reported as 0.
  bool degenerate = false;

  bool operator==(const FeatureScore&) const = default;
};

using FeatureScoreTable = std::vector<FeatureScore>;

// Min-max mapping into [0.1, 0.9]: 0.1 + 0.8 (s - min) / (max - min). When all
// scores are equal every entry maps to 0.5.
std::vector<double> scale_scores(std::span<const double> scores);

// Indices ordered by descending score; equal scores keep column order.
std::vector<std::size_t> rank_order(std::span<const double> scores);

// Builds a table with scaled scores and ranks filled in.
FeatureScoreTable make_score_table(std::span<const std::string> names,
                                   std::span<const double> scores);

// CSV with header feature,score,scaled,rank in column order.
std::string score_table_csv(const FeatureScoreTable& table);

}  // namespace eventcast
