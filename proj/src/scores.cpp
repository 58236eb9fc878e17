#include "eventcast/scores.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "eventcast/csv.hpp"
#include "eventcast/format.hpp"

namespace eventcast {

std::vector<double> scale_scores(std::span<const double> scores) {
  std::vector<double> scaled(scores.size(), 0.5);
  if (scores.empty()) return scaled;
  const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
  const double span = *hi - *lo;
  if (span <= 0.0) return scaled;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    scaled[i] = 0.1 + 0.8 * (scores[i] - *lo) / span;
  }
  // Endpoints exactly, independent of rounding in the division.
  scaled[static_cast<std::size_t>(lo - scores.begin())] = 0.1;
  scaled[static_cast<std::size_t>(hi - scores.begin())] = 0.9;
  return scaled;
}

std::vector<std::size_t> rank_order(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

FeatureScoreTable make_score_table(std::span<const std::string> names,
                                   std::span<const double> scores) {
  FeatureScoreTable table(names.size());
  const auto scaled = scale_scores(scores);
  for (std::size_t i = 0; i < names.size(); ++i) {
    table[i].feature = names[i];
    table[i].score = scores[i];
    table[i].scaled = scaled[i];
  }
  const auto order = rank_order(scores);
  for (std::size_t r = 0; r < order.size(); ++r) table[order[r]].rank = r + 1;
  return table;
}

std::string score_table_csv(const FeatureScoreTable& table) {
  std::ostringstream out;
  out << "feature,score,scaled,rank\n";
  for (const auto& row : table) {
    out << csv_field(row.feature) << ',' << format_double(row.score) << ','
        << format_double(row.scaled) << ',' << row.rank << '\n';
  }
  return out.str();
}

}  // namespace eventcast
