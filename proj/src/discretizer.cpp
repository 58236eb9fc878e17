#include "eventcast/discretizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "eventcast/error.hpp"

namespace eventcast {
namespace {

// Relative slack so that decimal inputs just below a digit boundary in binary
// (0.3 is stored as 0.29999...) land on the digit a reader would expect.
constexpr double kDigitSlack = 1e-12;

FeatureColumn make_mag_column(const FeatureColumn& source, const MagRange& range) {
  FeatureMeta meta{source.meta.name + " log", FeatureKind::kMag, 0, {"0"}};
  for (int m = range.min_mag; m <= range.max_mag; ++m) {
    meta.code_map.push_back("1e" + std::to_string(m));
  }
  meta.cardinality = static_cast<Code>(meta.code_map.size());

  FeatureColumn column{std::move(meta), {}, {}};
  column.codes.reserve(source.values.size());
  for (double x : source.values) {
    const auto pair = log_sig(x);
    if (pair.sig == 0) {
      column.codes.push_back(0);
    } else {
      const int mag = std::clamp(pair.mag, range.min_mag, range.max_mag);
      column.codes.push_back(static_cast<Code>(mag - range.min_mag + 1));
    }
  }
  return column;
}

FeatureColumn make_sig_column(const FeatureColumn& source) {
  FeatureMeta meta{source.meta.name + " sig", FeatureKind::kSig, 10, {}};
  for (int d = 0; d < 10; ++d) meta.code_map.push_back(std::to_string(d));
  FeatureColumn column{std::move(meta), {}, {}};
  column.codes.reserve(source.values.size());
  for (double x : source.values) column.codes.push_back(static_cast<Code>(log_sig(x).sig));
  return column;
}

}  // namespace

LogSigPair log_sig(double x) {
  if (!std::isfinite(x) || x < 0.0) {
    throw std::invalid_argument("log_sig needs a finite non-negative value, got " +
                                std::to_string(x));
  }
  if (x == 0.0) return {0, 0};

  int mag = static_cast<int>(std::floor(std::log10(x)));
  double scale = std::pow(10.0, mag);
  if (x < scale * (1.0 - kDigitSlack)) {
    --mag;
    scale = std::pow(10.0, mag);
  } else if (x >= 10.0 * scale * (1.0 - kDigitSlack)) {
    ++mag;
    scale = std::pow(10.0, mag);
  }
  int sig = static_cast<int>(std::floor(x / scale * (1.0 + kDigitSlack)));
  if (sig >= 10) {
    ++mag;
    sig = 1;
  }
  return {mag, std::clamp(sig, 1, 9)};
}

const MagRange* DiscretizerState::range_for(const std::string& feature) const {
  for (const auto& range : ranges) {
    if (range.feature == feature) return &range;
  }
  return nullptr;
}

DiscretizerState fit_log_sig(const EncodedDataset& dataset) {
  DiscretizerState state;
  for (const auto& column : dataset.columns()) {
    if (column.is_discrete()) continue;
    int lo = std::numeric_limits<int>::max();
    int hi = std::numeric_limits<int>::min();
    for (double x : column.values) {
      if (x == 0.0) continue;
      const int mag = log_sig(x).mag;
      lo = std::min(lo, mag);
      hi = std::max(hi, mag);
    }
    if (lo > hi) lo = hi = 0;  // only zeros observed
    state.ranges.push_back({column.meta.name, lo, hi});
  }
  return state;
}

EncodedDataset expand_log_sig(const EncodedDataset& dataset, const DiscretizerState& state) {
  if (dataset.all_discrete()) {
    throw std::invalid_argument("expand_log_sig needs at least one passthrough column");
  }
  std::vector<FeatureColumn> columns;
  columns.reserve(dataset.feature_count() * 2);
  for (const auto& column : dataset.columns()) {
    if (column.is_discrete()) {
      columns.push_back(column);
      continue;
    }
    const MagRange* range = state.range_for(column.meta.name);
    if (range == nullptr) {
      throw DataError("no fitted magnitude range for '" + column.meta.name + "'");
    }
    columns.push_back(make_mag_column(column, *range));
    columns.push_back(make_sig_column(column));
  }
  return EncodedDataset(std::move(columns),
                        std::vector<Code>(dataset.labels().begin(), dataset.labels().end()),
                        dataset.class_names());
}

EncodedDataset expand_log_sig(const EncodedDataset& dataset) {
  return expand_log_sig(dataset, fit_log_sig(dataset));
}

double code_variance(const FeatureColumn& column) {
  const std::size_t n = column.is_discrete() ? column.codes.size() : column.values.size();
  if (n == 0) return 0.0;
  auto value = [&](std::size_t i) {
    return column.is_discrete() ? static_cast<double>(column.codes[i]) : column.values[i];
  };
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += value(i);
  const double mean = sum / static_cast<double>(n);
  double squares = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = value(i) - mean;
    squares += d * d;
  }
  return squares / static_cast<double>(n);
}

EncodedDataset variance_filter(const EncodedDataset& dataset, double threshold,
                               DiscretizerState& state) {
  if (!(threshold >= 0.0)) throw std::invalid_argument("variance threshold must be >= 0");
  std::vector<std::size_t> keep;
  std::vector<std::string> dropped;
  std::vector<FeatureVariance> variances;
  for (std::size_t f = 0; f < dataset.feature_count(); ++f) {
    const auto& column = dataset.column(f);
    const double variance = code_variance(column);
    variances.push_back({column.meta.name, variance});
    if (variance <= threshold) {
      dropped.push_back(column.meta.name);
    } else {
      keep.push_back(f);
    }
  }
  if (keep.empty()) {
    throw DataError("variance filter (threshold " + std::to_string(threshold) +
                    ") removed every feature");
  }
  state.variances = std::move(variances);
  state.dropped_features.insert(state.dropped_features.end(), dropped.begin(), dropped.end());
  return dataset.select_features(keep);
}

EncodedDataset apply_discretizer(const EncodedDataset& dataset, const DiscretizerState& state) {
  EncodedDataset expanded = dataset.all_discrete() ? dataset : expand_log_sig(dataset, state);
  if (state.dropped_features.empty()) return expanded;
  std::vector<std::size_t> keep;
  for (std::size_t f = 0; f < expanded.feature_count(); ++f) {
    const auto& name = expanded.meta(f).name;
    if (std::find(state.dropped_features.begin(), state.dropped_features.end(), name) ==
        state.dropped_features.end()) {
      keep.push_back(f);
    }
  }
  return expanded.select_features(keep);
}

}  // namespace eventcast
