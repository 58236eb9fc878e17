#pragma once

#include <string>
#include <vector>

#include "eventcast/dataset.hpp"

namespace eventcast {

// Decimal order of magnitude and leading significant digit of a value.
// x = 0 gives (0, 0); for x > 0, sig is in 1..9 and
// sig * 10^mag <= x < (sig + 1) * 10^mag.
struct LogSigPair {
  int mag = 0;
  int sig = 0;

  bool operator==(const LogSigPair&) const = default;
  auto operator<=>(const LogSigPair&) const = default;
};

// Throws std::invalid_argument for negative or non-finite x.
LogSigPair log_sig(double x);

struct MagRange {
  std::string feature;  // source passthrough column
  int min_mag = 0;
  int max_mag = 0;

  bool operator==(const MagRange&) const = default;
};

struct FeatureVariance {
  std::string feature;
  double variance = 0.0;

  bool operator==(const FeatureVariance&) const = default;
};

struct DiscretizerState {
  std::vector<MagRange> ranges;
  std::vector<FeatureVariance> variances;
  std::vector<std::string> dropped_features;

  const MagRange* range_for(const std::string& feature) const;
  bool operator==(const DiscretizerState&) const = default;
};

// Magnitude range of every passthrough column over its positive values.
DiscretizerState fit_log_sig(const EncodedDataset& dataset);

// Replaces each passthrough column "x" with "x log" (mag code) and "x sig"
// (leading digit) in place. The mag code is 0 for zero and
// clamp(mag, min, max) - min + 1 otherwise. Throws std::invalid_argument when
// there is no passthrough column.
EncodedDataset expand_log_sig(const EncodedDataset& dataset, const DiscretizerState& state);
EncodedDataset expand_log_sig(const EncodedDataset& dataset);

// Population variance of a discrete column's codes.
double code_variance(const FeatureColumn& column);

// Removes features whose variance is <= threshold and records them (and all
// variances) in `state`. Throws DataError when nothing would survive.
EncodedDataset variance_filter(const EncodedDataset& dataset, double threshold,
                               DiscretizerState& state);

// Replays a fitted state: log/sig expansion then the recorded drops.
EncodedDataset apply_discretizer(const EncodedDataset& dataset, const DiscretizerState& state);

}  // namespace eventcast
