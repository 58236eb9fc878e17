#pragma once

#include <cstdint>
#include <string_view>

#include "eventcast/dataset.hpp"

namespace eventcast {

enum class ResampleMode { kNone, kUnder, kOver, kHybrid };

std::string_view to_string(ResampleMode mode);
ResampleMode resample_mode_from_string(std::string_view text);

struct ResamplePlan {
  ResampleMode mode = ResampleMode::kNone;
  // Largest allowed count of any class relative to the rarest class.
  double majority_cap_ratio = 5.0;
  // Minority classes are padded up to this fraction of the largest class.
  double minority_target_ratio = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
};

// Classes with more than floor(cap * min_count) rows are subsampled without
// replacement to exactly that many; smaller classes are kept whole. Row order
// of the survivors is preserved.
EncodedDataset undersample(const EncodedDataset& dataset, const ResamplePlan& plan);

// Pads every class below ceil(target * max_count) with duplicates of its own
// rows drawn with replacement. Originals come first, in input order.
EncodedDataset oversample(const EncodedDataset& dataset, const ResamplePlan& plan);

// Dispatches on plan.mode; hybrid is undersample followed by oversample.
EncodedDataset resample(const EncodedDataset& dataset, const ResamplePlan& plan);

}  // namespace eventcast
