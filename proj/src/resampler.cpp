#include "eventcast/resampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "eventcast/error.hpp"
#include "eventcast/rng.hpp"

namespace eventcast {

std::string_view to_string(ResampleMode mode) {
  switch (mode) {
    case ResampleMode::kNone: return "none";
    case ResampleMode::kUnder: return "under";
    case ResampleMode::kOver: return "over";
    case ResampleMode::kHybrid: return "hybrid";
  }
  return "?";
}

ResampleMode resample_mode_from_string(std::string_view text) {
  for (auto mode : {ResampleMode::kNone, ResampleMode::kUnder, ResampleMode::kOver,
                    ResampleMode::kHybrid}) {
    if (to_string(mode) == text) return mode;
  }
  throw ConfigError("unknown resample mode '" + std::string(text) + "'");
}

void ResamplePlan::validate() const {
  if (mode == ResampleMode::kNone) return;
  if (!(majority_cap_ratio >= 1.0)) throw ConfigError("resample.majority_cap_ratio must be >= 1");
  if (!(minority_target_ratio >= 0.0 && minority_target_ratio <= 1.0)) {
    throw ConfigError("resample.minority_target_ratio must be in [0, 1]");
  }
}

namespace {

std::vector<std::vector<std::size_t>> rows_by_class(const EncodedDataset& dataset) {
  std::vector<std::vector<std::size_t>> rows(dataset.class_count());
  for (std::size_t i = 0; i < dataset.rows(); ++i) rows[dataset.labels()[i]].push_back(i);
  return rows;
}

}  // namespace

EncodedDataset undersample(const EncodedDataset& dataset, const ResamplePlan& plan) {
  plan.validate();
  auto rows = rows_by_class(dataset);
  std::size_t present = 0;
  std::size_t min_count = dataset.rows();
  for (const auto& members : rows) {
    if (members.empty()) continue;
    ++present;
    min_count = std::min(min_count, members.size());
  }
  if (present < 2) throw DataError("undersampling needs at least two populated classes");

  const auto cap = static_cast<std::size_t>(
      std::floor(plan.majority_cap_ratio * static_cast<double>(min_count) + 1e-9));
  Rng rng(plan.seed);
  std::vector<std::size_t> keep;
  for (auto& members : rows) {
    if (members.size() > cap) {
      // Partial Fisher-Yates: the first `cap` slots become a uniform subset.
      for (std::size_t i = 0; i < cap; ++i) {
        const auto j = i + rng.below(members.size() - i);
        std::swap(members[i], members[j]);
      }
      members.resize(cap);
    }
    keep.insert(keep.end(), members.begin(), members.end());
  }
  std::sort(keep.begin(), keep.end());
  return dataset.select_rows(keep);
}

EncodedDataset oversample(const EncodedDataset& dataset, const ResamplePlan& plan) {
  plan.validate();
  const auto rows = rows_by_class(dataset);
  std::size_t max_count = 0;
  for (const auto& members : rows) max_count = std::max(max_count, members.size());
  const auto target = static_cast<std::size_t>(
      std::ceil(plan.minority_target_ratio * static_cast<double>(max_count) - 1e-9));

  Rng rng(plan.seed);
  std::vector<std::size_t> out(dataset.rows());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = i;
  for (std::size_t c = 0; c < rows.size(); ++c) {
    const auto& members = rows[c];
    if (members.size() >= target) continue;
    if (members.empty()) {
      throw DataError("class '" + dataset.class_names()[c] +
                      "' has no rows to duplicate during oversampling");
    }
    for (std::size_t n = members.size(); n < target; ++n) {
      out.push_back(members[rng.below(members.size())]);
    }
  }
  return dataset.select_rows(out);
}

EncodedDataset resample(const EncodedDataset& dataset, const ResamplePlan& plan) {
  switch (plan.mode) {
    case ResampleMode::kNone: return dataset;
    case ResampleMode::kUnder: return undersample(dataset, plan);
    case ResampleMode::kOver: return oversample(dataset, plan);
    case ResampleMode::kHybrid: return oversample(undersample(dataset, plan), plan);
  }
  throw InvariantError("unhandled resample mode");
}

}  // namespace eventcast
