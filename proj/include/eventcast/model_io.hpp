#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eventcast/discretizer.hpp"
#include "eventcast/event_space.hpp"
#include "eventcast/learners.hpp"

namespace eventcast {

inline constexpr int kBundleFormatVersion = 1;

// Everything needed to replay preprocessing and forecast from a trained
// model: the model itself, the fitted encoding of the raw columns, the
// discretizer state, the training domains of the model's features, and the
// holdout metrics the model was selected on.
struct ModelBundle {
  LearnerModel model;
  std::vector<FeatureMeta> source_features;  // layout before discretization
  DiscretizerState discretizer;
  EventSpaceSpec domains;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
};

// Single JSON document: {"format_version": 1, "metadata": {...}, ...} with
// trees stored as flat node arrays.
std::string bundle_to_json(const ModelBundle& bundle);
// Throws DataError on malformed/truncated input or a version mismatch.
ModelBundle bundle_from_json(const std::string& text);

void save_bundle(const ModelBundle& bundle, const std::string& path);
ModelBundle load_bundle(const std::string& path);

void save_model(const LearnerModel& model, const std::string& path);
LearnerModel load_model(const std::string& path);

}  // namespace eventcast
