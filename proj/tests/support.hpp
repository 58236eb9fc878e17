#pragma once

#include <string>
#include <vector>

#include "eventcast/dataset.hpp"
#include "eventcast/rng.hpp"

namespace support {

using eventcast::Code;

inline eventcast::FeatureColumn discrete_column(const std::string& name, std::vector<Code> codes,
                                                Code cardinality = 0) {
  for (Code c : codes) cardinality = std::max<Code>(cardinality, c + 1);
  eventcast::FeatureMeta meta{name, eventcast::FeatureKind::kOrdinal, cardinality, {}};
  for (Code c = 0; c < cardinality; ++c) meta.code_map.push_back(std::to_string(c));
  return {std::move(meta), std::move(codes), {}};
}

inline eventcast::FeatureColumn passthrough_column(const std::string& name,
                                                   std::vector<double> values) {
  eventcast::FeatureMeta meta{name, eventcast::FeatureKind::kPassthrough, 0, {}};
  return {std::move(meta), {}, std::move(values)};
}

inline std::vector<std::string> class_names(std::size_t classes) {
  std::vector<std::string> names;
  for (std::size_t c = 0; c < classes; ++c) names.push_back("c" + std::to_string(c));
  return names;
}

// Columns given row-wise as code vectors per feature.
inline eventcast::EncodedDataset make_dataset(const std::vector<std::vector<Code>>& features,
                                              std::vector<Code> labels, std::size_t classes) {
  std::vector<eventcast::FeatureColumn> columns;
  for (std::size_t f = 0; f < features.size(); ++f) {
    columns.push_back(discrete_column("f" + std::to_string(f), features[f]));
  }
  return eventcast::EncodedDataset(std::move(columns), std::move(labels), class_names(classes));
}

// rows x features codes below `cardinality`, labels below `classes`, every
// class present when rows >= classes.
inline eventcast::EncodedDataset random_dataset(eventcast::Rng& rng, std::size_t rows,
                                                std::size_t features, Code cardinality,
                                                std::size_t classes) {
  std::vector<std::vector<Code>> columns(features, std::vector<Code>(rows));
  for (auto& column : columns) {
    for (auto& code : column) code = static_cast<Code>(rng.below(cardinality));
  }
  std::vector<Code> labels(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    labels[r] = static_cast<Code>(r < classes ? r : rng.below(classes));
  }
  std::vector<eventcast::FeatureColumn> cols;
  for (std::size_t f = 0; f < features; ++f) {
    cols.push_back(discrete_column("f" + std::to_string(f), columns[f], cardinality));
  }
  return eventcast::EncodedDataset(std::move(cols), std::move(labels), class_names(classes));
}

}  // namespace support
