#pragma once

#include <string>

#include "eventcast/dataset.hpp"

namespace eventcast {

// Columnar binary file `path` (little-endian: magic "ECD1", row, feature and
// class counts, then one block per column and the labels) plus a JSON sidecar
// `path + ".json"` holding the feature metadata and class names.
void write_dataset(const EncodedDataset& dataset, const std::string& path);
// Throws DataError on a missing, truncated, or inconsistent artifact.
EncodedDataset read_dataset(const std::string& path);

}  // namespace eventcast
