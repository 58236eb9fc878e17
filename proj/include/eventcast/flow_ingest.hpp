#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eventcast/dataset.hpp"

namespace eventcast {

enum class ColumnKind {
  kCategorical,  // free text, ordinal-coded lexicographically
  kNumeric,      // continuous non-negative decimal, later split into log/sig
  kOrdinal,      // discrete number, coded by ascending value
  kLabel,
  kDrop,
};

std::string_view to_string(ColumnKind kind);
ColumnKind column_kind_from_string(std::string_view text);

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::kCategorical;

  bool operator==(const ColumnSpec&) const = default;
};

struct DatasetSchema {
  std::string name;
  std::vector<ColumnSpec> columns;
  // Optional fixed class list; when present labels outside it are corrupt
  // rows and codes follow this order.
  std::vector<std::string> label_classes;

  // Exactly one label column, unique names. Throws ConfigError.
  void validate() const;
  // Columns that become features (everything but label and drop).
  std::size_t feature_count() const;
  const ColumnSpec* find(std::string_view column) const;
  const ColumnSpec& label() const;
  // Marks the named columns as drop; unknown names are a ConfigError.
  void drop_columns(std::span<const std::string> names);
};

// Built-in schemas: "unsw-nb15", "unsw-nb15-flow", "cicids-17". "infer" needs
// data, see infer_schema.
DatasetSchema resolve_schema(std::string_view name);

// Reads the header and cells of `path`: a column whose every cell parses as a
// finite number is numeric, otherwise categorical. `label_column` must exist.
DatasetSchema infer_schema(const std::string& path, std::string_view label_column);

struct RawColumn {
  ColumnSpec spec;
  std::vector<std::string> text;  // categorical and label columns
  std::vector<double> numbers;    // numeric and ordinal columns
};

// Parsed CSV restricted to the schema's non-drop columns, in schema order.
struct RawFlowTable {
  DatasetSchema schema;
  std::vector<RawColumn> columns;
  std::size_t row_count = 0;
  std::size_t dropped_rows = 0;

  const RawColumn& label_column() const;
};

// Parses a CSV file. Rows with a wrong field count, unparseable/non-finite
// numeric cells, negative continuous values, or labels outside a fixed class
// list are dropped and counted. Throws DataError on a missing file, a header
// that does not match the schema, or when more than half the rows drop.
RawFlowTable load_csv(const std::string& path, const DatasetSchema& schema);
RawFlowTable parse_csv(std::string_view text, const DatasetSchema& schema,
                       std::string_view source = "<memory>");

// Fits code maps on `table` and encodes it. Categorical codes follow ascending
// lexicographic order of the observed strings; ordinal codes follow ascending
// numeric value; numeric columns are carried as passthrough decimals.
EncodedDataset ordinal_encode(const RawFlowTable& table);

// Encodes `table` with code maps fitted elsewhere (e.g. on the training
// split). `features` lists the fitted layout before discretization.
// Unseen categories take the reserved code `cardinality`; unseen ordinal
// values map to the nearest lower observed value.
EncodedDataset apply_encoding(const RawFlowTable& table,
                              std::span<const FeatureMeta> features,
                              std::span<const std::string> class_names);

// Inverse of the categorical/ordinal code map of one feature.
std::string decode(const FeatureMeta& meta, Code code);

}  // namespace eventcast
