#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace eventcast {

using Code = std::uint32_t;

enum class FeatureKind { kCategorical, kOrdinal, kMag, kSig, kPassthrough };

std::string_view to_string(FeatureKind kind);
FeatureKind feature_kind_from_string(std::string_view text);

struct FeatureMeta {
  std::string name;
  FeatureKind kind = FeatureKind::kCategorical;
  // Number of codes; code_map[c] is the human-readable value of code c.
  // Zero for passthrough columns, which carry raw decimals instead.
  Code cardinality = 0;
  std::vector<std::string> code_map;

  bool operator==(const FeatureMeta&) const = default;
};

// One feature column. Discrete columns fill `codes`; passthrough columns fill
// `values` and wait for the discretizer.
struct FeatureColumn {
  FeatureMeta meta;
  std::vector<Code> codes;
  std::vector<double> values;

  bool is_discrete() const { return meta.kind != FeatureKind::kPassthrough; }
  bool operator==(const FeatureColumn&) const = default;
};

/// Column-major table of integer-coded features plus class labels.
///
/// Invariants (checked by validate()): every column has rows() entries, every
/// label is < class_count(), every discrete code is <= its cardinality. A code
/// equal to the cardinality is the reserved bucket for values first seen after
/// fitting; datasets produced by fitting never contain it.
class EncodedDataset {
 public:
  EncodedDataset() = default;
  EncodedDataset(std::vector<FeatureColumn> columns, std::vector<Code> labels,
                 std::vector<std::string> class_names);

  std::size_t rows() const { return labels_.size(); }
  std::size_t feature_count() const { return columns_.size(); }
  std::size_t class_count() const { return class_names_.size(); }

  const std::vector<FeatureColumn>& columns() const { return columns_; }
  const FeatureColumn& column(std::size_t f) const { return columns_[f]; }
  const FeatureMeta& meta(std::size_t f) const { return columns_[f].meta; }
  std::vector<FeatureMeta> feature_meta() const;
  std::vector<std::string> feature_names() const;
  // Index of the named feature; throws DataError if absent.
  std::size_t feature_index(std::string_view name) const;

  std::span<const Code> labels() const { return labels_; }
  const std::vector<std::string>& class_names() const { return class_names_; }

  Code code(std::size_t row, std::size_t feature) const {
    return columns_[feature].codes[row];
  }
  // Copies one row's codes into `out` (resized to feature_count()).
  void gather_row(std::size_t row, std::vector<Code>& out) const;

  bool all_discrete() const;
  // True when some code equals its column's cardinality (unseen at fit time).
  bool has_reserved_codes() const;
  std::vector<std::size_t> class_histogram() const;

  // Rows at `indices` in that order (duplicates allowed).
  EncodedDataset select_rows(std::span<const std::size_t> indices) const;
  // Columns at `indices` in that order.
  EncodedDataset select_features(std::span<const std::size_t> indices) const;
  EncodedDataset select_features(std::span<const std::string> names) const;

  // Throws InvariantError when a structural invariant does not hold.
  void validate() const;

  bool operator==(const EncodedDataset&) const = default;

 private:
  std::vector<FeatureColumn> columns_;
  std::vector<Code> labels_;
  std::vector<std::string> class_names_;
};

// Stable identity of a feature layout: names, kinds and cardinalities.
std::uint64_t fingerprint(std::span<const FeatureMeta> features);

}  // namespace eventcast
