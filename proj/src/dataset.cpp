#include "eventcast/dataset.hpp"

#include <algorithm>
#include <string>

#include "eventcast/error.hpp"
#include "eventcast/rng.hpp"

namespace eventcast {

std::string_view to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::kCategorical: return "categorical";
    case FeatureKind::kOrdinal: return "ordinal";
    case FeatureKind::kMag: return "mag";
    case FeatureKind::kSig: return "sig";
    case FeatureKind::kPassthrough: return "passthrough";
  }
  return "?";
}

FeatureKind feature_kind_from_string(std::string_view text) {
  for (auto kind : {FeatureKind::kCategorical, FeatureKind::kOrdinal, FeatureKind::kMag,
                    FeatureKind::kSig, FeatureKind::kPassthrough}) {
    if (to_string(kind) == text) return kind;
  }
  throw DataError("unknown feature kind '" + std::string(text) + "'");
}

EncodedDataset::EncodedDataset(std::vector<FeatureColumn> columns, std::vector<Code> labels,
                               std::vector<std::string> class_names)
    : columns_(std::move(columns)),
      labels_(std::move(labels)),
      class_names_(std::move(class_names)) {
  validate();
}

std::vector<FeatureMeta> EncodedDataset::feature_meta() const {
  std::vector<FeatureMeta> meta;
  meta.reserve(columns_.size());
  for (const auto& column : columns_) meta.push_back(column.meta);
  return meta;
}

std::vector<std::string> EncodedDataset::feature_names() const {
  std::vector<std::string> names;
  names.reserve(columns_.size());
  for (const auto& column : columns_) names.push_back(column.meta.name);
  return names;
}

std::size_t EncodedDataset::feature_index(std::string_view name) const {
  for (std::size_t f = 0; f < columns_.size(); ++f) {
    if (columns_[f].meta.name == name) return f;
  }
  throw DataError("no feature named '" + std::string(name) + "'");
}

void EncodedDataset::gather_row(std::size_t row, std::vector<Code>& out) const {
  out.resize(columns_.size());
  for (std::size_t f = 0; f < columns_.size(); ++f) out[f] = columns_[f].codes[row];
}

bool EncodedDataset::has_reserved_codes() const {
  return std::any_of(columns_.begin(), columns_.end(), [](const FeatureColumn& c) {
    return std::any_of(c.codes.begin(), c.codes.end(),
                       [&](Code code) { return code >= c.meta.cardinality; });
  });
}

bool EncodedDataset::all_discrete() const {
  return std::all_of(columns_.begin(), columns_.end(),
                     [](const FeatureColumn& c) { return c.is_discrete(); });
}

std::vector<std::size_t> EncodedDataset::class_histogram() const {
  std::vector<std::size_t> counts(class_names_.size(), 0);
  for (Code label : labels_) ++counts[label];
  return counts;
}

EncodedDataset EncodedDataset::select_rows(std::span<const std::size_t> indices) const {
  EncodedDataset out;
  out.class_names_ = class_names_;
  out.labels_.reserve(indices.size());
  for (std::size_t i : indices) out.labels_.push_back(labels_[i]);
  out.columns_.reserve(columns_.size());
  for (const auto& column : columns_) {
    FeatureColumn copy{column.meta, {}, {}};
    if (column.is_discrete()) {
      copy.codes.reserve(indices.size());
      for (std::size_t i : indices) copy.codes.push_back(column.codes[i]);
    } else {
      copy.values.reserve(indices.size());
      for (std::size_t i : indices) copy.values.push_back(column.values[i]);
    }
    out.columns_.push_back(std::move(copy));
  }
  return out;
}

EncodedDataset EncodedDataset::select_features(std::span<const std::size_t> indices) const {
  EncodedDataset out;
  out.class_names_ = class_names_;
  out.labels_ = labels_;
  out.columns_.reserve(indices.size());
  for (std::size_t f : indices) {
    if (f >= columns_.size()) throw DataError("feature index out of range");
    out.columns_.push_back(columns_[f]);
  }
  return out;
}

EncodedDataset EncodedDataset::select_features(std::span<const std::string> names) const {
  std::vector<std::size_t> indices;
  indices.reserve(names.size());
  for (const auto& name : names) indices.push_back(feature_index(name));
  return select_features(indices);
}

void EncodedDataset::validate() const {
  const std::size_t n = labels_.size();
  for (Code label : labels_) {
    if (label >= class_names_.size()) throw InvariantError("label code out of range");
  }
  for (const auto& column : columns_) {
    const auto& meta = column.meta;
    if (column.is_discrete()) {
      if (column.codes.size() != n) {
        throw InvariantError("column '" + meta.name + "' has the wrong length");
      }
      if (meta.code_map.size() != meta.cardinality) {
        throw InvariantError("column '" + meta.name + "' code map does not match cardinality");
      }
      // code == cardinality is the reserved bucket for values unseen at fit time.
      for (Code code : column.codes) {
        if (code > meta.cardinality) {
          throw InvariantError("column '" + meta.name + "' has a code beyond its cardinality");
        }
      }
    } else if (column.values.size() != n) {
      throw InvariantError("column '" + meta.name + "' has the wrong length");
    }
  }
}

std::uint64_t fingerprint(std::span<const FeatureMeta> features) {
  std::uint64_t hash = fnv1a("eventcast-layout");
  for (const auto& meta : features) {
    hash = fnv1a(meta.name, hash);
    hash = fnv1a("\x1f", hash);
    hash = fnv1a(to_string(meta.kind), hash);
    hash = fnv1a(std::to_string(meta.cardinality), hash);
    hash = fnv1a("\x1e", hash);
  }
  return hash;
}

}  // namespace eventcast
