#include "eventcast/dataset_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "eventcast/error.hpp"
#include "json_io.hpp"

namespace eventcast {
namespace {

static_assert(std::endian::native == std::endian::little, "artifact format is little-endian");

constexpr char kMagic[4] = {'E', 'C', 'D', '1'};

template <typename T>
void put(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
void put_all(std::ostream& out, const std::vector<T>& values) {
  out.write(reinterpret_cast<const char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(T)));
}

template <typename T>
void get(std::istream& in, T& value, const std::string& path) {
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) {
    throw DataError("truncated dataset file '" + path + "'");
  }
}

template <typename T>
void get_all(std::istream& in, std::vector<T>& values, std::size_t n, const std::string& path) {
  values.resize(n);
  if (!in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(n * sizeof(T)))) {
    throw DataError("truncated dataset file '" + path + "'");
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text)) throw DataError("cannot write '" + path + "'");
}

}  // namespace

void write_dataset(const EncodedDataset& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path + "'");
  out.write(kMagic, sizeof kMagic);
  put<std::uint64_t>(out, dataset.rows());
  put<std::uint64_t>(out, dataset.feature_count());
  put<std::uint64_t>(out, dataset.class_count());
  for (const auto& column : dataset.columns()) {
    if (column.is_discrete()) {
      put_all(out, column.codes);
    } else {
      put_all(out, column.values);
    }
  }
  put_all(out, std::vector<Code>(dataset.labels().begin(), dataset.labels().end()));
  if (!out) throw DataError("cannot write '" + path + "'");

  nlohmann::ordered_json sidecar;
  sidecar["rows"] = dataset.rows();
  sidecar["class_names"] = dataset.class_names();
  sidecar["features"] = nlohmann::json(dataset.feature_meta());
  write_text(path + ".json", sidecar.dump(1) + "\n");
}

EncodedDataset read_dataset(const std::string& path) {
  std::ifstream sidecar_in(path + ".json", std::ios::binary);
  if (!sidecar_in) throw DataError("missing dataset sidecar '" + path + ".json'");
  std::vector<FeatureMeta> features;
  std::vector<std::string> class_names;
  std::uint64_t sidecar_rows = 0;
  try {
    const auto sidecar = nlohmann::json::parse(sidecar_in);
    features = sidecar.at("features").get<std::vector<FeatureMeta>>();
    class_names = sidecar.at("class_names").get<std::vector<std::string>>();
    sidecar_rows = sidecar.at("rows").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed dataset sidecar '" + path + ".json': " + e.what());
  }

  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("missing dataset file '" + path + "'");
  char magic[4];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw DataError("'" + path + "' is not an encoded dataset");
  }
  std::uint64_t rows = 0, feature_count = 0, classes = 0;
  get(in, rows, path);
  get(in, feature_count, path);
  get(in, classes, path);
  if (rows != sidecar_rows || feature_count != features.size() || classes != class_names.size()) {
    throw DataError("dataset '" + path + "' disagrees with its sidecar");
  }
  std::vector<FeatureColumn> columns;
  for (auto& meta : features) {
    FeatureColumn column{std::move(meta), {}, {}};
    if (column.is_discrete()) {
      get_all(in, column.codes, rows, path);
    } else {
      get_all(in, column.values, rows, path);
    }
    columns.push_back(std::move(column));
  }
  std::vector<Code> labels;
  get_all(in, labels, rows, path);
  if (in.peek() != std::char_traits<char>::eof()) {
    throw DataError("trailing bytes in dataset file '" + path + "'");
  }
  try {
    return EncodedDataset(std::move(columns), std::move(labels), std::move(class_names));
  } catch (const InvariantError& e) {
    throw DataError("dataset '" + path + "' is inconsistent: " + e.what());
  }
}

}  // namespace eventcast
