#include "eventcast/flow_ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>

#include "eventcast/csv.hpp"
#include "eventcast/error.hpp"
#include "eventcast/format.hpp"

namespace eventcast {
namespace {

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t");
  return text.substr(first, last - first + 1);
}

std::optional<double> parse_number(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) return std::nullopt;
  return value;
}

// Header names with surrounding blanks removed; repeated names get ".1",
// ".2", ... suffixes the way most dataframe readers do.
std::vector<std::string> normalize_header(const std::vector<std::string>& raw) {
  std::vector<std::string> names;
  std::map<std::string, int, std::less<>> seen;
  for (const auto& field : raw) {
    std::string name(trim(field));
    const int count = seen[name]++;
    if (count > 0) name += "." + std::to_string(count);
    names.push_back(std::move(name));
  }
  return names;
}

DatasetSchema make_schema(std::string name, std::vector<ColumnSpec> columns,
                          std::vector<std::string> classes = {}) {
  DatasetSchema schema{std::move(name), std::move(columns), std::move(classes)};
  schema.validate();
  return schema;
}

DatasetSchema unsw_schema(bool keep_id) {
  using K = ColumnKind;
  std::vector<ColumnSpec> columns = {
      {"id", keep_id ? K::kNumeric : K::kDrop},
      {"dur", K::kNumeric},
      {"proto", K::kCategorical},
      {"service", K::kCategorical},
      {"state", K::kCategorical},
      {"spkts", K::kOrdinal},
      {"dpkts", K::kOrdinal},
      {"sbytes", K::kNumeric},
      {"dbytes", K::kNumeric},
      {"rate", K::kNumeric},
      {"sttl", K::kOrdinal},
      {"dttl", K::kOrdinal},
      {"sload", K::kNumeric},
      {"dload", K::kNumeric},
      {"sloss", K::kOrdinal},
      {"dloss", K::kOrdinal},
      {"sinpkt", K::kNumeric},
      {"dinpkt", K::kNumeric},
      {"sjit", K::kNumeric},
      {"djit", K::kNumeric},
      {"swin", K::kOrdinal},
      {"stcpb", K::kNumeric},
      {"dtcpb", K::kNumeric},
      {"dwin", K::kOrdinal},
      {"tcprtt", K::kNumeric},
      {"synack", K::kNumeric},
      {"ackdat", K::kNumeric},
      {"smean", K::kOrdinal},
      {"dmean", K::kOrdinal},
      {"trans_depth", K::kOrdinal},
      {"response_body_len", K::kNumeric},
      {"ct_srv_src", K::kOrdinal},
      {"ct_state_ttl", K::kOrdinal},
      {"ct_dst_ltm", K::kOrdinal},
      {"ct_src_dport_ltm", K::kOrdinal},
      {"ct_dst_sport_ltm", K::kOrdinal},
      {"ct_dst_src_ltm", K::kOrdinal},
      {"is_ftp_login", K::kOrdinal},
      {"ct_ftp_cmd", K::kOrdinal},
      {"ct_flw_http_mthd", K::kOrdinal},
      {"ct_src_ltm", K::kOrdinal},
      {"ct_srv_dst", K::kOrdinal},
      {"is_sm_ips_ports", K::kOrdinal},
      {"attack_cat", K::kLabel},
      // Binary normal/attack flag: a restatement of the label.
      {"label", K::kDrop},
      // Address and port columns of the full (non train/test) CSV releases.
      {"srcip", K::kDrop},
      {"dstip", K::kDrop},
      {"sport", K::kDrop},
      {"dsport", K::kDrop},
  };
  return make_schema(keep_id ? "unsw-nb15" : "unsw-nb15-flow", std::move(columns),
                     {"Analysis", "Backdoor", "DoS", "Exploits", "Fuzzers", "Generic", "Normal",
                      "Reconnaissance", "Shellcode", "Worms"});
}

DatasetSchema cicids_schema() {
  using K = ColumnKind;
  const std::set<std::string, std::less<>> ordinal = {
      "Destination Port", "Fwd PSH Flags", "Bwd PSH Flags", "Fwd URG Flags", "Bwd URG Flags",
      "Fwd Header Length", "Bwd Header Length", "Fwd Header Length.1", "FIN Flag Count",
      "SYN Flag Count", "RST Flag Count", "PSH Flag Count", "ACK Flag Count", "URG Flag Count",
      "CWE Flag Count", "ECE Flag Count", "Down/Up Ratio", "Init_Win_bytes_forward",
      "Init_Win_bytes_backward", "act_data_pkt_fwd", "min_seg_size_forward"};
  const char* names[] = {
      "Destination Port", "Flow Duration", "Total Fwd Packets", "Total Backward Packets",
      "Total Length of Fwd Packets", "Total Length of Bwd Packets", "Fwd Packet Length Max",
      "Fwd Packet Length Min", "Fwd Packet Length Mean", "Fwd Packet Length Std",
      "Bwd Packet Length Max", "Bwd Packet Length Min", "Bwd Packet Length Mean",
      "Bwd Packet Length Std", "Flow Bytes/s", "Flow Packets/s", "Flow IAT Mean", "Flow IAT Std",
      "Flow IAT Max", "Flow IAT Min", "Fwd IAT Total", "Fwd IAT Mean", "Fwd IAT Std",
      "Fwd IAT Max", "Fwd IAT Min", "Bwd IAT Total", "Bwd IAT Mean", "Bwd IAT Std",
      "Bwd IAT Max", "Bwd IAT Min", "Fwd PSH Flags", "Bwd PSH Flags", "Fwd URG Flags",
      "Bwd URG Flags", "Fwd Header Length", "Bwd Header Length", "Fwd Packets/s",
      "Bwd Packets/s", "Min Packet Length", "Max Packet Length", "Packet Length Mean",
      "Packet Length Std", "Packet Length Variance", "FIN Flag Count", "SYN Flag Count",
      "RST Flag Count", "PSH Flag Count", "ACK Flag Count", "URG Flag Count", "CWE Flag Count",
      "ECE Flag Count", "Down/Up Ratio", "Average Packet Size", "Avg Fwd Segment Size",
      "Avg Bwd Segment Size", "Fwd Header Length.1", "Fwd Avg Bytes/Bulk",
      "Fwd Avg Packets/Bulk", "Fwd Avg Bulk Rate", "Bwd Avg Bytes/Bulk", "Bwd Avg Packets/Bulk",
      "Bwd Avg Bulk Rate", "Subflow Fwd Packets", "Subflow Fwd Bytes", "Subflow Bwd Packets",
      "Subflow Bwd Bytes", "Init_Win_bytes_forward", "Init_Win_bytes_backward",
      "act_data_pkt_fwd", "min_seg_size_forward", "Active Mean", "Active Std", "Active Max",
      "Active Min", "Idle Mean", "Idle Std", "Idle Max", "Idle Min"};
  std::vector<ColumnSpec> columns;
  for (const char* name : names) {
    columns.push_back({name, ordinal.contains(name) ? K::kOrdinal : K::kNumeric});
  }
  columns.push_back({"Label", K::kLabel});
  // Identity columns of the "TrafficLabelling" release.
  for (const char* name : {"Flow ID", "Source IP", "Source Port", "Destination IP", "Protocol",
                           "Timestamp"}) {
    columns.push_back({name, K::kDrop});
  }
  return make_schema("cicids-17", std::move(columns));
}

}  // namespace

std::string_view to_string(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::kCategorical: return "categorical";
    case ColumnKind::kNumeric: return "numeric";
    case ColumnKind::kOrdinal: return "ordinal";
    case ColumnKind::kLabel: return "label";
    case ColumnKind::kDrop: return "drop";
  }
  return "?";
}

ColumnKind column_kind_from_string(std::string_view text) {
  for (auto kind : {ColumnKind::kCategorical, ColumnKind::kNumeric, ColumnKind::kOrdinal,
                    ColumnKind::kLabel, ColumnKind::kDrop}) {
    if (to_string(kind) == text) return kind;
  }
  throw ConfigError("unknown column kind '" + std::string(text) + "'");
}

void DatasetSchema::validate() const {
  std::set<std::string_view> names;
  std::size_t labels = 0;
  for (const auto& column : columns) {
    if (!names.insert(column.name).second) {
      throw ConfigError("schema '" + name + "' repeats column '" + column.name + "'");
    }
    if (column.kind == ColumnKind::kLabel) ++labels;
  }
  if (labels != 1) {
    throw ConfigError("schema '" + name + "' must have exactly one label column, has " +
                      std::to_string(labels));
  }
}

std::size_t DatasetSchema::feature_count() const {
  return static_cast<std::size_t>(std::count_if(columns.begin(), columns.end(), [](const auto& c) {
    return c.kind != ColumnKind::kLabel && c.kind != ColumnKind::kDrop;
  }));
}

const ColumnSpec* DatasetSchema::find(std::string_view column) const {
  for (const auto& spec : columns) {
    if (spec.name == column) return &spec;
  }
  return nullptr;
}

const ColumnSpec& DatasetSchema::label() const {
  for (const auto& spec : columns) {
    if (spec.kind == ColumnKind::kLabel) return spec;
  }
  throw ConfigError("schema '" + name + "' has no label column");
}

void DatasetSchema::drop_columns(std::span<const std::string> names) {
  for (const auto& drop : names) {
    auto it = std::find_if(columns.begin(), columns.end(),
                           [&](const ColumnSpec& c) { return c.name == drop; });
    if (it == columns.end()) {
      throw ConfigError("cannot drop '" + drop + "': not a column of schema '" + name + "'");
    }
    if (it->kind == ColumnKind::kLabel) throw ConfigError("cannot drop the label column");
    it->kind = ColumnKind::kDrop;
  }
}

DatasetSchema resolve_schema(std::string_view name) {
  if (name == "unsw-nb15") return unsw_schema(true);
  if (name == "unsw-nb15-flow") return unsw_schema(false);
  if (name == "cicids-17") return cicids_schema();
  if (name == "infer") {
    throw ConfigError("schema 'infer' needs a data file; use infer_schema");
  }
  throw ConfigError("unknown schema '" + std::string(name) + "'");
}

DatasetSchema infer_schema(const std::string& path, std::string_view label_column) {
  const std::string text = read_file(path);
  CsvReader reader(text);
  std::vector<std::string> fields;
  if (!reader.next(fields)) throw DataError(path + ": missing header");
  const auto header = normalize_header(fields);

  std::vector<bool> numeric(header.size(), true);
  while (reader.next(fields)) {
    if (fields.size() != header.size()) continue;
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (numeric[c] && !parse_number(fields[c])) numeric[c] = false;
    }
  }

  DatasetSchema schema;
  schema.name = "infer";
  bool has_label = false;
  for (std::size_t c = 0; c < header.size(); ++c) {
    ColumnKind kind = numeric[c] ? ColumnKind::kNumeric : ColumnKind::kCategorical;
    if (header[c] == label_column) {
      kind = ColumnKind::kLabel;
      has_label = true;
    }
    schema.columns.push_back({header[c], kind});
  }
  if (!has_label) {
    throw ConfigError(path + ": label column '" + std::string(label_column) + "' not found");
  }
  schema.validate();
  return schema;
}

const RawColumn& RawFlowTable::label_column() const {
  for (const auto& column : columns) {
    if (column.spec.kind == ColumnKind::kLabel) return column;
  }
  throw InvariantError("table has no label column");
}

RawFlowTable load_csv(const std::string& path, const DatasetSchema& schema) {
  return parse_csv(read_file(path), schema, path);
}

RawFlowTable parse_csv(std::string_view text, const DatasetSchema& schema,
                       std::string_view source) {
  schema.validate();
  const std::string where(source);
  CsvReader reader(text);
  std::vector<std::string> fields;
  if (!reader.next(fields)) throw DataError(where + ": missing header");
  const auto header = normalize_header(fields);

  // Schema column -> position in the file.
  std::vector<std::size_t> position(schema.columns.size(), header.size());
  for (std::size_t h = 0; h < header.size(); ++h) {
    const ColumnSpec* spec = schema.find(header[h]);
    if (spec == nullptr) {
      throw DataError(where + ": header column '" + header[h] + "' is not in schema '" +
                      schema.name + "'");
    }
    position[static_cast<std::size_t>(spec - schema.columns.data())] = h;
  }

  RawFlowTable table;
  table.schema = schema;
  std::vector<std::size_t> source_column;  // table column -> file position
  for (std::size_t s = 0; s < schema.columns.size(); ++s) {
    const auto& spec = schema.columns[s];
    if (position[s] == header.size()) {
      // Identity columns that only some releases carry may be absent.
      if (spec.kind == ColumnKind::kDrop) continue;
      throw DataError(where + ": column '" + spec.name + "' of schema '" + schema.name +
                      "' is missing from the header");
    }
    if (spec.kind == ColumnKind::kDrop) continue;
    table.columns.push_back(RawColumn{spec, {}, {}});
    source_column.push_back(position[s]);
  }

  const std::set<std::string, std::less<>> classes(schema.label_classes.begin(),
                                                   schema.label_classes.end());
  std::vector<std::string> texts(table.columns.size());
  std::vector<double> numbers(table.columns.size());
  std::size_t total = 0;
  while (reader.next(fields)) {
    ++total;
    bool ok = fields.size() == header.size();
    for (std::size_t c = 0; ok && c < table.columns.size(); ++c) {
      const std::string& cell = fields[source_column[c]];
      switch (table.columns[c].spec.kind) {
        case ColumnKind::kCategorical:
          texts[c] = std::string(trim(cell));
          break;
        case ColumnKind::kLabel:
          texts[c] = std::string(trim(cell));
          ok = !texts[c].empty() && (classes.empty() || classes.contains(texts[c]));
          break;
        case ColumnKind::kNumeric:
        case ColumnKind::kOrdinal: {
          const auto value = parse_number(cell);
          ok = value.has_value() &&
               (table.columns[c].spec.kind == ColumnKind::kOrdinal || *value >= 0.0);
          if (ok) numbers[c] = *value == 0.0 ? 0.0 : *value;  // folds -0
          break;
        }
        case ColumnKind::kDrop:
          break;
      }
    }
    if (!ok) {
      ++table.dropped_rows;
      continue;
    }
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      auto& column = table.columns[c];
      if (column.spec.kind == ColumnKind::kNumeric || column.spec.kind == ColumnKind::kOrdinal) {
        column.numbers.push_back(numbers[c]);
      } else {
        column.text.push_back(std::move(texts[c]));
      }
    }
    ++table.row_count;
  }

  if (total > 0 && table.dropped_rows * 2 > total) {
    throw DataError(where + ": " + std::to_string(table.dropped_rows) + " of " +
                    std::to_string(total) + " rows are corrupt; the file probably does not " +
                    "match schema '" + schema.name + "'");
  }
  return table;
}

namespace {

FeatureMeta fit_categorical(const RawColumn& column) {
  std::set<std::string_view> distinct(column.text.begin(), column.text.end());
  FeatureMeta meta{column.spec.name, FeatureKind::kCategorical, 0, {}};
  meta.code_map.assign(distinct.begin(), distinct.end());
  meta.cardinality = static_cast<Code>(meta.code_map.size());
  return meta;
}

FeatureMeta fit_ordinal(const RawColumn& column) {
  std::set<double> distinct(column.numbers.begin(), column.numbers.end());
  FeatureMeta meta{column.spec.name, FeatureKind::kOrdinal, 0, {}};
  for (double value : distinct) meta.code_map.push_back(format_double(value));
  meta.cardinality = static_cast<Code>(meta.code_map.size());
  return meta;
}

std::vector<double> ordinal_values(const FeatureMeta& meta) {
  std::vector<double> values;
  values.reserve(meta.code_map.size());
  for (const auto& text : meta.code_map) {
    const auto value = parse_number(text);
    if (!value) throw DataError("feature '" + meta.name + "' has a non-numeric ordinal code");
    values.push_back(*value);
  }
  return values;
}

FeatureColumn encode_column(const RawColumn& raw, const FeatureMeta& meta) {
  FeatureColumn column{meta, {}, {}};
  switch (meta.kind) {
    case FeatureKind::kCategorical: {
      std::unordered_map<std::string_view, Code> lookup;
      for (Code c = 0; c < meta.cardinality; ++c) lookup.emplace(meta.code_map[c], c);
      column.codes.reserve(raw.text.size());
      for (const auto& value : raw.text) {
        const auto it = lookup.find(value);
        column.codes.push_back(it == lookup.end() ? meta.cardinality : it->second);
      }
      break;
    }
    case FeatureKind::kOrdinal: {
      const auto values = ordinal_values(meta);
      column.codes.reserve(raw.numbers.size());
      for (double value : raw.numbers) {
        const auto it = std::upper_bound(values.begin(), values.end(), value);
        column.codes.push_back(
            it == values.begin() ? 0 : static_cast<Code>(it - values.begin() - 1));
      }
      break;
    }
    case FeatureKind::kPassthrough:
      column.values = raw.numbers;
      break;
    default:
      throw InvariantError("raw column '" + meta.name + "' cannot have kind " +
                           std::string(to_string(meta.kind)));
  }
  return column;
}

std::vector<Code> encode_labels(const RawColumn& labels,
                                std::span<const std::string> class_names) {
  std::unordered_map<std::string_view, Code> lookup;
  for (std::size_t c = 0; c < class_names.size(); ++c) {
    lookup.emplace(class_names[c], static_cast<Code>(c));
  }
  std::vector<Code> codes;
  codes.reserve(labels.text.size());
  for (const auto& value : labels.text) {
    const auto it = lookup.find(value);
    if (it == lookup.end()) throw DataError("label '" + value + "' is not a known class");
    codes.push_back(it->second);
  }
  return codes;
}

}  // namespace

EncodedDataset ordinal_encode(const RawFlowTable& table) {
  std::vector<FeatureMeta> features;
  for (const auto& column : table.columns) {
    switch (column.spec.kind) {
      case ColumnKind::kCategorical:
        features.push_back(fit_categorical(column));
        break;
      case ColumnKind::kOrdinal:
        features.push_back(fit_ordinal(column));
        break;
      case ColumnKind::kNumeric:
        features.push_back({column.spec.name, FeatureKind::kPassthrough, 0, {}});
        break;
      case ColumnKind::kLabel:
      case ColumnKind::kDrop:
        break;
    }
  }

  const auto& labels = table.label_column();
  const std::set<std::string_view> observed(labels.text.begin(), labels.text.end());
  if (observed.size() < 2) {
    throw DataError("label column '" + labels.spec.name + "' has " +
                    std::to_string(observed.size()) + " distinct value(s); need at least 2");
  }
  std::vector<std::string> class_names = table.schema.label_classes;
  if (class_names.empty()) class_names.assign(observed.begin(), observed.end());
  return apply_encoding(table, features, class_names);
}

EncodedDataset apply_encoding(const RawFlowTable& table, std::span<const FeatureMeta> features,
                              std::span<const std::string> class_names) {
  std::vector<FeatureColumn> columns;
  columns.reserve(features.size());
  for (const auto& meta : features) {
    const auto it = std::find_if(table.columns.begin(), table.columns.end(),
                                 [&](const RawColumn& c) { return c.spec.name == meta.name; });
    if (it == table.columns.end()) {
      throw DataError("input lacks fitted feature '" + meta.name + "'");
    }
    columns.push_back(encode_column(*it, meta));
  }
  auto labels = encode_labels(table.label_column(), class_names);
  return EncodedDataset(std::move(columns), std::move(labels),
                        std::vector<std::string>(class_names.begin(), class_names.end()));
}

std::string decode(const FeatureMeta& meta, Code code) {
  if (code < meta.cardinality) return meta.code_map[code];
  if (code == meta.cardinality) return "<unseen>";
  throw DataError("code " + std::to_string(code) + " is out of range for '" + meta.name + "'");
}

}  // namespace eventcast
