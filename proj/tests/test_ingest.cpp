#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "eventcast/error.hpp"
#include "eventcast/flow_ingest.hpp"

using namespace eventcast;

namespace {

DatasetSchema small_schema() {
  return DatasetSchema{"small",
                       {{"proto", ColumnKind::kCategorical},
                        {"bytes", ColumnKind::kNumeric},
                        {"count", ColumnKind::kOrdinal},
                        {"srcip", ColumnKind::kDrop},
                        {"label", ColumnKind::kLabel}},
                       {}};
}

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path.string();
}

}  // namespace

TEST_CASE("built-in schemas have the published feature counts") {
  const auto unsw = resolve_schema("unsw-nb15");
  CHECK(unsw.feature_count() == 43);  // 42 flow features plus the record id
  CHECK(unsw.label_classes.size() == 10);
  CHECK(resolve_schema("unsw-nb15-flow").feature_count() == 42);
  CHECK(resolve_schema("cicids-17").feature_count() == 78);
  CHECK(unsw.label().name == "attack_cat");
  CHECK(std::is_sorted(unsw.label_classes.begin(), unsw.label_classes.end()));
  CHECK_THROWS_AS(resolve_schema("nope"), ConfigError);
  CHECK_THROWS_AS(resolve_schema("infer"), ConfigError);
}

TEST_CASE("inferred schema classifies columns") {
  const auto path = write_temp("eventcast_infer.csv", "x,y\n1.5,a\n2,b\n");
  const auto schema = infer_schema(path, "y");
  CHECK(schema.feature_count() == 1);
  CHECK(schema.find("x")->kind == ColumnKind::kNumeric);
  CHECK(schema.label().name == "y");
  CHECK_THROWS_AS(infer_schema(path, "missing"), ConfigError);
}

TEST_CASE("well-formed rows parse and corrupt rows drop") {
  const std::string header = "proto,bytes,count,srcip,label\n";
  const auto ok = parse_csv(header + "tcp,10,1,1.1.1.1,a\nudp,0,2,1.1.1.2,b\ntcp,5.5,3,x,a\nicmp,1e3,1,y,b\n",
                            small_schema());
  CHECK(ok.row_count == 4);
  CHECK(ok.dropped_rows == 0);
  CHECK(ok.columns.size() == 4);  // srcip dropped

  const auto bad = parse_csv(header + "tcp,10,1,ip,a\nudp,oops,2,ip,b\ntcp,5,3,ip,a\nicmp,7,1,ip,b\n",
                             small_schema());
  CHECK(bad.row_count == 3);
  CHECK(bad.dropped_rows == 1);

  const auto negative = parse_csv(header + "tcp,-1,1,ip,a\ntcp,1,1,ip,a\nudp,2,1,ip,b\n", small_schema());
  CHECK(negative.dropped_rows == 1);
  const auto infinite = parse_csv(header + "tcp,inf,1,ip,a\ntcp,1,1,ip,a\nudp,2,1,ip,b\n", small_schema());
  CHECK(infinite.dropped_rows == 1);

  CHECK_THROWS_AS(parse_csv(header + "tcp,x,1,ip,a\nudp,y,1,ip,b\ntcp,1,1,ip,a\n", small_schema()),
                  DataError);
  CHECK_THROWS_AS(parse_csv("proto,bytes,label\ntcp,1,a\n", small_schema()), DataError);
  CHECK_THROWS_AS(load_csv("/nonexistent/file.csv", small_schema()), DataError);
}

TEST_CASE("header order is free and optional drop columns may be absent") {
  const auto t = parse_csv("label,count,bytes,proto\na,1,2,tcp\nb,2,3,udp\n", small_schema());
  CHECK(t.row_count == 2);
  CHECK(t.columns[0].spec.name == "proto");
}

TEST_CASE("categorical codes follow lexicographic order") {
  const auto t = parse_csv("proto,bytes,count,label\ntcp,1,5,a\nudp,2,3,b\ntcp,3,5,a\n", small_schema());
  const auto ds = ordinal_encode(t);
  REQUIRE(ds.feature_count() == 3);
  const auto& proto = ds.column(0);
  CHECK(proto.codes == std::vector<Code>{0, 1, 0});
  CHECK(proto.meta.code_map == std::vector<std::string>{"tcp", "udp"});
  CHECK(ds.meta(1).kind == FeatureKind::kPassthrough);
  CHECK(ds.column(2).codes == std::vector<Code>{1, 0, 1});
  CHECK(ds.class_names() == std::vector<std::string>{"a", "b"});
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    CHECK(decode(proto.meta, proto.codes[r]) == t.columns[0].text[r]);
  }
  CHECK(ordinal_encode(t) == ds);
}

TEST_CASE("a single label value is unlearnable") {
  const auto t = parse_csv("proto,bytes,count,label\ntcp,1,5,a\nudp,2,3,a\n", small_schema());
  CHECK_THROWS_AS(ordinal_encode(t), DataError);
}

TEST_CASE("applying a fitted encoding handles unseen values") {
  const auto fit = ordinal_encode(
      parse_csv("proto,bytes,count,label\ntcp,1,5,a\nudp,2,10,b\n", small_schema()));
  const auto other = parse_csv("proto,bytes,count,label\nsctp,1,7,a\ntcp,2,1,b\n", small_schema());
  const auto features = fit.feature_meta();
  const auto ds = apply_encoding(other, features, fit.class_names());
  CHECK(ds.column(0).codes == std::vector<Code>{2, 0});  // reserved bucket = cardinality
  CHECK(decode(ds.meta(0), 2) == "<unseen>");
  CHECK(ds.column(2).codes[0] == 0);  // 7 floors to 5
  CHECK(ds.has_reserved_codes());
  const auto unknown_label = parse_csv("proto,bytes,count,label\ntcp,1,5,z\n", small_schema());
  CHECK_THROWS_AS(apply_encoding(unknown_label, features, fit.class_names()), DataError);
}
