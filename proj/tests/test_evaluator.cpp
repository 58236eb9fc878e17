#include <doctest.h>

#include <set>

#include "eventcast/error.hpp"
#include "eventcast/evaluator.hpp"
#include "support.hpp"

using namespace eventcast;

namespace {

ConfusionMatrix matrix(std::size_t classes, std::vector<std::uint64_t> counts) {
  ConfusionMatrix cm;
  cm.classes = classes;
  cm.counts = std::move(counts);
  return cm;
}

EncodedDataset labelled(const std::vector<std::size_t>& counts) {
  std::vector<Code> x, y;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    for (std::size_t i = 0; i < counts[c]; ++i) {
      x.push_back(static_cast<Code>(x.size() % 5));
      y.push_back(static_cast<Code>(c));
    }
  }
  return support::make_dataset({x}, y, counts.size());
}

}  // namespace

TEST_CASE("confusion counts pairs") {
  const std::vector<Code> y{0, 1, 2, 1};
  const auto same = confusion(y, y, 3);
  CHECK(same.at(0, 0) == 1);
  CHECK(same.at(1, 1) == 2);
  CHECK(same.total() == 4);
  const std::vector<Code> t{0, 1}, p{1, 0};
  const auto anti = confusion(t, p, 2);
  CHECK(anti.counts == std::vector<std::uint64_t>{0, 1, 1, 0});
  CHECK_THROWS_AS(confusion(t, y, 3), std::invalid_argument);
  CHECK_THROWS_AS(confusion(t, p, 1), std::invalid_argument);
}

TEST_CASE("two-class metrics by formula") {
  const auto report = metrics(matrix(2, {50, 10, 5, 35}));
  CHECK(report.accuracy == doctest::Approx(0.85));
  CHECK(report.per_class[0].precision == doctest::Approx(50.0 / 55.0));
  CHECK(report.per_class[0].recall == doctest::Approx(50.0 / 60.0));
  CHECK(report.per_class[1].precision == doctest::Approx(35.0 / 45.0));
  const double f0 = 2 * (50.0 / 55) * (50.0 / 60) / (50.0 / 55 + 50.0 / 60);
  CHECK(report.per_class[0].f1 == doctest::Approx(f0));
  CHECK(report.per_class[0].support == 60);
  CHECK(report.macro_f1 == doctest::Approx((report.per_class[0].f1 + report.per_class[1].f1) / 2));
}

TEST_CASE("perfect predictions score one and empty classes score zero") {
  const auto perfect = metrics(matrix(2, {3, 0, 0, 4}));
  CHECK(perfect.accuracy == 1.0);
  CHECK(perfect.macro_f1 == 1.0);
  const auto missing = metrics(matrix(3, {3, 0, 0, 0, 4, 0, 0, 0, 0}));
  CHECK(missing.per_class[2].f1 == 0.0);
  CHECK(missing.macro_f1 == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(metrics(matrix(2, {0, 0, 0, 0})), std::invalid_argument);
}

TEST_CASE("metric invariances") {
  Rng rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t k = 2 + rng.below(4);
    std::vector<Code> t(300), p(300);
    for (auto& v : t) v = static_cast<Code>(rng.below(k));
    for (auto& v : p) v = static_cast<Code>(rng.below(k));
    const auto base = metrics(confusion(t, p, k));

    std::vector<Code> perm(k);
    for (std::size_t i = 0; i < k; ++i) perm[i] = static_cast<Code>(i);
    rng.shuffle(perm.begin(), perm.end());
    auto tp = t, pp = p;
    for (auto& v : tp) v = perm[v];
    for (auto& v : pp) v = perm[v];
    const auto permuted = metrics(confusion(tp, pp, k));
    CHECK(permuted.accuracy == doctest::Approx(base.accuracy));
    CHECK(permuted.macro_f1 == doctest::Approx(base.macro_f1));
    for (std::size_t c = 0; c < k; ++c) {
      CHECK(permuted.per_class[perm[c]].f1 == doctest::Approx(base.per_class[c].f1));
    }

    auto t2 = t, p2 = p;
    t2.insert(t2.end(), t.begin(), t.end());
    p2.insert(p2.end(), p.begin(), p.end());
    CHECK(metrics(confusion(t2, p2, k)).macro_f1 == doctest::Approx(base.macro_f1));
  }
}

TEST_CASE("stratified split preserves class proportions") {
  const auto ds = labelled({80, 20});
  const auto split = stratified_split(ds, 0.25, 5);
  CHECK(split.test.class_histogram() == std::vector<std::size_t>{20, 5});
  CHECK(split.train.class_histogram() == std::vector<std::size_t>{60, 15});
  std::set<std::size_t> all(split.train_rows.begin(), split.train_rows.end());
  for (auto r : split.test_rows) CHECK(all.insert(r).second);
  CHECK(all.size() == 100);
  CHECK(std::is_sorted(split.test_rows.begin(), split.test_rows.end()));

  const auto again = stratified_split(ds, 0.25, 5);
  CHECK(again.test_rows == split.test_rows);

  const auto pairs = stratified_split(labelled({2, 2}), 0.5, 1);
  CHECK(pairs.test.class_histogram() == std::vector<std::size_t>{1, 1});
  CHECK_THROWS_AS(stratified_split(labelled({5, 1}), 0.3, 1), DataError);
}

TEST_CASE("metric writers have stable headers") {
  auto cm = matrix(2, {5, 1, 2, 7});
  cm.class_names = {"a", "b"};
  auto report = metrics(cm);
  report.class_names = cm.class_names;
  const auto csv = metrics_csv(report);
  CHECK(csv.rfind("class,precision,recall,f1,support\n", 0) == 0);
  CHECK(csv.find("\nmacro,") != std::string::npos);
  CHECK(confusion_csv(cm).find("a,5,1") != std::string::npos);
  CHECK(metrics_json(report).find("\"accuracy\"") != std::string::npos);
}
