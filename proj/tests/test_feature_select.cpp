#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "eventcast/evaluator.hpp"
#include "eventcast/feature_select.hpp"
#include "eventcast/scores.hpp"
#include "support.hpp"

using namespace eventcast;

namespace {

// Loop-based frequency chi-squared, written independently of the library.
std::vector<double> chi2_oracle(const EncodedDataset& ds) {
  std::vector<double> out;
  const std::size_t classes = ds.class_count();
  for (std::size_t f = 0; f < ds.feature_count(); ++f) {
    double chi2 = 0.0;
    double grand = 0.0;
    for (std::size_t r = 0; r < ds.rows(); ++r) grand += ds.code(r, f);
    for (std::size_t c = 0; c < classes; ++c) {
      double observed = 0.0;
      double members = 0.0;
      for (std::size_t r = 0; r < ds.rows(); ++r) {
        if (ds.labels()[r] != c) continue;
        observed += ds.code(r, f);
        members += 1.0;
      }
      const double expected = members / static_cast<double>(ds.rows()) * grand;
      if (expected > 0) chi2 += (observed - expected) * (observed - expected) / expected;
    }
    out.push_back(chi2);
  }
  return out;
}

}  // namespace

TEST_CASE("chi-squared examples") {
  const auto flat = support::make_dataset({{1, 1, 1, 1}}, {0, 0, 1, 1}, 2);
  CHECK(chi2_scores(flat)[0].score == doctest::Approx(0.0));
  const auto skewed = support::make_dataset({{2, 2, 0, 0}}, {0, 0, 1, 1}, 2);
  CHECK(chi2_scores(skewed)[0].score == doctest::Approx(4.0));
  const auto zero = support::make_dataset({{0, 0, 0, 0}, {1, 0, 1, 0}}, {0, 0, 1, 1}, 2);
  const auto table = chi2_scores(zero);
  CHECK(table[0].score == 0.0);
  CHECK(table[0].degenerate);
  CHECK_FALSE(table[1].degenerate);
}

TEST_CASE("chi-squared matches the loop oracle on random data") {
  Rng rng(53);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t classes = 2 + rng.below(5);
    const auto ds = support::random_dataset(rng, 50, 5, 1 + static_cast<Code>(rng.below(9)), classes);
    const auto table = chi2_scores(ds);
    const auto oracle = chi2_oracle(ds);
    for (std::size_t f = 0; f < 5; ++f) {
      CHECK(table[f].score == doctest::Approx(oracle[f]).epsilon(1e-12));
    }
  }
}

TEST_CASE("contingency chi-squared by hand") {
  // 2x2 table [[2,0],[0,2]]: expected 1 everywhere, chi2 = 4.
  const auto ds = support::make_dataset({{0, 0, 1, 1}}, {0, 0, 1, 1}, 2);
  CHECK(chi2_scores(ds, Chi2Variant::kContingency)[0].score == doctest::Approx(4.0));
}

TEST_CASE("chi-squared ranks survive permutation and duplication") {
  Rng rng(59);
  const auto ds = support::random_dataset(rng, 120, 6, 7, 3);
  const auto base = chi2_scores(ds);
  std::vector<std::size_t> order(ds.rows());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order.begin(), order.end());
  const auto permuted = chi2_scores(ds.select_rows(order));
  std::vector<std::size_t> twice(order);
  twice.insert(twice.end(), order.begin(), order.end());
  const auto doubled = chi2_scores(ds.select_rows(twice));
  for (std::size_t f = 0; f < 6; ++f) {
    CHECK(permuted[f].score == doctest::Approx(base[f].score));
    CHECK(doubled[f].rank == base[f].rank);
    CHECK(doubled[f].score == doctest::Approx(2 * base[f].score));
  }
}

TEST_CASE("score scaling maps into [0.1, 0.9]") {
  const std::vector<double> s{24769.75, 11391.53, 120.31, 67280.06};
  const auto scaled = scale_scores(s);
  CHECK(scaled[0] == doctest::Approx(0.394).epsilon(0.005));
  CHECK(std::abs(scaled[0] - 0.394) < 0.0005);
  CHECK(std::abs(scaled[1] - 0.234) < 0.0005);
  CHECK(scaled[2] == 0.1);
  CHECK(scaled[3] == 0.9);
  const std::vector<double> same{3.0, 3.0};
  CHECK(scale_scores(same) == std::vector<double>{0.5, 0.5});
}

TEST_CASE("score table ranks are a permutation consistent with scores") {
  const std::vector<std::string> names{"a", "b", "c", "d"};
  const std::vector<double> s{1.0, 5.0, 5.0, 0.5};
  const auto table = make_score_table(names, s);
  CHECK(table[1].rank == 1);
  CHECK(table[2].rank == 2);
  CHECK(table[0].rank == 3);
  CHECK(table[3].rank == 4);
  CHECK(score_table_csv(table).rfind("feature,score,scaled,rank\n", 0) == 0);
}

TEST_CASE("k-best selections nest and keep column order") {
  Rng rng(61);
  const auto ds = support::random_dataset(rng, 200, 8, 6, 3);
  const auto table = chi2_scores(ds);
  for (std::size_t k = 1; k < 8; ++k) {
    const auto small = k_best_indices(table, k);
    const auto large = k_best_indices(table, k + 1);
    CHECK(std::is_sorted(small.begin(), small.end()));
    CHECK(std::includes(large.begin(), large.end(), small.begin(), small.end()));
  }
  CHECK(select_k_best(ds, 8) == ds);
  const auto best = select_k_best(ds, 1);
  CHECK(best.meta(0).name == table[rank_order(std::vector<double>{
                                [&] {
                                  std::vector<double> v;
                                  for (auto& r : table) v.push_back(r.score);
                                  return v;
                                }()})[0]]
                                .feature);
  CHECK_THROWS_AS(k_best_indices(table, 0), std::invalid_argument);
  CHECK_THROWS_AS(k_best_indices(table, 9), std::invalid_argument);
}

TEST_CASE("k-best sweep rows match single evaluations and repeat exactly") {
  Rng rng(67);
  const auto train_set = support::random_dataset(rng, 200, 6, 5, 3);
  const auto test_set = support::random_dataset(rng, 80, 6, 5, 3);
  LearnerParams p;
  p.n_rounds = 5;
  const std::vector<std::size_t> ks{6};
  const auto rows = kbest_sweep(train_set, test_set, p, ks);
  REQUIRE(rows.size() == 1);
  const auto full = evaluate(train(train_set, p), test_set);
  CHECK(rows[0].accuracy == full.accuracy);
  CHECK(rows[0].f1 == full.macro_f1);
  const std::vector<std::size_t> many{2, 3, 4, 5};
  CHECK(kbest_sweep(train_set, test_set, p, many, 1) == kbest_sweep(train_set, test_set, p, many, 4));
  CHECK(sweep_csv(rows).rfind("k,accuracy,precision,recall,f1\n", 0) == 0);
}

TEST_CASE("RFE drops the uninformative feature first") {
  std::vector<Code> informative, constant, labels;
  for (Code i = 0; i < 40; ++i) {
    informative.push_back(i % 4);
    constant.push_back(0);
    labels.push_back(i % 4 < 2 ? 0 : 1);
  }
  const auto ds = support::make_dataset({constant, informative}, labels, 2);
  LearnerParams p;
  p.n_rounds = 3;
  const auto result = rfe_sweep(ds, ds, p, 1, 1);
  REQUIRE(result.elimination_order.size() == 2);
  CHECK(result.elimination_order[0] == "f0");
  CHECK(result.rows.size() == 2);
  CHECK(result.rows[0].k == 2);
  CHECK(result.rows[1].k == 1);
  CHECK(result.rows[1].accuracy == 1.0);
}

TEST_CASE("RFE elimination order is a permutation") {
  Rng rng(71);
  const auto ds = support::random_dataset(rng, 150, 9, 5, 3);
  LearnerParams p;
  p.n_rounds = 3;
  const auto result = rfe_sweep(ds, ds, p, 2, 5);
  auto names = result.elimination_order;
  std::sort(names.begin(), names.end());
  auto expected = ds.feature_names();
  std::sort(expected.begin(), expected.end());
  CHECK(names == expected);
  std::vector<std::size_t> ks;
  for (const auto& row : result.rows) ks.push_back(row.k);
  CHECK(ks == std::vector<std::size_t>{9, 7, 5});
  p.learner = LearnerKind::kNbayes;
  CHECK_THROWS_AS(rfe_sweep(ds, ds, p), std::invalid_argument);
}
