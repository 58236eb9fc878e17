#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "eventcast/error.hpp"
#include "eventcast/evaluator.hpp"
#include "eventcast/learners.hpp"
#include "eventcast/model_io.hpp"
#include "support.hpp"

using namespace eventcast;

namespace {

LearnerParams params_for(LearnerKind kind) {
  LearnerParams p;
  p.learner = kind;
  p.n_rounds = 20;
  p.n_trees = 15;
  return p;
}

EncodedDataset threshold_dataset() {
  std::vector<Code> x, y;
  for (Code v = 0; v < 10; ++v) {
    for (int rep = 0; rep < 3; ++rep) {
      x.push_back(v);
      y.push_back(v < 5 ? 0 : 1);
    }
  }
  return support::make_dataset({x}, y, 2);
}

// label = (a < 2) xor (b < 3) over a 4 x 6 grid. Cell weights are uneven so
// the root split has positive Gini gain.
EncodedDataset xor_dataset() {
  std::vector<Code> a, b, y;
  for (Code i = 0; i < 4; ++i) {
    for (Code j = 0; j < 6; ++j) {
      const int reps = (i < 2 ? 2 : 1) * (j < 3 ? 3 : 1);
      for (int rep = 0; rep < reps; ++rep) {
        a.push_back(i);
        b.push_back(j);
        y.push_back((i < 2) != (j < 3) ? 1 : 0);
      }
    }
  }
  return support::make_dataset({a, b}, y, 2);
}

double train_accuracy(const LearnerModel& model, const EncodedDataset& ds) {
  return evaluate(model, ds).accuracy;
}

}  // namespace

TEST_CASE("tree splits a threshold concept at depth one") {
  const auto ds = threshold_dataset();
  const auto model = train_tree(ds, params_for(LearnerKind::kTree));
  const auto& tree = std::get<TreeModel>(model.body).tree;
  CHECK(tree.depth() == 1);
  CHECK(tree.nodes[0].threshold == 4);
  CHECK(train_accuracy(model, ds) == 1.0);
  const auto importance = feature_importance(model);
  CHECK(importance[0].score == doctest::Approx(1.0));
}

TEST_CASE("tree solves the threshold xor at depth two") {
  const auto ds = xor_dataset();
  const auto model = train_tree(ds, params_for(LearnerKind::kTree));
  CHECK(std::get<TreeModel>(model.body).tree.depth() == 2);
  CHECK(predict(model, ds) == std::vector<Code>(ds.labels().begin(), ds.labels().end()));
}

TEST_CASE("constant labels give a single leaf") {
  const auto ds = support::make_dataset({{0, 1, 2, 3}}, {1, 1, 1, 1}, 2);
  const auto model = train_tree(ds, params_for(LearnerKind::kTree));
  CHECK(std::get<TreeModel>(model.body).tree.nodes.size() == 1);
  CHECK(predict(model, ds) == std::vector<Code>{1, 1, 1, 1});
  for (const auto& row : feature_importance(model)) CHECK(row.score == 0.0);
}

TEST_CASE("a one-tree forest without bootstrap matches the tree") {
  Rng rng(17);
  const auto ds = support::random_dataset(rng, 200, 4, 5, 3);
  auto p = params_for(LearnerKind::kForest);
  p.n_trees = 1;
  p.bootstrap = false;
  p.feature_subsample = 4;
  const auto forest = train_forest(ds, p);
  const auto tree = train_tree(ds, params_for(LearnerKind::kTree));
  CHECK(predict(forest, ds) == predict(tree, ds));
}

TEST_CASE("forest fits separable data and is deterministic") {
  const auto ds = xor_dataset();
  auto p = params_for(LearnerKind::kForest);
  p.n_trees = 25;
  p.feature_subsample = 2;
  p.bootstrap = false;
  const auto a = train_forest(ds, p, 1);
  const auto b = train_forest(ds, p, 4);
  CHECK(train_accuracy(a, ds) == 1.0);
  CHECK(bundle_to_json({a}) == bundle_to_json({b}));
}

TEST_CASE("softmax gradient and hessian match finite differences") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 2 + rng.below(5);
    std::vector<double> s(k);
    for (auto& v : s) v = -3.0 + 6.0 * rng.uniform();
    const std::size_t label = rng.below(k);
    std::vector<double> g(k), h(k);
    softmax_grad_hess(s, label, g, h);
    const double eps = 1e-5;
    for (std::size_t j = 0; j < k; ++j) {
      auto up = s, down = s;
      up[j] += eps;
      down[j] -= eps;
      const double fd_g =
          (multiclass_log_loss(up, label) - multiclass_log_loss(down, label)) / (2 * eps);
      std::vector<double> gu(k), gd(k), hu(k), hd(k);
      softmax_grad_hess(up, label, gu, hu);
      softmax_grad_hess(down, label, gd, hd);
      const double fd_h = (gu[j] - gd[j]) / (2 * eps);
      CHECK(std::abs(fd_g - g[j]) <= 1e-6 * std::abs(g[j]));
      CHECK(std::abs(fd_h - h[j]) <= 1e-6 * std::abs(h[j]));
    }
  }
}

TEST_CASE("gbt first leaf equals -G/H from the priors") {
  // x = 0 -> class 0 (1 row), x = 1 -> class 1 (3 rows); priors (1/4, 3/4).
  const auto ds = support::make_dataset({{0, 1, 1, 1}}, {0, 1, 1, 1}, 2);
  LearnerParams p = params_for(LearnerKind::kGbt);
  p.n_rounds = 1;
  p.lambda = 0.0;
  p.learning_rate = 1.0;
  p.min_child_weight = 0.0;
  p.max_depth = 1;
  const auto model = train_gbt(ds, p);
  const auto& gbt = std::get<GbtModel>(model.body);
  const std::vector<Code> right{1}, left{0};
  // class 1 on the pure right leaf: g = -1/4, h = 3/16 per row
  CHECK(gbt.rounds[0][1].leaf(right)[0] == doctest::Approx(4.0 / 3.0));
  // class 1 on the left leaf: g = 3/4, h = 3/16
  CHECK(gbt.rounds[0][1].leaf(left)[0] == doctest::Approx(-4.0));
  CHECK(gbt.base_score[0] == doctest::Approx(std::log(0.25)));
}

TEST_CASE("gbt with no rounds predicts the priors") {
  const auto ds = support::make_dataset({{0, 1, 2, 3, 0}}, {0, 1, 1, 1, 2}, 3);
  LearnerParams p = params_for(LearnerKind::kGbt);
  p.n_rounds = 0;
  const auto model = train_gbt(ds, p);
  std::vector<double> proba(3);
  const std::vector<Code> row{2};
  predict_proba_row(model, row, proba);
  CHECK(proba[0] == doctest::Approx(0.2));
  CHECK(proba[1] == doctest::Approx(0.6));
  CHECK(proba[2] == doctest::Approx(0.2));
}

TEST_CASE("gbt training loss never increases") {
  Rng rng(23);
  for (int trial = 0; trial < 5; ++trial) {
    const auto ds = support::random_dataset(rng, 300, 5, 6, 4);
    LearnerParams p;
    p.n_rounds = 30;
    const auto model = train_gbt(ds, p, 2);
    const auto& loss = std::get<GbtModel>(model.body).train_loss;
    REQUIRE(loss.size() == 31);
    for (std::size_t r = 1; r < loss.size(); ++r) CHECK(loss[r] <= loss[r - 1] + 1e-12);
  }
}

TEST_CASE("gbt is independent of the worker count") {
  Rng rng(29);
  const auto ds = support::random_dataset(rng, 400, 6, 5, 5);
  LearnerParams p;
  p.n_rounds = 10;
  CHECK(train_gbt(ds, p, 1) == train_gbt(ds, p, 5));
}

TEST_CASE("naive Bayes worked example") {
  // x: (0, c0), (0, c0), (1, c1); alpha 1, two codes.
  const auto ds = support::make_dataset({{0, 0, 1}}, {0, 0, 1}, 2);
  LearnerParams p = params_for(LearnerKind::kNbayes);
  const auto model = train_nbayes(ds, p);
  std::vector<double> proba(2);
  const std::vector<Code> row{0};
  predict_proba_row(model, row, proba);
  // joint c0 = 2/3 * 3/4, c1 = 1/3 * 1/3
  CHECK(proba[0] == doctest::Approx(9.0 / 11.0));
  CHECK_THROWS_AS(feature_importance(model), std::invalid_argument);
}

TEST_CASE("naive Bayes fits a perfectly correlated feature and breaks ties low") {
  const auto ds = support::make_dataset({{0, 1, 2, 0, 1, 2}}, {0, 1, 2, 0, 1, 2}, 3);
  LearnerParams p = params_for(LearnerKind::kNbayes);
  p.alpha = 1e-9;
  CHECK(train_accuracy(train_nbayes(ds, p), ds) == 1.0);

  const auto uniform = support::make_dataset({{0, 0, 0, 0}}, {0, 1, 0, 1}, 2);
  CHECK(predict(train_nbayes(uniform, params_for(LearnerKind::kNbayes)), uniform) ==
        std::vector<Code>{0, 0, 0, 0});
}

TEST_CASE("probabilities are normalized for every learner") {
  Rng rng(31);
  const auto ds = support::random_dataset(rng, 150, 4, 4, 3);
  for (auto kind : {LearnerKind::kTree, LearnerKind::kForest, LearnerKind::kGbt,
                    LearnerKind::kNbayes}) {
    const auto model = train(ds, params_for(kind));
    const auto proba = predict_proba(model, ds);
    for (std::size_t r = 0; r < ds.rows(); ++r) {
      double sum = 0.0;
      for (std::size_t c = 0; c < 3; ++c) {
        CHECK(proba[r * 3 + c] >= 0.0);
        sum += proba[r * 3 + c];
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
    CHECK(predict(model, ds) == predict(model, ds));
  }
}

TEST_CASE("argmax ties go to the lowest class") {
  const std::vector<double> v{0.2, 0.4, 0.4};
  CHECK(argmax(v) == 1);
}

TEST_CASE("layout mismatches are rejected") {
  const auto ds = xor_dataset();
  const auto model = train_tree(ds, params_for(LearnerKind::kTree));
  const auto narrow = ds.select_features(std::vector<std::size_t>{0});
  CHECK_THROWS_AS(predict(model, narrow), DataError);
  const std::vector<Code> bad{99, 0};
  CHECK_THROWS_AS(check_row(model, bad), DataError);
  const std::vector<Code> reserved{4, 0};
  CHECK_NOTHROW(check_row(model, reserved));
}

TEST_CASE("untrainable inputs are rejected") {
  const auto one_class = support::make_dataset({{0, 1}}, {0, 0}, 1);
  CHECK_THROWS(train_tree(one_class, params_for(LearnerKind::kTree)));
  EncodedDataset raw({support::passthrough_column("x", {1.0, 2.0})}, {0, 1}, support::class_names(2));
  CHECK_THROWS(train_gbt(raw, params_for(LearnerKind::kGbt)));
  LearnerParams bad;
  bad.learning_rate = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("models round-trip through the bundle format") {
  Rng rng(37);
  const auto ds = support::random_dataset(rng, 300, 5, 6, 4);
  const auto rows = support::random_dataset(rng, 1000, 5, 6, 4);
  const auto dir = std::filesystem::temp_directory_path();
  for (auto kind : {LearnerKind::kTree, LearnerKind::kForest, LearnerKind::kGbt,
                    LearnerKind::kNbayes}) {
    const auto model = train(ds, params_for(kind));
    const auto path = (dir / ("eventcast_model_" + std::string(to_string(kind)) + ".json")).string();
    save_model(model, path);
    const auto loaded = load_model(path);
    CHECK(loaded == model);
    CHECK(predict_proba(loaded, rows) == predict_proba(model, rows));

    std::ifstream in(path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(text.find("\"format_version\"") != std::string::npos);
    CHECK(text.find("\"learner\": \"" + std::string(to_string(kind)) + "\"") != std::string::npos);
    CHECK(text.find("\"n_features\": 5") != std::string::npos);
    CHECK_THROWS_AS(bundle_from_json(text.substr(0, text.size() / 2)), DataError);
  }
  CHECK_THROWS_AS(load_model((dir / "eventcast_missing_model.json").string()), DataError);
}

TEST_CASE("bundles reject other format versions") {
  const auto ds = xor_dataset();
  auto text = bundle_to_json({train_tree(ds, params_for(LearnerKind::kTree))});
  const auto pos = text.find("\"format_version\": 1");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 19, "\"format_version\": 9");
  CHECK_THROWS_AS(bundle_from_json(text), DataError);
}
