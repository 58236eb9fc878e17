#include <algorithm>
#include <cmath>
#include <numeric>

#include "eventcast/learners.hpp"
#include "eventcast/parallel.hpp"
#include "eventcast/rng.hpp"
#include "learner_internal.hpp"

namespace eventcast {
namespace {

// Splits smaller than this (in rows) are treated as no improvement.
constexpr double kMinImpurityDecrease = 1e-9;

class CartBuilder {
 public:
  CartBuilder(const EncodedDataset& data, const LearnerParams& params, Rng* rng,
              std::size_t features_per_split)
      : columns_(data),
        labels_(data.labels()),
        classes_(data.class_count()),
        params_(params),
        rng_(rng),
        features_per_split_(features_per_split),
        importance_(data.feature_count(), 0.0) {}

  Tree build(std::vector<std::size_t> rows) {
    rows_ = std::move(rows);
    tree_ = {};
    grow(0, rows_.size(), 0);
    return std::move(tree_);
  }

  const std::vector<double>& importance() const { return importance_; }

 private:
  struct Split {
    std::size_t feature = 0;
    Code threshold = 0;
    double decrease = 0.0;
  };

  // Sum of squared class counts divided by the row count; the weighted Gini
  // impurity of a node is n - this.
  static double purity(std::span<const double> counts, double n) {
    double squares = 0.0;
    for (double c : counts) squares += c * c;
    return squares / n;
  }

  std::vector<std::size_t> candidate_features() {
    const std::size_t total = columns_.codes.size();
    std::vector<std::size_t> features(total);
    std::iota(features.begin(), features.end(), 0);
    if (rng_ == nullptr || features_per_split_ >= total) return features;
    for (std::size_t i = 0; i < features_per_split_; ++i) {
      const auto j = i + rng_->below(total - i);
      std::swap(features[i], features[j]);
    }
    features.resize(features_per_split_);
    std::sort(features.begin(), features.end());
    return features;
  }

  bool find_split(std::size_t begin, std::size_t end, std::span<const double> parent,
                  Split& best) {
    const double n = static_cast<double>(end - begin);
    const double base = purity(parent, n);
    const double min_child = std::max(params_.min_child_weight, 1.0);
    bool found = false;
    std::vector<double> left(classes_);
    std::vector<double> right(classes_);

    for (std::size_t f : candidate_features()) {
      const std::size_t bins = columns_.bins[f];
      hist_.assign(bins * classes_, 0.0);
      const auto codes = columns_.codes[f];
      for (std::size_t i = begin; i < end; ++i) {
        const auto row = rows_[i];
        hist_[codes[row] * classes_ + labels_[row]] += 1.0;
      }
      std::fill(left.begin(), left.end(), 0.0);
      double n_left = 0.0;
      for (std::size_t t = 0; t + 1 < bins; ++t) {
        double moved = 0.0;
        for (std::size_t c = 0; c < classes_; ++c) {
          left[c] += hist_[t * classes_ + c];
          moved += hist_[t * classes_ + c];
        }
        if (moved == 0.0) continue;  // same partition as the previous threshold
        n_left += moved;
        const double n_right = n - n_left;
        if (n_left < min_child) continue;
        if (n_right < min_child) break;
        for (std::size_t c = 0; c < classes_; ++c) right[c] = parent[c] - left[c];
        const double decrease = purity(left, n_left) + purity(right, n_right) - base;
        if (decrease > kMinImpurityDecrease && (!found || decrease > best.decrease)) {
          best = {f, static_cast<Code>(t), decrease};
          found = true;
        }
      }
    }
    return found;
  }

  std::int32_t grow(std::size_t begin, std::size_t end, int depth) {
    const auto index = static_cast<std::int32_t>(tree_.nodes.size());
    tree_.nodes.emplace_back();

    std::vector<double> counts(classes_, 0.0);
    for (std::size_t i = begin; i < end; ++i) counts[labels_[rows_[i]]] += 1.0;
    const double n = static_cast<double>(end - begin);
    const bool pure = std::count_if(counts.begin(), counts.end(),
                                    [](double c) { return c > 0.0; }) <= 1;

    Split split;
    if (depth < params_.max_depth && !pure && find_split(begin, end, counts, split)) {
      const auto codes = columns_.codes[split.feature];
      const auto middle = std::stable_partition(
          rows_.begin() + static_cast<std::ptrdiff_t>(begin),
          rows_.begin() + static_cast<std::ptrdiff_t>(end),
          [&](std::size_t row) { return codes[row] <= split.threshold; });
      const auto mid = static_cast<std::size_t>(middle - rows_.begin());
      importance_[split.feature] += split.decrease;
      const auto left = grow(begin, mid, depth + 1);
      const auto right = grow(mid, end, depth + 1);
      auto& node = tree_.nodes[static_cast<std::size_t>(index)];
      node.feature = static_cast<std::int32_t>(split.feature);
      node.threshold = split.threshold;
      node.left = left;
      node.right = right;
      return index;
    }

    auto& node = tree_.nodes[static_cast<std::size_t>(index)];
    node.value.resize(classes_);
    for (std::size_t c = 0; c < classes_; ++c) node.value[c] = n > 0 ? counts[c] / n : 0.0;
    return index;
  }

  detail::ColumnView columns_;
  std::span<const Code> labels_;
  std::size_t classes_;
  const LearnerParams& params_;
  Rng* rng_;
  std::size_t features_per_split_;
  std::vector<double> importance_;
  std::vector<std::size_t> rows_;
  std::vector<double> hist_;
  Tree tree_;
};

}  // namespace

LearnerModel train_tree(const EncodedDataset& dataset, const LearnerParams& params) {
  detail::check_trainable(dataset, params);
  LearnerModel model = detail::make_model(dataset, params);
  model.params.learner = LearnerKind::kTree;

  CartBuilder builder(dataset, params, nullptr, dataset.feature_count());
  std::vector<std::size_t> rows(dataset.rows());
  std::iota(rows.begin(), rows.end(), 0);
  model.body = TreeModel{builder.build(std::move(rows))};
  model.importance = builder.importance();
  return model;
}

LearnerModel train_forest(const EncodedDataset& dataset, const LearnerParams& params,
                          std::size_t workers) {
  detail::check_trainable(dataset, params);
  LearnerModel model = detail::make_model(dataset, params);
  model.params.learner = LearnerKind::kForest;

  const std::size_t features = dataset.feature_count();
  const std::size_t per_split =
      params.feature_subsample > 0
          ? std::min<std::size_t>(static_cast<std::size_t>(params.feature_subsample), features)
          : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(features))));
  const auto n_trees = static_cast<std::size_t>(params.n_trees);

  std::vector<Tree> trees(n_trees);
  std::vector<std::vector<double>> importances(n_trees);
  parallel_for(n_trees, workers, [&](std::size_t t) {
    Rng rng(derive_seed(params.seed, t));
    std::vector<std::size_t> rows(dataset.rows());
    if (params.bootstrap) {
      for (auto& row : rows) row = rng.below(dataset.rows());
      std::sort(rows.begin(), rows.end());
    } else {
      std::iota(rows.begin(), rows.end(), 0);
    }
    CartBuilder builder(dataset, params, &rng, per_split);
    trees[t] = builder.build(std::move(rows));
    importances[t] = builder.importance();
  });

  model.importance.assign(features, 0.0);
  for (const auto& importance : importances) {
    for (std::size_t f = 0; f < features; ++f) model.importance[f] += importance[f];
  }
  model.body = ForestModel{std::move(trees)};
  return model;
}

}  // namespace eventcast
