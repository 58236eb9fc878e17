#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "eventcast/dataset.hpp"
#include "eventcast/scores.hpp"

namespace eventcast {

enum class LearnerKind { kTree, kForest, kGbt, kNbayes };

std::string_view to_string(LearnerKind kind);
LearnerKind learner_kind_from_string(std::string_view text);

struct LearnerParams {
  LearnerKind learner = LearnerKind::kGbt;
  int max_depth = 6;
  // Boosting.
  int n_rounds = 100;
  double learning_rate = 0.3;
  double lambda = 1.0;
  // Minimum hessian sum (gbt) or row count (tree, forest) in each child.
  double min_child_weight = 1.0;
  // Forest.
  int n_trees = 100;
  int feature_subsample = 0;  // 0 = ceil(sqrt(n_features))
  bool bootstrap = true;
  // Naive Bayes Laplace smoothing.
  double alpha = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const LearnerParams&) const = default;
};

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  Code threshold = 0;         // code <= threshold goes left
  std::int32_t left = -1;
  std::int32_t right = -1;
  // Leaf payload: class distribution (CART) or a single additive score (gbt).
  std::vector<double> value;

  bool is_leaf() const { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

// Flat node array; node 0 is the root.
struct Tree {
  std::vector<TreeNode> nodes;

  const std::vector<double>& leaf(std::span<const Code> row) const;
  int depth() const;
  std::size_t split_count() const;
  bool operator==(const Tree&) const = default;
};

struct TreeModel {
  Tree tree;
  bool operator==(const TreeModel&) const = default;
};

struct ForestModel {
  std::vector<Tree> trees;
  bool operator==(const ForestModel&) const = default;
};

// Multiclass softmax boosting: rounds[r][k] is the class-k tree of round r.
struct GbtModel {
  std::vector<std::vector<Tree>> rounds;
  double learning_rate = 0.3;
  std::vector<double> base_score;  // log class priors
  // Mean training log-loss before round 1 and after every round.
  std::vector<double> train_loss;
  bool operator==(const GbtModel&) const = default;
};

struct NbayesModel {
  std::vector<double> log_prior;
  // Per feature, row-major [class][code] with one extra column per class for
  // the reserved unseen code.
  std::vector<std::vector<double>> log_likelihood;
  bool operator==(const NbayesModel&) const = default;
};

struct LearnerModel {
  LearnerParams params;
  std::vector<FeatureMeta> features;
  std::vector<std::string> class_names;
  // Unnormalized per-feature importance: total impurity decrease (tree,
  // forest) or total split gain (gbt). Empty for naive Bayes.
  std::vector<double> importance;
  std::variant<TreeModel, ForestModel, GbtModel, NbayesModel> body;

  LearnerKind kind() const { return params.learner; }
  std::size_t class_count() const { return class_names.size(); }
  bool operator==(const LearnerModel&) const = default;
};

// All trainers require a fully discrete dataset with >= 1 row and feature and
// >= 2 declared classes. `workers` parallelizes independent trees only; the
// result does not depend on it.
LearnerModel train_tree(const EncodedDataset& dataset, const LearnerParams& params);
LearnerModel train_forest(const EncodedDataset& dataset, const LearnerParams& params,
                          std::size_t workers = 1);
LearnerModel train_gbt(const EncodedDataset& dataset, const LearnerParams& params,
                       std::size_t workers = 1);
LearnerModel train_nbayes(const EncodedDataset& dataset, const LearnerParams& params);
// Dispatches on params.learner.
LearnerModel train(const EncodedDataset& dataset, const LearnerParams& params,
                   std::size_t workers = 1);

// Softmax gradient and diagonal hessian of the multiclass log-loss at
// `scores` for true class `label`: g_k = p_k - [k == label], h_k = p_k (1 - p_k).
void softmax_grad_hess(std::span<const double> scores, std::size_t label,
                       std::span<double> grad, std::span<double> hess);
// Numerically stable softmax (max subtracted).
void softmax(std::span<const double> scores, std::span<double> probs);
// -log p_label with the log floored at log(1e-12).
double multiclass_log_loss(std::span<const double> scores, std::size_t label);

// Class probabilities for one row; `out` has class_count() entries summing to 1.
void predict_proba_row(const LearnerModel& model, std::span<const Code> row,
                       std::span<double> out);
// Row-major rows x classes. The dataset layout must match the model's
// (feature count and fingerprint); throws DataError otherwise.
std::vector<double> predict_proba(const LearnerModel& model, const EncodedDataset& dataset);
std::vector<Code> predict(const LearnerModel& model, const EncodedDataset& dataset);
// Argmax with the lowest class code winning ties.
Code argmax(std::span<const double> values);

// Importances normalized to sum 1 (all zero when the model never split).
// Throws std::invalid_argument for naive Bayes.
FeatureScoreTable feature_importance(const LearnerModel& model);

// Checks a row against the model layout: length, and no code beyond the
// reserved unseen bucket. Throws DataError.
void check_row(const LearnerModel& model, std::span<const Code> row);

}  // namespace eventcast
