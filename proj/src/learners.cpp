#include "eventcast/learners.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "eventcast/error.hpp"
#include "learner_internal.hpp"

namespace eventcast {

std::string_view to_string(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::kTree: return "tree";
    case LearnerKind::kForest: return "forest";
    case LearnerKind::kGbt: return "gbt";
    case LearnerKind::kNbayes: return "nbayes";
  }
  return "?";
}

LearnerKind learner_kind_from_string(std::string_view text) {
  for (auto kind : {LearnerKind::kTree, LearnerKind::kForest, LearnerKind::kGbt,
                    LearnerKind::kNbayes}) {
    if (to_string(kind) == text) return kind;
  }
  throw ConfigError("unknown learner '" + std::string(text) + "'");
}

void LearnerParams::validate() const {
  if (max_depth < 0) throw ConfigError("learner.max_depth must be >= 0");
  if (n_rounds < 0) throw ConfigError("learner.n_rounds must be >= 0");
  if (!(learning_rate > 0.0)) throw ConfigError("learner.learning_rate must be > 0");
  if (!(lambda >= 0.0)) throw ConfigError("learner.lambda must be >= 0");
  if (!(min_child_weight >= 0.0)) throw ConfigError("learner.min_child_weight must be >= 0");
  if (n_trees < 1) throw ConfigError("learner.n_trees must be >= 1");
  if (feature_subsample < 0) throw ConfigError("learner.feature_subsample must be >= 0");
  if (!(alpha >= 0.0)) throw ConfigError("learner.alpha must be >= 0");
}

const std::vector<double>& Tree::leaf(std::span<const Code> row) const {
  std::size_t index = 0;
  while (!nodes[index].is_leaf()) {
    const auto& node = nodes[index];
    index = static_cast<std::size_t>(
        row[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right);
  }
  return nodes[index].value;
}

int Tree::depth() const {
  if (nodes.empty()) return 0;
  std::vector<int> depth(nodes.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    deepest = std::max(deepest, depth[i]);
    if (!nodes[i].is_leaf()) {
      depth[static_cast<std::size_t>(nodes[i].left)] = depth[i] + 1;
      depth[static_cast<std::size_t>(nodes[i].right)] = depth[i] + 1;
    }
  }
  return deepest;
}

std::size_t Tree::split_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return !n.is_leaf(); }));
}

namespace detail {

void check_trainable(const EncodedDataset& dataset, const LearnerParams& params) {
  params.validate();
  if (dataset.rows() == 0) throw DataError("cannot train on an empty dataset");
  if (dataset.feature_count() == 0) throw DataError("cannot train without features");
  if (dataset.class_count() < 2) throw DataError("training needs at least two classes");
  if (!dataset.all_discrete()) {
    throw DataError("training needs discrete features; run the discretizer first");
  }
}

ColumnView::ColumnView(const EncodedDataset& dataset) {
  for (const auto& column : dataset.columns()) {
    codes.emplace_back(column.codes);
    bins.push_back(static_cast<std::size_t>(column.meta.cardinality) + 1);
  }
}

LearnerModel make_model(const EncodedDataset& dataset, const LearnerParams& params) {
  LearnerModel model;
  model.params = params;
  model.features = dataset.feature_meta();
  model.class_names = dataset.class_names();
  model.importance.assign(dataset.feature_count(), 0.0);
  return model;
}

double safe_log(double x) { return std::log(std::max(x, 1e-12)); }

}  // namespace detail

LearnerModel train(const EncodedDataset& dataset, const LearnerParams& params,
                   std::size_t workers) {
  switch (params.learner) {
    case LearnerKind::kTree: return train_tree(dataset, params);
    case LearnerKind::kForest: return train_forest(dataset, params, workers);
    case LearnerKind::kGbt: return train_gbt(dataset, params, workers);
    case LearnerKind::kNbayes: return train_nbayes(dataset, params);
  }
  throw InvariantError("unhandled learner kind");
}

Code argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (values[k] > values[best]) best = k;
  }
  return static_cast<Code>(best);
}

void check_row(const LearnerModel& model, std::span<const Code> row) {
  if (row.size() != model.features.size()) {
    throw DataError("row has " + std::to_string(row.size()) + " features, model expects " +
                    std::to_string(model.features.size()));
  }
  for (std::size_t f = 0; f < row.size(); ++f) {
    if (row[f] > model.features[f].cardinality) {
      throw DataError("code " + std::to_string(row[f]) + " of feature '" +
                      model.features[f].name + "' is beyond the reserved unseen bucket");
    }
  }
}

namespace {

struct ProbaVisitor {
  std::span<const Code> row;
  std::span<double> out;

  void operator()(const TreeModel& m) const {
    const auto& leaf = m.tree.leaf(row);
    std::copy(leaf.begin(), leaf.end(), out.begin());
  }

  void operator()(const ForestModel& m) const {
    std::fill(out.begin(), out.end(), 0.0);
    for (const auto& tree : m.trees) out[argmax(tree.leaf(row))] += 1.0;
    for (double& p : out) p /= static_cast<double>(m.trees.size());
  }

  void operator()(const GbtModel& m) const {
    std::vector<double> scores = m.base_score;
    for (const auto& round : m.rounds) {
      for (std::size_t k = 0; k < round.size(); ++k) scores[k] += round[k].leaf(row)[0];
    }
    softmax(scores, out);
  }

  void operator()(const NbayesModel& m) const {
    const std::size_t classes = m.log_prior.size();
    std::vector<double> joint = m.log_prior;
    for (std::size_t f = 0; f < row.size(); ++f) {
      const auto& table = m.log_likelihood[f];
      const std::size_t width = table.size() / classes;
      for (std::size_t c = 0; c < classes; ++c) joint[c] += table[c * width + row[f]];
    }
    softmax(joint, out);
  }
};

void check_layout(const LearnerModel& model, const EncodedDataset& dataset) {
  if (dataset.feature_count() != model.features.size()) {
    throw DataError("dataset has " + std::to_string(dataset.feature_count()) +
                    " features, model expects " + std::to_string(model.features.size()));
  }
  const auto meta = dataset.feature_meta();
  if (fingerprint(meta) != fingerprint(model.features)) {
    throw DataError("dataset feature layout does not match the model's training layout");
  }
}

}  // namespace

void predict_proba_row(const LearnerModel& model, std::span<const Code> row,
                       std::span<double> out) {
  check_row(model, row);
  std::visit(ProbaVisitor{row, out.first(model.class_count())}, model.body);
}

std::vector<double> predict_proba(const LearnerModel& model, const EncodedDataset& dataset) {
  check_layout(model, dataset);
  const std::size_t classes = model.class_count();
  std::vector<double> out(dataset.rows() * classes);
  std::vector<Code> row;
  for (std::size_t i = 0; i < dataset.rows(); ++i) {
    dataset.gather_row(i, row);
    predict_proba_row(model, row, std::span<double>(out).subspan(i * classes, classes));
  }
  return out;
}

std::vector<Code> predict(const LearnerModel& model, const EncodedDataset& dataset) {
  const auto proba = predict_proba(model, dataset);
  const std::size_t classes = model.class_count();
  std::vector<Code> labels(dataset.rows());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    labels[i] = argmax(std::span<const double>(proba).subspan(i * classes, classes));
  }
  return labels;
}

FeatureScoreTable feature_importance(const LearnerModel& model) {
  if (model.kind() == LearnerKind::kNbayes) {
    throw std::invalid_argument("feature importance is defined for tree models only");
  }
  double total = 0.0;
  for (double v : model.importance) total += v;
  std::vector<double> normalized(model.importance.size(), 0.0);
  if (total > 0.0) {
    for (std::size_t f = 0; f < normalized.size(); ++f) normalized[f] = model.importance[f] / total;
  }
  std::vector<std::string> names;
  for (const auto& meta : model.features) names.push_back(meta.name);
  return make_score_table(names, normalized);
}

}  // namespace eventcast
