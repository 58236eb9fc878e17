#include <algorithm>
#include <cmath>
#include <numeric>

#include "eventcast/learners.hpp"
#include "eventcast/parallel.hpp"
#include "learner_internal.hpp"

namespace eventcast {
namespace {

// Gains below this are floating-point noise from histogram subtraction.
constexpr double kMinSplitGain = 1e-12;

// Grows one regression tree on (gradient, hessian) pairs with histogram
// split finding. Histograms hold (G, H, count) per bin; a child's histogram is
// built by scanning for the smaller side and by subtraction for the larger.
class BoostTreeBuilder {
 public:
  BoostTreeBuilder(const detail::ColumnView& columns, const LearnerParams& params)
      : columns_(columns), params_(params), offsets_(columns.bins.size() + 1, 0) {
    for (std::size_t f = 0; f < columns.bins.size(); ++f) {
      offsets_[f + 1] = offsets_[f] + columns.bins[f];
    }
    importance_.assign(columns.bins.size(), 0.0);
  }

  // Fills `delta[row]` with the (learning-rate scaled) leaf value of each row.
  Tree build(std::span<const double> grad, std::span<const double> hess,
             std::span<double> delta) {
    grad_ = grad;
    hess_ = hess;
    delta_ = delta;
    rows_.resize(grad.size());
    std::iota(rows_.begin(), rows_.end(), 0);
    tree_ = {};
    std::vector<double> hist(offsets_.back() * 3, 0.0);
    accumulate(0, rows_.size(), hist);
    double g = 0.0, h = 0.0;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      g += grad_[i];
      h += hess_[i];
    }
    grow(0, rows_.size(), 0, hist, g, h);
    return std::move(tree_);
  }

  const std::vector<double>& importance() const { return importance_; }

 private:
  struct Split {
    std::size_t feature = 0;
    Code threshold = 0;
    double gain = 0.0;
    double g_left = 0.0;
    double h_left = 0.0;
  };

  void accumulate(std::size_t begin, std::size_t end, std::vector<double>& hist) const {
    for (std::size_t f = 0; f < columns_.codes.size(); ++f) {
      const auto codes = columns_.codes[f];
      double* bins = hist.data() + offsets_[f] * 3;
      for (std::size_t i = begin; i < end; ++i) {
        const auto row = rows_[i];
        double* bin = bins + codes[row] * 3;
        bin[0] += grad_[row];
        bin[1] += hess_[row];
        bin[2] += 1.0;
      }
    }
  }

  double score(double g, double h) const {
    const double denom = h + params_.lambda;
    return denom > 0.0 ? g * g / denom : 0.0;
  }

  bool find_split(const std::vector<double>& hist, double g, double h, double n,
                  Split& best) const {
    const double parent = score(g, h);
    bool found = false;
    for (std::size_t f = 0; f < columns_.codes.size(); ++f) {
      const double* bins = hist.data() + offsets_[f] * 3;
      double gl = 0.0, hl = 0.0, nl = 0.0;
      for (std::size_t t = 0; t + 1 < columns_.bins[f]; ++t) {
        if (bins[t * 3 + 2] == 0.0) continue;
        gl += bins[t * 3];
        hl += bins[t * 3 + 1];
        nl += bins[t * 3 + 2];
        const double gr = g - gl, hr = h - hl, nr = n - nl;
        if (nr <= 0.0) break;
        if (hl < params_.min_child_weight || hr < params_.min_child_weight) continue;
        if (hl + params_.lambda <= 0.0 || hr + params_.lambda <= 0.0) continue;
        const double gain = 0.5 * (score(gl, hl) + score(gr, hr) - parent);
        if (gain > kMinSplitGain && (!found || gain > best.gain)) {
          best = {f, static_cast<Code>(t), gain, gl, hl};
          found = true;
        }
      }
    }
    return found;
  }

  void make_leaf(std::int32_t index, std::size_t begin, std::size_t end, double g, double h) {
    const double denom = h + params_.lambda;
    const double value = denom > 0.0 ? -g / denom * params_.learning_rate : 0.0;
    tree_.nodes[static_cast<std::size_t>(index)].value = {value};
    for (std::size_t i = begin; i < end; ++i) delta_[rows_[i]] = value;
  }

  void grow(std::size_t begin, std::size_t end, int depth, std::vector<double>& hist,
            double g, double h) {
    const auto index = static_cast<std::int32_t>(tree_.nodes.size());
    tree_.nodes.emplace_back();

    Split split;
    if (depth >= params_.max_depth ||
        !find_split(hist, g, h, static_cast<double>(end - begin), split)) {
      make_leaf(index, begin, end, g, h);
      return;
    }

    const auto codes = columns_.codes[split.feature];
    const auto middle = std::stable_partition(
        rows_.begin() + static_cast<std::ptrdiff_t>(begin),
        rows_.begin() + static_cast<std::ptrdiff_t>(end),
        [&](std::size_t row) { return codes[row] <= split.threshold; });
    const auto mid = static_cast<std::size_t>(middle - rows_.begin());
    importance_[split.feature] += split.gain;

    const bool left_smaller = mid - begin <= end - mid;
    std::vector<double> small(hist.size(), 0.0);
    if (left_smaller) {
      accumulate(begin, mid, small);
    } else {
      accumulate(mid, end, small);
    }
    for (std::size_t i = 0; i < hist.size(); ++i) hist[i] -= small[i];
    auto& left_hist = left_smaller ? small : hist;
    auto& right_hist = left_smaller ? hist : small;

    const double gl = split.g_left, hl = split.h_left;
    const auto left = static_cast<std::int32_t>(tree_.nodes.size());
    grow(begin, mid, depth + 1, left_hist, gl, hl);
    const auto right = static_cast<std::int32_t>(tree_.nodes.size());
    grow(mid, end, depth + 1, right_hist, g - gl, h - hl);

    auto& node = tree_.nodes[static_cast<std::size_t>(index)];
    node.feature = static_cast<std::int32_t>(split.feature);
    node.threshold = split.threshold;
    node.left = left;
    node.right = right;
  }

  const detail::ColumnView& columns_;
  const LearnerParams& params_;
  std::vector<std::size_t> offsets_;
  std::vector<double> importance_;
  std::span<const double> grad_;
  std::span<const double> hess_;
  std::span<double> delta_;
  std::vector<std::size_t> rows_;
  Tree tree_;
};

double mean_log_loss(std::span<const double> scores, std::span<const Code> labels,
                     std::size_t classes) {
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    total += multiclass_log_loss(scores.subspan(i * classes, classes), labels[i]);
  }
  return total / static_cast<double>(labels.size());
}

}  // namespace

void softmax(std::span<const double> scores, std::span<double> probs) {
  const double top = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (std::size_t k = 0; k < scores.size(); ++k) {
    probs[k] = std::exp(scores[k] - top);
    sum += probs[k];
  }
  for (std::size_t k = 0; k < scores.size(); ++k) probs[k] /= sum;
}

void softmax_grad_hess(std::span<const double> scores, std::size_t label,
                       std::span<double> grad, std::span<double> hess) {
  softmax(scores, grad);
  for (std::size_t k = 0; k < scores.size(); ++k) {
    const double p = grad[k];
    hess[k] = p * (1.0 - p);
    grad[k] = k == label ? p - 1.0 : p;
  }
}

double multiclass_log_loss(std::span<const double> scores, std::size_t label) {
  const double top = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (double s : scores) sum += std::exp(s - top);
  const double log_p = scores[label] - top - std::log(sum);
  return -std::max(log_p, std::log(1e-12));
}

LearnerModel train_gbt(const EncodedDataset& dataset, const LearnerParams& params,
                       std::size_t workers) {
  detail::check_trainable(dataset, params);
  LearnerModel model = detail::make_model(dataset, params);
  model.params.learner = LearnerKind::kGbt;

  const std::size_t n = dataset.rows();
  const std::size_t classes = dataset.class_count();
  const auto labels = dataset.labels();
  const auto histogram = dataset.class_histogram();

  GbtModel gbt;
  gbt.learning_rate = params.learning_rate;
  for (std::size_t k = 0; k < classes; ++k) {
    gbt.base_score.push_back(
        detail::safe_log(static_cast<double>(histogram[k]) / static_cast<double>(n)));
  }

  std::vector<double> scores(n * classes);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy(gbt.base_score.begin(), gbt.base_score.end(), scores.begin() + i * classes);
  }
  gbt.train_loss.push_back(mean_log_loss(scores, labels, classes));

  const detail::ColumnView columns(dataset);
  // Class-major gradient/hessian/delta buffers so each class tree owns a slice.
  std::vector<double> grad(n * classes), hess(n * classes), delta(n * classes);
  std::vector<std::vector<double>> importances(classes);
  std::vector<double> g_row(classes), h_row(classes);

  for (int round = 0; round < params.n_rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      softmax_grad_hess(std::span<const double>(scores).subspan(i * classes, classes), labels[i],
                        g_row, h_row);
      for (std::size_t k = 0; k < classes; ++k) {
        grad[k * n + i] = g_row[k];
        hess[k * n + i] = h_row[k];
      }
    }

    std::vector<Tree> trees(classes);
    parallel_for(classes, workers, [&](std::size_t k) {
      BoostTreeBuilder builder(columns, params);
      trees[k] = builder.build(std::span<const double>(grad).subspan(k * n, n),
                               std::span<const double>(hess).subspan(k * n, n),
                               std::span<double>(delta).subspan(k * n, n));
      importances[k] = builder.importance();
    });

    for (std::size_t k = 0; k < classes; ++k) {
      for (std::size_t i = 0; i < n; ++i) scores[i * classes + k] += delta[k * n + i];
      for (std::size_t f = 0; f < model.importance.size(); ++f) {
        model.importance[f] += importances[k][f];
      }
    }
    gbt.rounds.push_back(std::move(trees));
    gbt.train_loss.push_back(mean_log_loss(scores, labels, classes));
  }

  model.body = std::move(gbt);
  return model;
}

}  // namespace eventcast
