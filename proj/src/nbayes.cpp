#include <cmath>

#include "eventcast/learners.hpp"
#include "learner_internal.hpp"

namespace eventcast {

LearnerModel train_nbayes(const EncodedDataset& dataset, const LearnerParams& params) {
  detail::check_trainable(dataset, params);
  LearnerModel model = detail::make_model(dataset, params);
  model.params.learner = LearnerKind::kNbayes;
  model.importance.clear();

  const std::size_t classes = dataset.class_count();
  const auto labels = dataset.labels();
  const auto class_rows = dataset.class_histogram();
  const double alpha = params.alpha;

  NbayesModel nb;
  for (std::size_t c = 0; c < classes; ++c) {
    nb.log_prior.push_back(detail::safe_log(static_cast<double>(class_rows[c]) /
                                            static_cast<double>(dataset.rows())));
  }

  for (std::size_t f = 0; f < dataset.feature_count(); ++f) {
    const auto& column = dataset.column(f);
    const std::size_t card = column.meta.cardinality;
    const std::size_t width = card + 1;  // + reserved unseen code
    std::vector<double> counts(classes * width, 0.0);
    for (std::size_t i = 0; i < dataset.rows(); ++i) {
      counts[labels[i] * width + column.codes[i]] += 1.0;
    }
    std::vector<double> table(classes * width);
    for (std::size_t c = 0; c < classes; ++c) {
      const double denom = static_cast<double>(class_rows[c]) + alpha * static_cast<double>(card);
      for (std::size_t code = 0; code < width; ++code) {
        const double numer = counts[c * width + code] + alpha;
        table[c * width + code] = denom > 0.0 ? detail::safe_log(numer / denom)
                                              : detail::safe_log(0.0);
      }
    }
    nb.log_likelihood.push_back(std::move(table));
  }

  model.body = std::move(nb);
  return model;
}

}  // namespace eventcast
