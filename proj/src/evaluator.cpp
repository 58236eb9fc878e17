#include "eventcast/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "eventcast/csv.hpp"
#include "eventcast/error.hpp"
#include "eventcast/format.hpp"
#include "eventcast/rng.hpp"

namespace eventcast {

std::uint64_t ConfusionMatrix::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

ConfusionMatrix confusion(std::span<const Code> y_true, std::span<const Code> y_pred,
                          std::size_t classes) {
  if (y_true.size() != y_pred.size()) {
    throw std::invalid_argument("confusion: " + std::to_string(y_true.size()) + " truths vs " +
                                std::to_string(y_pred.size()) + " predictions");
  }
  ConfusionMatrix cm;
  cm.classes = classes;
  cm.counts.assign(classes * classes, 0);
  for (std::size_t t = 0; t < y_true.size(); ++t) {
    if (y_true[t] >= classes || y_pred[t] >= classes) {
      throw std::invalid_argument("confusion: class code out of range");
    }
    ++cm.counts[y_true[t] * classes + y_pred[t]];
  }
  return cm;
}

MetricReport metrics(const ConfusionMatrix& cm) {
  const std::uint64_t total = cm.total();
  if (total == 0) throw std::invalid_argument("metrics: empty confusion matrix");
  const std::size_t n = cm.classes;
  const auto ratio = [](double num, double den) { return den > 0.0 ? num / den : 0.0; };

  MetricReport report;
  report.class_names = cm.class_names;
  report.per_class.resize(n);
  std::uint64_t diagonal = 0;
  for (std::size_t c = 0; c < n; ++c) {
    std::uint64_t predicted = 0, actual = 0;
    for (std::size_t o = 0; o < n; ++o) {
      predicted += cm.at(o, c);
      actual += cm.at(c, o);
    }
    const double tp = static_cast<double>(cm.at(c, c));
    diagonal += cm.at(c, c);
    auto& m = report.per_class[c];
    m.support = actual;
    m.precision = ratio(tp, static_cast<double>(predicted));
    m.recall = ratio(tp, static_cast<double>(actual));
    m.f1 = ratio(2.0 * m.precision * m.recall, m.precision + m.recall);
    report.macro_precision += m.precision;
    report.macro_recall += m.recall;
    report.macro_f1 += m.f1;
  }
  report.macro_precision /= static_cast<double>(n);
  report.macro_recall /= static_cast<double>(n);
  report.macro_f1 /= static_cast<double>(n);
  report.accuracy = static_cast<double>(diagonal) / static_cast<double>(total);
  return report;
}

SplitResult stratified_split(const EncodedDataset& dataset, double test_fraction,
                             std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw std::invalid_argument("test_fraction must be in (0, 1)");
  }
  std::vector<std::vector<std::size_t>> members(dataset.class_count());
  for (std::size_t i = 0; i < dataset.rows(); ++i) members[dataset.labels()[i]].push_back(i);

  Rng rng(seed);
  SplitResult result;
  for (std::size_t c = 0; c < members.size(); ++c) {
    auto& rows = members[c];
    if (rows.empty()) continue;
    if (rows.size() < 2) {
      throw DataError("class '" + dataset.class_names()[c] +
                      "' has a single row and cannot be split");
    }
    const auto wanted = static_cast<std::size_t>(
        std::llround(static_cast<double>(rows.size()) * test_fraction));
    const std::size_t n_test = std::clamp<std::size_t>(wanted, 1, rows.size() - 1);
    rng.shuffle(rows.begin(), rows.end());
    result.test_rows.insert(result.test_rows.end(), rows.begin(),
                            rows.begin() + static_cast<std::ptrdiff_t>(n_test));
    result.train_rows.insert(result.train_rows.end(),
                             rows.begin() + static_cast<std::ptrdiff_t>(n_test), rows.end());
  }
  std::sort(result.train_rows.begin(), result.train_rows.end());
  std::sort(result.test_rows.begin(), result.test_rows.end());
  result.train = dataset.select_rows(result.train_rows);
  result.test = dataset.select_rows(result.test_rows);
  return result;
}

std::string metrics_json(const MetricReport& report, int indent) {
  nlohmann::json j;
  j["accuracy"] = report.accuracy;
  j["macro_precision"] = report.macro_precision;
  j["macro_recall"] = report.macro_recall;
  j["macro_f1"] = report.macro_f1;
  j["per_class"] = nlohmann::json::array();
  for (std::size_t c = 0; c < report.per_class.size(); ++c) {
    const auto& m = report.per_class[c];
    j["per_class"].push_back({{"class", c < report.class_names.size() ? report.class_names[c]
                                                                      : std::to_string(c)},
                              {"precision", m.precision},
                              {"recall", m.recall},
                              {"f1", m.f1},
                              {"support", m.support}});
  }
  return j.dump(indent) + "\n";
}

std::string metrics_csv(const MetricReport& report) {
  std::ostringstream out;
  out << "class,precision,recall,f1,support\n";
  std::uint64_t support = 0;
  for (std::size_t c = 0; c < report.per_class.size(); ++c) {
    const auto& m = report.per_class[c];
    support += m.support;
    out << csv_field(c < report.class_names.size() ? report.class_names[c] : std::to_string(c))
        << ',' << format_double(m.precision) << ',' << format_double(m.recall) << ','
        << format_double(m.f1) << ',' << m.support << '\n';
  }
  out << "macro," << format_double(report.macro_precision) << ','
      << format_double(report.macro_recall) << ',' << format_double(report.macro_f1) << ','
      << support << '\n';
  return out.str();
}

std::string confusion_csv(const ConfusionMatrix& cm) {
  const auto name = [&](std::size_t c) {
    return csv_field(c < cm.class_names.size() ? cm.class_names[c] : std::to_string(c));
  };
  std::ostringstream out;
  out << "true\\predicted";
  for (std::size_t c = 0; c < cm.classes; ++c) out << ',' << name(c);
  out << '\n';
  for (std::size_t r = 0; r < cm.classes; ++r) {
    out << name(r);
    for (std::size_t c = 0; c < cm.classes; ++c) out << ',' << cm.at(r, c);
    out << '\n';
  }
  return out.str();
}

}  // namespace eventcast

namespace eventcast {

MetricReport evaluate(const LearnerModel& model, const EncodedDataset& test) {
  const auto predicted = predict(model, test);
  auto cm = confusion(test.labels(), predicted, model.class_count());
  cm.class_names = model.class_names;
  return metrics(cm);
}

}  // namespace eventcast
