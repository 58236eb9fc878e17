#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "eventcast/dataset.hpp"
#include "eventcast/learners.hpp"
#include "eventcast/scores.hpp"

namespace eventcast {

enum class Chi2Variant {
  // Per-class sums of feature values against class-frequency expectations.
  kFrequency,
  // Classic code x class contingency-table statistic.
  kContingency,
};

FeatureScoreTable chi2_scores(const EncodedDataset& dataset,
                              Chi2Variant variant = Chi2Variant::kFrequency);

// Column indices of the k highest scores, in original column order.
std::vector<std::size_t> k_best_indices(const FeatureScoreTable& table, std::size_t k);

EncodedDataset select_k_best(const EncodedDataset& dataset, std::size_t k,
                             Chi2Variant variant = Chi2Variant::kFrequency);

struct SweepRow {
  std::size_t k = 0;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  bool operator==(const SweepRow&) const = default;
};

// For each k: chi-squared ranks on `train`, keep the top k, train with
// `params`, evaluate on the same columns of `test`. Jobs for different k run
// in parallel; rows come back in k_values order.
std::vector<SweepRow> kbest_sweep(const EncodedDataset& train, const EncodedDataset& test,
                                  const LearnerParams& params,
                                  std::span<const std::size_t> k_values,
                                  std::size_t workers = 1,
                                  Chi2Variant variant = Chi2Variant::kFrequency);

struct RfeResult {
  // Every feature exactly once: eliminated features first, then survivors from
  // least to most important.
  std::vector<std::string> elimination_order;
  std::vector<SweepRow> rows;  // one per evaluated feature count, descending
};

// Trains on the current features, records metrics, drops the `step` features
// with the lowest importance (ties: later column first) and repeats until at
// most `floor` features remain.
RfeResult rfe_sweep(const EncodedDataset& train, const EncodedDataset& test,
                    const LearnerParams& params, std::size_t step = 1,
                    std::size_t floor = 5, std::size_t workers = 1);

// Header k,accuracy,precision,recall,f1.
std::string sweep_csv(std::span<const SweepRow> rows);

}  // namespace eventcast
