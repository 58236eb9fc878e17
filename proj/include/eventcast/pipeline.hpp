#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "eventcast/config.hpp"
#include "eventcast/dataset.hpp"
#include "eventcast/discretizer.hpp"
#include "eventcast/evaluator.hpp"
#include "eventcast/event_space.hpp"
#include "eventcast/learners.hpp"

namespace eventcast {

// Train and test sides after ingest, encoding, log/sig expansion and the
// variance filter (all fitted on the training side).
struct PreparedData {
  EncodedDataset train;
  EncodedDataset test;
  std::vector<FeatureMeta> source_features;
  DiscretizerState discretizer;
  std::size_t raw_feature_count = 0;
  // Product of distinct raw values per feature on the training side.
  BigInt raw_space_size = 0;
  std::size_t dropped_rows = 0;
};

PreparedData prepare_data(const PipelineConfig& config);

struct LearnerRun {
  LearnerModel model;
  MetricReport report;
  ConfusionMatrix confusion;
};

// Trains and evaluates one learner, timing the fit.
LearnerRun run_learner(const EncodedDataset& train, const EncodedDataset& test,
                       const LearnerParams& params, std::size_t workers);

// Highest macro F1; exact ties go to the cheaper learner (nbayes, tree, gbt,
// forest).
std::size_t select_winner(const std::vector<LearnerRun>& runs);

// Feature indices kept by the configured selection (all when selection.k is
// 0), in column order.
std::vector<std::size_t> select_features(const EncodedDataset& train, const EncodedDataset& test,
                                         const PipelineConfig& config);

// Subcommands. Artifacts go to run.output_dir; progress lines go to `log`.
void cmd_preprocess(const PipelineConfig& config, std::ostream& log);
void cmd_train(const PipelineConfig& config, std::ostream& log);
void cmd_sweep(const PipelineConfig& config, std::ostream& log);
void cmd_forecast(const PipelineConfig& config, std::ostream& log);
void cmd_synth(const PipelineConfig& config, std::ostream& log);
void cmd_report(const PipelineConfig& config, std::ostream& log);

}  // namespace eventcast
