#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "eventcast/event_space.hpp"
#include "eventcast/learners.hpp"
#include "eventcast/resampler.hpp"

namespace eventcast {

struct PipelineConfig {
  struct Dataset {
    std::string path;
    std::string test_path;  // empty: stratified holdout of `path`
    std::string schema = "unsw-nb15";
    std::string label = "attack_cat";  // label column for the inferred schema
    std::vector<std::string> drop;
    double test_fraction = 0.3;
  } dataset;

  struct Preprocess {
    double variance_threshold = 0.0;
  } preprocess;

  ResamplePlan resample;

  LearnerParams learner;
  std::vector<LearnerKind> learners = {LearnerKind::kTree, LearnerKind::kForest,
                                       LearnerKind::kGbt, LearnerKind::kNbayes};

  struct Tuning {
    bool grid = false;
  } tuning;

  struct Selection {
    std::string method = "kbest";  // kbest | rfe
    std::size_t k = 0;             // 0 keeps every feature
    std::size_t step = 1;
    std::string score = "frequency";  // frequency | contingency
  } selection;

  struct Sweep {
    std::size_t k_min = 5;
    std::size_t k_max = 0;  // 0 = all features
    LearnerKind learner = LearnerKind::kGbt;
  } sweep;

  struct EventSpace {
    std::uint64_t limit = 10'000'000;
    std::uint64_t n_samples = 1'000'000;
    MarginalMode marginal = MarginalMode::kUniform;
    bool force_sampling = false;
    bool exact_size = false;
  } event_space;

  struct Run {
    std::uint64_t seed = 0;
    std::size_t threads = 0;  // 0: EVENTCAST_THREADS or 1
    std::string output_dir = "out";
  } run;

  struct Synth {
    std::size_t rows = 6000;
    std::size_t classes = 6;
    std::string output = "synthetic.csv";
  } synth;

  // Throws ConfigError on inconsistent values.
  void validate() const;
  // Seed of a named stage, derived from run.seed.
  std::uint64_t seed_for(std::string_view stage) const;
};

// A settable configuration key ("section.key").
struct ConfigKey {
  std::string name;
  std::string help;
  std::function<void(PipelineConfig&, const std::string&)> set;
};

const std::vector<ConfigKey>& config_keys();

// Sets one key from its text form; arrays are comma separated. Throws
// ConfigError on unknown keys or unparseable values.
void set_config_value(PipelineConfig& config, std::string_view key, const std::string& value);

// Parses the TOML subset used by config files: [section] headers,
// key = value lines with strings, numbers, booleans, and one-line arrays, and
// # comments.
void apply_config_text(PipelineConfig& config, std::string_view text,
                       std::string_view source = "<config>");
void apply_config_file(PipelineConfig& config, const std::string& path);

}  // namespace eventcast
