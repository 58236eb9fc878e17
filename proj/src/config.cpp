#include "eventcast/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "eventcast/error.hpp"
#include "eventcast/rng.hpp"

namespace eventcast {
namespace {

std::string trim(std::string_view text) {
  std::size_t a = 0;
  std::size_t b = text.size();
  while (a < b && std::isspace(static_cast<unsigned char>(text[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(text[b - 1]))) --b;
  return std::string(text.substr(a, b - a));
}

[[noreturn]] void bad_value(std::string_view key, const std::string& value, std::string_view want) {
  throw ConfigError(std::string(key) + ": expected " + std::string(want) + ", got '" + value + "'");
}

template <typename T>
T parse_integer(std::string_view key, const std::string& value) {
  const std::string text = trim(value);
  T out{};
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec == std::errc() && end == text.data() + text.size() && !text.empty()) return out;
  // Accept integral floating forms such as 1e6.
  char* stop = nullptr;
  const double d = std::strtod(text.c_str(), &stop);
  if (!text.empty() && *stop == '\0' && std::isfinite(d) && d == std::floor(d) &&
      d >= static_cast<double>(std::numeric_limits<T>::min()) &&
      d <= static_cast<double>(std::numeric_limits<T>::max())) {
    return static_cast<T>(d);
  }
  bad_value(key, value, "an integer");
}

double parse_real(std::string_view key, const std::string& value) {
  const std::string text = trim(value);
  char* stop = nullptr;
  const double d = std::strtod(text.c_str(), &stop);
  if (text.empty() || *stop != '\0' || !std::isfinite(d)) bad_value(key, value, "a number");
  return d;
}

bool parse_bool(std::string_view key, const std::string& value) {
  const std::string text = trim(value);
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  bad_value(key, value, "true or false");
}

std::vector<std::string> parse_list(const std::string& value) {
  std::vector<std::string> items;
  if (trim(value).empty()) return items;
  std::stringstream in(value);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

template <typename T, typename Field>
ConfigKey integer_key(std::string name, std::string help, Field field) {
  return {name, std::move(help), [name, field](PipelineConfig& c, const std::string& v) {
            field(c) = parse_integer<T>(name, v);
          }};
}

template <typename Field>
ConfigKey real_key(std::string name, std::string help, Field field) {
  return {name, std::move(help),
          [name, field](PipelineConfig& c, const std::string& v) { field(c) = parse_real(name, v); }};
}

template <typename Field>
ConfigKey bool_key(std::string name, std::string help, Field field) {
  return {name, std::move(help),
          [name, field](PipelineConfig& c, const std::string& v) { field(c) = parse_bool(name, v); }};
}

template <typename Field>
ConfigKey text_key(std::string name, std::string help, Field field) {
  return {name, std::move(help),
          [field](PipelineConfig& c, const std::string& v) { field(c) = trim(v); }};
}

std::vector<ConfigKey> build_keys() {
  using C = PipelineConfig;
  return {
      text_key("dataset.path", "training CSV", [](C& c) -> auto& { return c.dataset.path; }),
      text_key("dataset.test_path", "test CSV (default: stratified holdout)",
               [](C& c) -> auto& { return c.dataset.test_path; }),
      text_key("dataset.schema", "unsw-nb15, unsw-nb15-flow, cicids-17 or infer",
               [](C& c) -> auto& { return c.dataset.schema; }),
      text_key("dataset.label", "label column for the inferred schema",
               [](C& c) -> auto& { return c.dataset.label; }),
      {"dataset.drop", "extra columns to drop",
       [](C& c, const std::string& v) { c.dataset.drop = parse_list(v); }},
      real_key("dataset.test_fraction", "holdout fraction",
               [](C& c) -> auto& { return c.dataset.test_fraction; }),
      real_key("preprocess.variance_threshold", "drop features with variance <= this",
               [](C& c) -> auto& { return c.preprocess.variance_threshold; }),
      {"resample.mode", "none, under, over or hybrid",
       [](C& c, const std::string& v) { c.resample.mode = resample_mode_from_string(trim(v)); }},
      real_key("resample.majority_cap_ratio", "largest class cap relative to the rarest",
               [](C& c) -> auto& { return c.resample.majority_cap_ratio; }),
      real_key("resample.minority_target_ratio", "minority padding target relative to the largest",
               [](C& c) -> auto& { return c.resample.minority_target_ratio; }),
      {"learner.learners", "learners to train: tree, forest, gbt, nbayes",
       [](C& c, const std::string& v) {
         c.learners.clear();
         for (const auto& name : parse_list(v)) c.learners.push_back(learner_kind_from_string(name));
       }},
      integer_key<int>("learner.max_depth", "tree depth limit",
                       [](C& c) -> auto& { return c.learner.max_depth; }),
      integer_key<int>("learner.n_rounds", "boosting rounds",
                       [](C& c) -> auto& { return c.learner.n_rounds; }),
      real_key("learner.learning_rate", "boosting shrinkage",
               [](C& c) -> auto& { return c.learner.learning_rate; }),
      real_key("learner.lambda", "boosting L2 leaf penalty",
               [](C& c) -> auto& { return c.learner.lambda; }),
      real_key("learner.min_child_weight", "minimum child weight",
               [](C& c) -> auto& { return c.learner.min_child_weight; }),
      integer_key<int>("learner.n_trees", "forest size", [](C& c) -> auto& { return c.learner.n_trees; }),
      integer_key<int>("learner.feature_subsample", "forest features per split (0 = sqrt)",
                       [](C& c) -> auto& { return c.learner.feature_subsample; }),
      bool_key("learner.bootstrap", "forest bootstrap", [](C& c) -> auto& { return c.learner.bootstrap; }),
      real_key("learner.alpha", "naive Bayes smoothing", [](C& c) -> auto& { return c.learner.alpha; }),
      bool_key("tuning.grid", "grid-search gbt depth and learning rate",
               [](C& c) -> auto& { return c.tuning.grid; }),
      text_key("selection.method", "kbest or rfe", [](C& c) -> auto& { return c.selection.method; }),
      integer_key<std::size_t>("selection.k", "features to keep (0 = all)",
                               [](C& c) -> auto& { return c.selection.k; }),
      integer_key<std::size_t>("selection.step", "RFE features dropped per round",
                               [](C& c) -> auto& { return c.selection.step; }),
      text_key("selection.score", "frequency or contingency chi-squared",
               [](C& c) -> auto& { return c.selection.score; }),
      integer_key<std::size_t>("sweep.k_min", "smallest k (RFE floor)",
                               [](C& c) -> auto& { return c.sweep.k_min; }),
      integer_key<std::size_t>("sweep.k_max", "largest k (0 = all)",
                               [](C& c) -> auto& { return c.sweep.k_max; }),
      {"sweep.learner", "learner used by sweeps",
       [](C& c, const std::string& v) { c.sweep.learner = learner_kind_from_string(trim(v)); }},
      integer_key<std::uint64_t>("event_space.limit", "largest space enumerated exhaustively",
                                 [](C& c) -> auto& { return c.event_space.limit; }),
      integer_key<std::uint64_t>("event_space.n_samples", "sample size above the limit",
                                 [](C& c) -> auto& { return c.event_space.n_samples; }),
      {"event_space.marginal", "uniform or empirical",
       [](C& c, const std::string& v) { c.event_space.marginal = marginal_mode_from_string(trim(v)); }},
      bool_key("event_space.force_sampling", "sample even small spaces",
               [](C& c) -> auto& { return c.event_space.force_sampling; }),
      bool_key("event_space.exact_size", "print the exact space size",
               [](C& c) -> auto& { return c.event_space.exact_size; }),
      integer_key<std::uint64_t>("run.seed", "global seed", [](C& c) -> auto& { return c.run.seed; }),
      integer_key<std::size_t>("run.threads", "worker threads (0 = default)",
                               [](C& c) -> auto& { return c.run.threads; }),
      text_key("run.output_dir", "artifact directory", [](C& c) -> auto& { return c.run.output_dir; }),
      integer_key<std::size_t>("synth.rows", "synthetic rows", [](C& c) -> auto& { return c.synth.rows; }),
      integer_key<std::size_t>("synth.classes", "synthetic classes",
                               [](C& c) -> auto& { return c.synth.classes; }),
      text_key("synth.output", "synthetic CSV path", [](C& c) -> auto& { return c.synth.output; }),
  };
}

// Converts a TOML value token to the key's text form.
std::string value_text(std::string_view raw, std::string_view where) {
  const std::string token = trim(raw);
  if (token.empty()) throw ConfigError(std::string(where) + ": missing value");
  if (token.front() == '"') {
    if (token.size() < 2 || token.back() != '"') {
      throw ConfigError(std::string(where) + ": unterminated string");
    }
    return token.substr(1, token.size() - 2);
  }
  if (token.front() == '[') {
    if (token.back() != ']') throw ConfigError(std::string(where) + ": unterminated array");
    std::string joined;
    for (auto& item : parse_list(token.substr(1, token.size() - 2))) {
      if (!joined.empty()) joined += ',';
      joined += value_text(item, where);
    }
    return joined;
  }
  return token;
}

// Removes a trailing # comment outside quotes.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

}  // namespace

void PipelineConfig::validate() const {
  if (!(dataset.test_fraction > 0.0 && dataset.test_fraction < 1.0)) {
    throw ConfigError("dataset.test_fraction must be in (0, 1)");
  }
  if (!(preprocess.variance_threshold >= 0.0)) {
    throw ConfigError("preprocess.variance_threshold must be >= 0");
  }
  resample.validate();
  learner.validate();
  if (learners.empty()) throw ConfigError("learner.learners is empty");
  if (selection.method != "kbest" && selection.method != "rfe") {
    throw ConfigError("selection.method must be kbest or rfe");
  }
  if (selection.score != "frequency" && selection.score != "contingency") {
    throw ConfigError("selection.score must be frequency or contingency");
  }
  if (selection.step < 1) throw ConfigError("selection.step must be >= 1");
  if (sweep.k_min < 1) throw ConfigError("sweep.k_min must be >= 1");
  if (sweep.k_max != 0 && sweep.k_max < sweep.k_min) {
    throw ConfigError("sweep.k_max must be >= sweep.k_min");
  }
  if (event_space.n_samples < 1) throw ConfigError("event_space.n_samples must be >= 1");
  if (run.output_dir.empty()) throw ConfigError("run.output_dir is empty");
}

std::uint64_t PipelineConfig::seed_for(std::string_view stage) const {
  return derive_seed(run.seed, stage);
}

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = build_keys();
  return keys;
}

void set_config_value(PipelineConfig& config, std::string_view key, const std::string& value) {
  for (const auto& entry : config_keys()) {
    if (entry.name == key) {
      entry.set(config, value);
      return;
    }
  }
  throw ConfigError("unknown configuration key '" + std::string(key) + "'");
}

void apply_config_text(PipelineConfig& config, std::string_view text, std::string_view source) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::string section;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string where = std::string(source) + ":" + std::to_string(number);
    const std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') throw ConfigError(where + ": malformed section header");
      section = trim(std::string_view(body).substr(1, body.size() - 2));
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string full = section.empty() ? key : section + "." + key;
    try {
      set_config_value(config, full, value_text(std::string_view(body).substr(eq + 1), where));
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
}

void apply_config_file(PipelineConfig& config, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  apply_config_text(config, text.str(), path);
}

}  // namespace eventcast
