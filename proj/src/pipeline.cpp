#include "eventcast/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <numeric>
#include <set>
#include <sstream>

#include "eventcast/csv.hpp"
#include "eventcast/dataset_io.hpp"
#include "eventcast/error.hpp"
#include "eventcast/feature_select.hpp"
#include "eventcast/flow_ingest.hpp"
#include "eventcast/format.hpp"
#include "eventcast/model_io.hpp"
#include "eventcast/parallel.hpp"
#include "eventcast/resampler.hpp"
#include "eventcast/synth.hpp"
#include "json_io.hpp"

namespace eventcast {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

LearnerModel train_model(const EncodedDataset& dataset, const LearnerParams& params,
                         std::size_t workers) {
  return train(dataset, params, workers);
}

fs::path out_path(const PipelineConfig& config, const std::string& name) {
  return fs::path(config.run.output_dir) / name;
}

void ensure_output_dir(const PipelineConfig& config) {
  std::error_code ec;
  fs::create_directories(config.run.output_dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + config.run.output_dir + "'");
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text)) throw DataError("cannot write '" + path.string() + "'");
}

std::string read_text(const fs::path& path) { return read_file(path.string()); }

std::size_t workers_for(const PipelineConfig& config) {
  return config.run.threads > 0 ? config.run.threads : worker_count();
}

DatasetSchema load_schema(const PipelineConfig& config) {
  if (config.dataset.path.empty()) throw ConfigError("dataset.path is not set");
  DatasetSchema schema = config.dataset.schema == "infer"
                             ? infer_schema(config.dataset.path, config.dataset.label)
                             : resolve_schema(config.dataset.schema);
  schema.drop_columns(config.dataset.drop);
  return schema;
}

BigInt raw_size(const EncodedDataset& dataset) {
  BigInt size = 1;
  for (const auto& column : dataset.columns()) {
    std::size_t distinct = 0;
    if (column.is_discrete()) {
      distinct = std::set<Code>(column.codes.begin(), column.codes.end()).size();
    } else {
      distinct = std::set<double>(column.values.begin(), column.values.end()).size();
    }
    size *= std::max<std::size_t>(distinct, 1);
  }
  return size;
}

Chi2Variant chi2_variant(const PipelineConfig& config) {
  return config.selection.score == "contingency" ? Chi2Variant::kContingency
                                                 : Chi2Variant::kFrequency;
}

ResamplePlan resample_plan(const PipelineConfig& config) {
  ResamplePlan plan = config.resample;
  plan.seed = config.seed_for("resample");
  return plan;
}

LearnerParams learner_params(const PipelineConfig& config, LearnerKind kind) {
  LearnerParams params = config.learner;
  params.learner = kind;
  params.seed = config.seed_for("learner");
  return params;
}

int cost_rank(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::kNbayes: return 0;
    case LearnerKind::kTree: return 1;
    case LearnerKind::kGbt: return 2;
    case LearnerKind::kForest: return 3;
  }
  return 4;
}

struct Loaded {
  EncodedDataset train;
  EncodedDataset test;
  ordered_json preprocess;
};

Loaded load_prepared(const PipelineConfig& config) {
  Loaded loaded;
  const auto train_path = out_path(config, "train.ecd");
  if (!fs::exists(train_path)) {
    throw DataError("no preprocessed data in '" + config.run.output_dir +
                    "'; run the preprocess command first");
  }
  loaded.train = read_dataset(train_path.string());
  loaded.test = read_dataset(out_path(config, "test.ecd").string());
  try {
    loaded.preprocess = ordered_json::parse(read_text(out_path(config, "preprocess.json")));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed preprocess.json: ") + e.what());
  }
  return loaded;
}

// Small inner grid scored on an 80/20 split of the training side.
LearnerParams tune(const EncodedDataset& train, LearnerParams base, const PipelineConfig& config,
                   std::size_t workers, std::ostringstream& record) {
  std::vector<LearnerParams> grid;
  switch (base.learner) {
    case LearnerKind::kGbt:
      for (int depth : {4, 6, 8}) {
        for (double eta : {0.1, 0.3}) {
          for (int rounds : {100, 200}) {
            auto p = base;
            p.max_depth = depth;
            p.learning_rate = eta;
            p.n_rounds = rounds;
            grid.push_back(p);
          }
        }
      }
      break;
    case LearnerKind::kTree:
    case LearnerKind::kForest:
      for (int depth : {4, 6, 8}) {
        auto p = base;
        p.max_depth = depth;
        grid.push_back(p);
      }
      break;
    case LearnerKind::kNbayes:
      for (double alpha : {0.5, 1.0, 2.0}) {
        auto p = base;
        p.alpha = alpha;
        grid.push_back(p);
      }
      break;
  }
  const auto inner = stratified_split(train, 0.2, config.seed_for("tuning"));
  std::size_t best = 0;
  double best_f1 = -1.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto report = evaluate(train_model(inner.train, grid[i], workers), inner.test);
    record << to_string(base.learner) << ',' << grid[i].max_depth << ','
           << format_double(grid[i].learning_rate) << ',' << grid[i].n_rounds << ','
           << format_double(grid[i].alpha) << ','
           << format_double(report.macro_f1) << '\n';
    if (report.macro_f1 > best_f1) {
      best_f1 = report.macro_f1;
      best = i;
    }
  }
  return grid[best];
}

std::string markdown_from_csv(const std::string& csv) {
  CsvReader reader(csv);
  std::vector<std::string> fields;
  std::ostringstream out;
  bool header = true;
  while (reader.next(fields)) {
    out << '|';
    for (const auto& f : fields) out << ' ' << f << " |";
    out << '\n';
    if (header) {
      out << '|';
      for (std::size_t i = 0; i < fields.size(); ++i) out << " --- |";
      out << '\n';
      header = false;
    }
  }
  return out.str();
}

}  // namespace

PreparedData prepare_data(const PipelineConfig& config) {
  const DatasetSchema schema = load_schema(config);
  const RawFlowTable raw = load_csv(config.dataset.path, schema);
  PreparedData data;
  data.dropped_rows = raw.dropped_rows;
  EncodedDataset encoded = ordinal_encode(raw);
  EncodedDataset train;
  EncodedDataset test;
  if (!config.dataset.test_path.empty()) {
    const RawFlowTable raw_test = load_csv(config.dataset.test_path, schema);
    data.dropped_rows += raw_test.dropped_rows;
    const auto features = encoded.feature_meta();
    test = apply_encoding(raw_test, features, encoded.class_names());
    train = std::move(encoded);
  } else {
    auto split =
        stratified_split(encoded, config.dataset.test_fraction, config.seed_for("split"));
    train = std::move(split.train);
    test = std::move(split.test);
  }
  data.source_features = train.feature_meta();
  data.raw_feature_count = train.feature_count();
  data.raw_space_size = raw_size(train);

  if (!train.all_discrete()) {
    data.discretizer = fit_log_sig(train);
    train = expand_log_sig(train, data.discretizer);
  }
  data.train = variance_filter(train, config.preprocess.variance_threshold, data.discretizer);
  data.test = apply_discretizer(test, data.discretizer);
  return data;
}

LearnerRun run_learner(const EncodedDataset& train, const EncodedDataset& test,
                       const LearnerParams& params, std::size_t workers) {
  const auto start = std::chrono::steady_clock::now();
  LearnerRun run{train_model(train, params, workers), {}, {}};
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  const auto predicted = predict(run.model, test);
  run.confusion = confusion(test.labels(), predicted, run.model.class_count());
  run.confusion.class_names = run.model.class_names;
  run.report = metrics(run.confusion);
  run.report.train_wall_time = elapsed.count();
  return run;
}

std::size_t select_winner(const std::vector<LearnerRun>& runs) {
  if (runs.empty()) throw std::invalid_argument("no learner runs to select from");
  std::size_t best = 0;
  for (std::size_t i = 1; i < runs.size(); ++i) {
    const double f1 = runs[i].report.macro_f1;
    const double best_f1 = runs[best].report.macro_f1;
    if (f1 > best_f1 ||
        (f1 == best_f1 && cost_rank(runs[i].model.kind()) < cost_rank(runs[best].model.kind()))) {
      best = i;
    }
  }
  return best;
}

std::vector<std::size_t> select_features(const EncodedDataset& train, const EncodedDataset& test,
                                         const PipelineConfig& config) {
  const std::size_t k = config.selection.k;
  std::vector<std::size_t> all(train.feature_count());
  std::iota(all.begin(), all.end(), 0);
  if (k == 0 || k >= train.feature_count()) return all;
  if (config.selection.method == "kbest") {
    return k_best_indices(chi2_scores(train, chi2_variant(config)), k);
  }
  const auto params = learner_params(config, config.sweep.learner);
  const auto rfe = rfe_sweep(train, test, params, config.selection.step, k, workers_for(config));
  std::vector<std::size_t> keep;
  for (std::size_t i = rfe.elimination_order.size() - k; i < rfe.elimination_order.size(); ++i) {
    keep.push_back(train.feature_index(rfe.elimination_order[i]));
  }
  std::sort(keep.begin(), keep.end());
  return keep;
}

void cmd_preprocess(const PipelineConfig& config, std::ostream& log) {
  config.validate();
  ensure_output_dir(config);
  const PreparedData data = prepare_data(config);
  write_dataset(data.train, out_path(config, "train.ecd").string());
  write_dataset(data.test, out_path(config, "test.ecd").string());

  ordered_json j;
  j["schema"] = config.dataset.schema;
  j["raw_feature_count"] = data.raw_feature_count;
  j["raw_space_size"] = to_scientific(data.raw_space_size);
  j["feature_count"] = data.train.feature_count();
  j["train_rows"] = data.train.rows();
  j["test_rows"] = data.test.rows();
  j["dropped_rows"] = data.dropped_rows;
  j["class_names"] = data.train.class_names();
  j["source_features"] = nlohmann::json(data.source_features);
  j["discretizer"] = nlohmann::json(data.discretizer);
  write_text(out_path(config, "preprocess.json"), j.dump(1) + "\n");

  log << "features: " << data.raw_feature_count << " -> " << data.train.feature_count() << '\n'
      << "rows: train " << data.train.rows() << ", test " << data.test.rows() << ", dropped "
      << data.dropped_rows << '\n';
  if (!data.discretizer.dropped_features.empty()) {
    log << "variance filter dropped " << data.discretizer.dropped_features.size() << " features\n";
  }
}

void cmd_train(const PipelineConfig& config, std::ostream& log) {
  config.validate();
  ensure_output_dir(config);
  const auto loaded = load_prepared(config);
  const std::size_t workers = workers_for(config);
  const EncodedDataset train = resample(loaded.train, resample_plan(config));
  const EncodedDataset& test = loaded.test;

  write_text(out_path(config, "chi2.csv"), score_table_csv(chi2_scores(train, chi2_variant(config))));
  const auto keep = select_features(train, test, config);
  const EncodedDataset train_sel = train.select_features(keep);
  const EncodedDataset test_sel = test.select_features(keep);
  const auto names = train_sel.feature_names();
  std::string selected_text;
  for (const auto& name : names) selected_text += name + "\n";
  write_text(out_path(config, "selected_features.txt"), selected_text);

  std::ostringstream tuning;
  tuning << "learner,max_depth,learning_rate,n_rounds,alpha,f1\n";
  std::vector<LearnerRun> runs;
  for (LearnerKind kind : config.learners) {
    LearnerParams params = learner_params(config, kind);
    if (config.tuning.grid) params = tune(train_sel, params, config, workers, tuning);
    runs.push_back(run_learner(train_sel, test_sel, params, workers));
    const auto& run = runs.back();
    log << to_string(kind) << ": accuracy " << format_double(run.report.accuracy, 4) << ", macro F1 "
        << format_double(run.report.macro_f1, 4) << ", " << format_double(run.report.train_wall_time, 3)
        << " s\n";
    write_text(out_path(config, "metrics_" + std::string(to_string(kind)) + ".json"),
               metrics_json(run.report));
    write_text(out_path(config, "confusion_" + std::string(to_string(kind)) + ".csv"),
               confusion_csv(run.confusion));
  }
  if (config.tuning.grid) write_text(out_path(config, "tuning.csv"), tuning.str());

  const std::size_t winner = select_winner(runs);
  std::ostringstream metrics_table;
  std::ostringstream timing;
  metrics_table << "learner,accuracy,precision,recall,f1,selected\n";
  timing << "learner,train_seconds,rows,features\n";
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& r = runs[i].report;
    metrics_table << to_string(runs[i].model.kind()) << ',' << format_double(r.accuracy) << ','
                  << format_double(r.macro_precision) << ',' << format_double(r.macro_recall) << ','
                  << format_double(r.macro_f1) << ',' << (i == winner ? 1 : 0) << '\n';
    timing << to_string(runs[i].model.kind()) << ',' << format_double(r.train_wall_time, 6) << ','
           << train_sel.rows() << ',' << train_sel.feature_count() << '\n';
  }
  write_text(out_path(config, "metrics.csv"), metrics_table.str());
  write_text(out_path(config, "timing.csv"), timing.str());

  const auto& best = runs[winner];
  ModelBundle bundle;
  bundle.model = best.model;
  bundle.source_features =
      loaded.preprocess.at("source_features").get<std::vector<FeatureMeta>>();
  bundle.discretizer = loaded.preprocess.at("discretizer").get<DiscretizerState>();
  bundle.domains = extract_domains(loaded.train.select_features(keep), names);
  bundle.accuracy = best.report.accuracy;
  bundle.macro_f1 = best.report.macro_f1;
  save_bundle(bundle, out_path(config, "bundle.json").string());

  // Rows in the shape of the preprocessing/reduction summary table.
  std::ostringstream table;
  table << "stage,features,space_size,accuracy,f1\n";
  table << "unprocessed," << loaded.preprocess.at("raw_feature_count").get<std::size_t>() << ','
        << loaded.preprocess.at("raw_space_size").get<std::string>() << ",,\n";
  std::vector<std::string> all_names = loaded.train.feature_names();
  const auto full_size = extract_domains(loaded.train, all_names).size();
  if (keep.size() == loaded.train.feature_count()) {
    table << "processed," << keep.size() << ',' << to_scientific(full_size) << ','
          << format_double(best.report.accuracy) << ',' << format_double(best.report.macro_f1) << '\n';
  } else {
    const auto full = run_learner(train, test, best.model.params, workers);
    table << "processed," << loaded.train.feature_count() << ',' << to_scientific(full_size) << ','
          << format_double(full.report.accuracy) << ',' << format_double(full.report.macro_f1) << '\n';
    table << "reduced," << keep.size() << ',' << to_scientific(bundle.domains.size()) << ','
          << format_double(best.report.accuracy) << ',' << format_double(best.report.macro_f1) << '\n';
  }
  write_text(out_path(config, "reduction.csv"), table.str());
  log << "selected " << to_string(best.model.kind()) << " on " << keep.size() << " features\n";
}

void cmd_sweep(const PipelineConfig& config, std::ostream& log) {
  config.validate();
  ensure_output_dir(config);
  const auto loaded = load_prepared(config);
  const EncodedDataset train = resample(loaded.train, resample_plan(config));
  const std::size_t features = train.feature_count();
  const std::size_t k_max = config.sweep.k_max == 0 ? features : std::min(config.sweep.k_max, features);
  const std::size_t k_min = std::min(config.sweep.k_min, k_max);
  const auto params = learner_params(config, config.sweep.learner);

  if (config.selection.method == "kbest") {
    std::vector<std::size_t> ks(k_max - k_min + 1);
    std::iota(ks.begin(), ks.end(), k_min);
    const auto rows = kbest_sweep(train, loaded.test, params, ks, workers_for(config),
                                  chi2_variant(config));
    write_text(out_path(config, "sweep_kbest.csv"), sweep_csv(rows));
    log << "k-best sweep: " << rows.size() << " rows (k = " << k_min << ".." << k_max << ")\n";
  } else {
    const auto result = rfe_sweep(train, loaded.test, params, config.selection.step, k_min,
                                  workers_for(config));
    write_text(out_path(config, "sweep_rfe.csv"), sweep_csv(result.rows));
    std::string order;
    for (const auto& name : result.elimination_order) order += name + "\n";
    write_text(out_path(config, "rfe_order.txt"), order);
    log << "RFE sweep: " << result.rows.size() << " rows (floor " << k_min << ")\n";
  }
}

void cmd_forecast(const PipelineConfig& config, std::ostream& log) {
  config.validate();
  ensure_output_dir(config);
  const auto bundle_path = out_path(config, "bundle.json");
  if (!fs::exists(bundle_path)) {
    throw DataError("no model bundle in '" + config.run.output_dir + "'; run the train command first");
  }
  const ModelBundle bundle = load_bundle(bundle_path.string());
  ForecastOptions options;
  options.limit = config.event_space.limit;
  options.n_samples = config.event_space.n_samples;
  options.seed = config.seed_for("forecast");
  options.marginal = config.event_space.marginal;
  options.force_sampling = config.event_space.force_sampling;
  options.workers = workers_for(config);
  const auto result = forecast(bundle.model, bundle.domains, bundle.accuracy, options);
  write_text(out_path(config, "forecast.json"), forecast_json(result));
  write_text(out_path(config, "forecast.csv"), forecast_csv(result));

  log << "event space: " << to_scientific(result.space_size) << " events over "
      << bundle.domains.features.size() << " features\n";
  if (config.event_space.exact_size) log << "exact size: " << result.space_size.str() << '\n';
  log << "mode: " << to_string(result.mode) << " (" << result.sample_count << " events)\n";
  log << "most likely: " << result.class_names[result.most_likely()] << '\n';
}

void cmd_synth(const PipelineConfig& config, std::ostream& log) {
  const std::string text =
      synthetic_csv(config.synth.rows, config.synth.classes, config.seed_for("synth"));
  const fs::path path(config.synth.output);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_text(path, text);
  log << "wrote " << config.synth.rows << " rows, " << config.synth.classes << " classes to "
      << path.string() << '\n';
}

void cmd_report(const PipelineConfig& config, std::ostream& log) {
  const fs::path dir(config.run.output_dir);
  if (!fs::exists(dir / "preprocess.json")) {
    throw DataError("no pipeline artifacts in '" + config.run.output_dir + "'");
  }
  std::ostringstream md;
  md << "# Pipeline report\n\n";
  const auto pre = ordered_json::parse(read_text(dir / "preprocess.json"));
  md << "Schema `" << pre.at("schema").get<std::string>() << "`: "
     << pre.at("raw_feature_count").get<std::size_t>() << " raw features, "
     << pre.at("feature_count").get<std::size_t>() << " after preprocessing. "
     << pre.at("train_rows").get<std::size_t>() << " training rows, "
     << pre.at("test_rows").get<std::size_t>() << " test rows, "
     << pre.at("dropped_rows").get<std::size_t>() << " dropped.\n\n";

  const std::vector<std::pair<std::string, std::string>> sections = {
      {"reduction.csv", "Feature reduction"},   {"metrics.csv", "Learners"},
      {"timing.csv", "Training time"},       {"sweep_kbest.csv", "K-best sweep"},
      {"sweep_rfe.csv", "Recursive elimination sweep"}, {"forecast.csv", "Forecast"},
  };
  for (const auto& [file, title] : sections) {
    if (!fs::exists(dir / file)) continue;
    md << "## " << title << "\n\n" << markdown_from_csv(read_text(dir / file)) << '\n';
  }
  if (fs::exists(dir / "chi2.csv")) {
    const std::string chi2 = read_text(dir / "chi2.csv");
    CsvReader reader(chi2);
    std::vector<std::string> fields;
    std::vector<std::vector<std::string>> rows;
    reader.next(fields);
    while (reader.next(fields)) rows.push_back(fields);
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
      return std::stoul(a[3]) < std::stoul(b[3]);
    });
    md << "## Top chi-squared features\n\n| rank | feature | score | scaled |\n| --- | --- | --- | --- |\n";
    for (std::size_t i = 0; i < std::min<std::size_t>(10, rows.size()); ++i) {
      md << "| " << rows[i][3] << " | " << rows[i][0] << " | " << rows[i][1] << " | " << rows[i][2]
         << " |\n";
    }
    md << '\n';
  }
  write_text(dir / "report.md", md.str());
  log << "wrote " << (dir / "report.md").string() << '\n';
}

}  // namespace eventcast
