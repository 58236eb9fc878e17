#include "eventcast/model_io.hpp"

#include <cstdio>
#include <fstream>

#include "eventcast/csv.hpp"
#include "eventcast/error.hpp"
#include "json_io.hpp"

namespace eventcast {

using nlohmann::json;

void to_json(json& j, const FeatureMeta& meta) {
  j = json{{"name", meta.name},
           {"kind", to_string(meta.kind)},
           {"cardinality", meta.cardinality},
           {"code_map", meta.code_map}};
}

void from_json(const json& j, FeatureMeta& meta) {
  meta.name = j.at("name").get<std::string>();
  meta.kind = feature_kind_from_string(j.at("kind").get<std::string>());
  meta.cardinality = j.at("cardinality").get<Code>();
  meta.code_map = j.at("code_map").get<std::vector<std::string>>();
}

void to_json(json& j, const DiscretizerState& state) {
  j = json::object();
  j["ranges"] = json::array();
  for (const auto& r : state.ranges) {
    j["ranges"].push_back({{"feature", r.feature}, {"min_mag", r.min_mag}, {"max_mag", r.max_mag}});
  }
  j["variances"] = json::array();
  for (const auto& v : state.variances) {
    j["variances"].push_back({{"feature", v.feature}, {"variance", v.variance}});
  }
  j["dropped_features"] = state.dropped_features;
}

void from_json(const json& j, DiscretizerState& state) {
  state = {};
  for (const auto& r : j.at("ranges")) {
    state.ranges.push_back({r.at("feature").get<std::string>(), r.at("min_mag").get<int>(),
                            r.at("max_mag").get<int>()});
  }
  for (const auto& v : j.at("variances")) {
    state.variances.push_back({v.at("feature").get<std::string>(), v.at("variance").get<double>()});
  }
  state.dropped_features = j.at("dropped_features").get<std::vector<std::string>>();
}

void to_json(json& j, const LearnerParams& p) {
  j = json{{"learner", to_string(p.learner)},
           {"max_depth", p.max_depth},
           {"n_rounds", p.n_rounds},
           {"learning_rate", p.learning_rate},
           {"lambda", p.lambda},
           {"min_child_weight", p.min_child_weight},
           {"n_trees", p.n_trees},
           {"feature_subsample", p.feature_subsample},
           {"bootstrap", p.bootstrap},
           {"alpha", p.alpha},
           {"seed", p.seed}};
}

void from_json(const json& j, LearnerParams& p) {
  p.learner = learner_kind_from_string(j.at("learner").get<std::string>());
  p.max_depth = j.at("max_depth").get<int>();
  p.n_rounds = j.at("n_rounds").get<int>();
  p.learning_rate = j.at("learning_rate").get<double>();
  p.lambda = j.at("lambda").get<double>();
  p.min_child_weight = j.at("min_child_weight").get<double>();
  p.n_trees = j.at("n_trees").get<int>();
  p.feature_subsample = j.at("feature_subsample").get<int>();
  p.bootstrap = j.at("bootstrap").get<bool>();
  p.alpha = j.at("alpha").get<double>();
  p.seed = j.at("seed").get<std::uint64_t>();
}

void to_json(json& j, const Tree& tree) {
  std::vector<std::int32_t> feature, left, right;
  std::vector<Code> threshold;
  std::vector<std::vector<double>> value;
  for (const auto& node : tree.nodes) {
    feature.push_back(node.feature);
    threshold.push_back(node.threshold);
    left.push_back(node.left);
    right.push_back(node.right);
    value.push_back(node.value);
  }
  j = json{{"feature", feature}, {"threshold", threshold}, {"left", left},
           {"right", right},     {"value", value}};
}

void from_json(const json& j, Tree& tree) {
  const auto feature = j.at("feature").get<std::vector<std::int32_t>>();
  const auto threshold = j.at("threshold").get<std::vector<Code>>();
  const auto left = j.at("left").get<std::vector<std::int32_t>>();
  const auto right = j.at("right").get<std::vector<std::int32_t>>();
  auto value = j.at("value").get<std::vector<std::vector<double>>>();
  const std::size_t n = feature.size();
  if (threshold.size() != n || left.size() != n || right.size() != n || value.size() != n) {
    throw DataError("tree arrays have inconsistent lengths");
  }
  tree.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& node = tree.nodes[i];
    node = {feature[i], threshold[i], left[i], right[i], std::move(value[i])};
    const auto bad_child = [&](std::int32_t c) {
      return c <= static_cast<std::int32_t>(i) || c >= static_cast<std::int32_t>(n);
    };
    if (!node.is_leaf() && (bad_child(node.left) || bad_child(node.right))) {
      throw DataError("tree node " + std::to_string(i) + " has an invalid child index");
    }
  }
}

void to_json(json& j, const EventSpaceSpec& spec) {
  j = json::array();
  for (const auto& f : spec.features) {
    j.push_back({{"name", f.name}, {"domain", f.domain}, {"weights", f.weights}});
  }
}

void from_json(const json& j, EventSpaceSpec& spec) {
  spec.features.clear();
  for (const auto& f : j) {
    spec.features.push_back({f.at("name").get<std::string>(),
                             f.at("domain").get<std::vector<Code>>(),
                             f.at("weights").get<std::vector<double>>()});
  }
}

namespace {

json model_body(const LearnerModel& model) {
  json body;
  if (const auto* m = std::get_if<TreeModel>(&model.body)) {
    body["tree"] = m->tree;
  } else if (const auto* m = std::get_if<ForestModel>(&model.body)) {
    body["trees"] = m->trees;
  } else if (const auto* m = std::get_if<GbtModel>(&model.body)) {
    body["learning_rate"] = m->learning_rate;
    body["base_score"] = m->base_score;
    body["train_loss"] = m->train_loss;
    body["rounds"] = m->rounds;
  } else if (const auto* m = std::get_if<NbayesModel>(&model.body)) {
    body["log_prior"] = m->log_prior;
    body["log_likelihood"] = m->log_likelihood;
  }
  return body;
}

void read_body(const json& body, LearnerModel& model) {
  switch (model.params.learner) {
    case LearnerKind::kTree:
      model.body = TreeModel{body.at("tree").get<Tree>()};
      break;
    case LearnerKind::kForest:
      model.body = ForestModel{body.at("trees").get<std::vector<Tree>>()};
      break;
    case LearnerKind::kGbt: {
      GbtModel gbt;
      gbt.learning_rate = body.at("learning_rate").get<double>();
      gbt.base_score = body.at("base_score").get<std::vector<double>>();
      gbt.train_loss = body.at("train_loss").get<std::vector<double>>();
      gbt.rounds = body.at("rounds").get<std::vector<std::vector<Tree>>>();
      for (const auto& round : gbt.rounds) {
        if (round.size() != model.class_names.size()) {
          throw DataError("boosting round does not hold one tree per class");
        }
      }
      model.body = std::move(gbt);
      break;
    }
    case LearnerKind::kNbayes: {
      NbayesModel nb;
      nb.log_prior = body.at("log_prior").get<std::vector<double>>();
      nb.log_likelihood = body.at("log_likelihood").get<std::vector<std::vector<double>>>();
      model.body = std::move(nb);
      break;
    }
  }
}

char hex_digit(unsigned v) { return "0123456789abcdef"[v & 15]; }

std::string hex64(std::uint64_t v) {
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) out[static_cast<std::size_t>(i)] = hex_digit(v);
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  out << text;
  if (!out) throw DataError("failed writing " + path);
}

}  // namespace

std::string bundle_to_json(const ModelBundle& bundle) {
  const auto& model = bundle.model;
  json j;
  j["format_version"] = kBundleFormatVersion;
  j["metadata"] = {{"learner", to_string(model.kind())},
                   {"n_features", model.features.size()},
                   {"n_classes", model.class_names.size()},
                   {"fingerprint", hex64(fingerprint(model.features))}};
  j["class_names"] = model.class_names;
  j["params"] = model.params;
  j["features"] = model.features;
  j["importance"] = model.importance;
  j["model"] = model_body(model);
  j["source_features"] = bundle.source_features;
  j["discretizer"] = bundle.discretizer;
  j["event_domains"] = bundle.domains;
  j["evaluation"] = {{"accuracy", bundle.accuracy}, {"macro_f1", bundle.macro_f1}};
  return j.dump(1) + "\n";
}

ModelBundle bundle_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("model bundle is corrupted: ") + e.what());
  }
  try {
    const int version = j.at("format_version").get<int>();
    if (version != kBundleFormatVersion) {
      throw DataError("model bundle format_version " + std::to_string(version) +
                      " is not supported (expected " + std::to_string(kBundleFormatVersion) +
                      ")");
    }
    ModelBundle bundle;
    auto& model = bundle.model;
    model.params = j.at("params").get<LearnerParams>();
    model.class_names = j.at("class_names").get<std::vector<std::string>>();
    model.features = j.at("features").get<std::vector<FeatureMeta>>();
    model.importance = j.at("importance").get<std::vector<double>>();
    read_body(j.at("model"), model);
    const auto& meta = j.at("metadata");
    if (meta.at("n_features").get<std::size_t>() != model.features.size() ||
        meta.at("fingerprint").get<std::string>() != hex64(fingerprint(model.features))) {
      throw DataError("model bundle metadata does not match its feature list");
    }
    bundle.source_features = j.at("source_features").get<std::vector<FeatureMeta>>();
    bundle.discretizer = j.at("discretizer").get<DiscretizerState>();
    bundle.domains = j.at("event_domains").get<EventSpaceSpec>();
    bundle.accuracy = j.at("evaluation").at("accuracy").get<double>();
    bundle.macro_f1 = j.at("evaluation").at("macro_f1").get<double>();
    return bundle;
  } catch (const json::exception& e) {
    throw DataError(std::string("model bundle is corrupted: ") + e.what());
  }
}

void save_bundle(const ModelBundle& bundle, const std::string& path) {
  write_text(path, bundle_to_json(bundle));
}

ModelBundle load_bundle(const std::string& path) { return bundle_from_json(read_file(path)); }

void save_model(const LearnerModel& model, const std::string& path) {
  save_bundle(ModelBundle{model, {}, {}, {}, 0.0, 0.0}, path);
}

LearnerModel load_model(const std::string& path) { return load_bundle(path).model; }

}  // namespace eventcast
