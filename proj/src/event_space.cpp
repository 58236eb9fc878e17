#include "eventcast/event_space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <map>
#include <sstream>

#include "eventcast/csv.hpp"
#include "eventcast/error.hpp"
#include "eventcast/format.hpp"
#include "eventcast/parallel.hpp"
#include "eventcast/rng.hpp"

namespace eventcast {
namespace {

using Cdf = std::vector<double>;

std::vector<Cdf> marginal_cdfs(const EventSpaceSpec& spec) {
  std::vector<Cdf> cdfs;
  for (const auto& feature : spec.features) {
    Cdf cdf(feature.domain.size());
    double total = 0.0;
    for (std::size_t i = 0; i < cdf.size(); ++i) {
      total += i < feature.weights.size() ? feature.weights[i] : 0.0;
      cdf[i] = total;
    }
    if (!(total > 0.0)) {
      throw DataError("feature '" + feature.name + "' has no positive marginal weight");
    }
    for (auto& c : cdf) c /= total;
    cdf.back() = 1.0;
    cdfs.push_back(std::move(cdf));
  }
  return cdfs;
}

void check_spec(const EventSpaceSpec& spec) {
  if (spec.features.empty()) throw std::invalid_argument("event space has no features");
  for (const auto& feature : spec.features) {
    if (feature.domain.empty()) {
      throw DataError("feature '" + feature.name + "' has an empty domain");
    }
  }
}

// Draws `count` events of block `block` into `visit`.
void draw_block(const EventSpaceSpec& spec, const std::vector<Cdf>& cdfs, std::uint64_t seed,
                std::uint64_t block, std::uint64_t count, MarginalMode marginal,
                const EventVisitor& visit) {
  Rng rng(derive_seed(seed, block));
  std::vector<Code> event(spec.features.size());
  for (std::uint64_t i = 0; i < count; ++i) {
    for (std::size_t f = 0; f < event.size(); ++f) {
      const auto& domain = spec.features[f].domain;
      std::size_t pick = 0;
      if (marginal == MarginalMode::kUniform) {
        pick = static_cast<std::size_t>(rng.below(domain.size()));
      } else {
        const double u = rng.uniform();
        pick = static_cast<std::size_t>(
            std::upper_bound(cdfs[f].begin(), cdfs[f].end(), u) - cdfs[f].begin());
        pick = std::min(pick, domain.size() - 1);
      }
      event[f] = domain[pick];
    }
    visit(event);
  }
}

// Odometer step; returns false after the last event.
bool advance(const EventSpaceSpec& spec, std::vector<std::size_t>& digit, std::span<Code> event) {
  for (std::size_t f = spec.features.size(); f > 0; --f) {
    const auto& domain = spec.features[f - 1].domain;
    if (++digit[f - 1] < domain.size()) {
      event[f - 1] = domain[digit[f - 1]];
      return true;
    }
    digit[f - 1] = 0;
    event[f - 1] = domain[0];
  }
  return false;
}

std::uint64_t block_count(std::uint64_t n) { return (n + kSampleBlock - 1) / kSampleBlock; }

std::uint64_t block_size(std::uint64_t n, std::uint64_t block) {
  return std::min(kSampleBlock, n - block * kSampleBlock);
}

}  // namespace

BigInt EventSpaceSpec::size() const {
  BigInt total = 1;
  for (const auto& feature : features) total *= feature.domain.size();
  return total;
}

std::string_view to_string(MarginalMode mode) {
  return mode == MarginalMode::kUniform ? "uniform" : "empirical";
}

MarginalMode marginal_mode_from_string(std::string_view text) {
  if (text == "uniform") return MarginalMode::kUniform;
  if (text == "empirical") return MarginalMode::kEmpirical;
  throw ConfigError("unknown marginal mode '" + std::string(text) +
                    "' (expected uniform or empirical)");
}

std::string_view to_string(ForecastMode mode) {
  return mode == ForecastMode::kExhaustive ? "exhaustive" : "sampled";
}

EventSpaceSpec extract_domains(const EncodedDataset& dataset,
                               std::span<const std::string> selected) {
  if (selected.empty()) throw std::invalid_argument("empty feature selection");
  EventSpaceSpec spec;
  for (const auto& name : selected) {
    const auto& column = dataset.column(dataset.feature_index(name));
    std::map<Code, std::size_t> counts;
    for (Code c : column.codes) ++counts[c];
    EventFeature feature{name, {}, {}};
    const double rows = static_cast<double>(dataset.rows());
    for (const auto& [code, count] : counts) {
      feature.domain.push_back(code);
      feature.weights.push_back(static_cast<double>(count) / rows);
    }
    if (feature.domain.empty()) throw DataError("feature '" + name + "' has no observed codes");
    spec.features.push_back(std::move(feature));
  }
  return spec;
}

std::string to_scientific(const BigInt& value, int digits) {
  digits = std::max(digits, 1);
  std::string text = value < 0 ? BigInt(-value).str() : value.str();
  const std::string sign = value < 0 ? "-" : "";
  long exponent = static_cast<long>(text.size()) - 1;
  std::string mantissa = text.substr(0, std::min<std::size_t>(text.size(), digits));
  mantissa.resize(static_cast<std::size_t>(digits), '0');
  if (text.size() > static_cast<std::size_t>(digits) && text[digits] >= '5') {
    int i = digits - 1;
    while (i >= 0 && mantissa[i] == '9') mantissa[i--] = '0';
    if (i >= 0) {
      ++mantissa[i];
    } else {
      mantissa.insert(mantissa.begin(), '1');
      mantissa.pop_back();
      ++exponent;
    }
  }
  std::string out = sign + mantissa.substr(0, 1);
  if (digits > 1) out += "." + mantissa.substr(1);
  char exp[32];
  std::snprintf(exp, sizeof exp, "e+%02ld", exponent);
  return out + exp;
}

void enumerate_events(const EventSpaceSpec& spec, std::uint64_t limit,
                      const EventVisitor& visit) {
  check_spec(spec);
  const BigInt size = spec.size();
  if (size > limit) {
    throw SpaceTooLarge("event space of " + to_scientific(size) + " events exceeds the limit " +
                        std::to_string(limit));
  }
  std::vector<std::size_t> digit(spec.features.size(), 0);
  std::vector<Code> event;
  for (const auto& feature : spec.features) event.push_back(feature.domain[0]);
  do {
    visit(event);
  } while (advance(spec, digit, event));
}

void event_at(const EventSpaceSpec& spec, std::uint64_t index, std::span<Code> out) {
  check_spec(spec);
  if (out.size() != spec.features.size()) throw std::invalid_argument("event width mismatch");
  if (BigInt(index) >= spec.size()) throw std::out_of_range("event index beyond the space");
  for (std::size_t f = spec.features.size(); f > 0; --f) {
    const auto& domain = spec.features[f - 1].domain;
    out[f - 1] = domain[index % domain.size()];
    index /= domain.size();
  }
}

void sample_events(const EventSpaceSpec& spec, std::uint64_t n, std::uint64_t seed,
                   MarginalMode marginal, const EventVisitor& visit) {
  check_spec(spec);
  if (n < 1) throw std::invalid_argument("sample size must be >= 1");
  const auto cdfs = marginal == MarginalMode::kEmpirical ? marginal_cdfs(spec)
                                                         : std::vector<Cdf>{};
  for (std::uint64_t b = 0; b < block_count(n); ++b) {
    draw_block(spec, cdfs, seed, b, block_size(n, b), marginal, visit);
  }
}

std::size_t AttackForecast::most_likely() const {
  return argmax(event_fraction);
}

AttackForecast forecast(const LearnerModel& model, const EventSpaceSpec& spec, double accuracy,
                        const ForecastOptions& options) {
  check_spec(spec);
  if (!(accuracy >= 0.0 && accuracy <= 1.0)) {
    throw std::invalid_argument("accuracy must lie in [0, 1]");
  }
  // position[f] = spec coordinate feeding model feature f
  const std::size_t width = model.features.size();
  if (spec.features.size() != width) {
    throw DataError("event space has " + std::to_string(spec.features.size()) +
                    " features but the model expects " + std::to_string(width));
  }
  std::vector<std::size_t> position(width);
  for (std::size_t f = 0; f < width; ++f) {
    const auto it = std::find_if(spec.features.begin(), spec.features.end(),
                                 [&](const EventFeature& e) { return e.name == model.features[f].name; });
    if (it == spec.features.end()) {
      throw DataError("model feature '" + model.features[f].name + "' missing from event space");
    }
    position[f] = static_cast<std::size_t>(it - spec.features.begin());
  }

  const std::size_t classes = model.class_count();
  AttackForecast result;
  result.class_names = model.class_names;
  result.model_accuracy = accuracy;
  result.marginal = options.marginal;
  result.space_size = spec.size();

  const bool exhaustive = !options.force_sampling && result.space_size <= options.limit;
  result.mode = exhaustive ? ForecastMode::kExhaustive : ForecastMode::kSampled;
  const std::uint64_t total =
      exhaustive ? result.space_size.convert_to<std::uint64_t>() : options.n_samples;
  if (total < 1) throw std::invalid_argument("sample size must be >= 1");
  result.sample_count = total;

  // Exhaustive empirical mode weights each event by its marginal probability.
  const bool weight_events = exhaustive && options.marginal == MarginalMode::kEmpirical;
  const auto cdfs = options.marginal == MarginalMode::kEmpirical ? marginal_cdfs(spec)
                                                                 : std::vector<Cdf>{};
  std::vector<std::map<Code, double>> prob(weight_events ? spec.features.size() : 0);
  if (weight_events) {
    for (std::size_t s = 0; s < spec.features.size(); ++s) {
      const auto& feature = spec.features[s];
      double previous = 0.0;
      for (std::size_t i = 0; i < feature.domain.size(); ++i) {
        prob[s][feature.domain[i]] = cdfs[s][i] - previous;
        previous = cdfs[s][i];
      }
    }
  }

  const std::uint64_t blocks = block_count(total);
  std::vector<std::vector<double>> tallies(blocks);
  parallel_for(blocks, options.workers, [&](std::size_t b) {
    std::vector<double> tally(classes, 0.0);
    std::vector<Code> row(width);
    std::vector<double> proba(classes);
    const EventVisitor classify = [&](std::span<const Code> event) {
      for (std::size_t f = 0; f < width; ++f) row[f] = event[position[f]];
      predict_proba_row(model, row, proba);
      double weight = 1.0;
      if (weight_events) {
        for (std::size_t s = 0; s < event.size(); ++s) weight *= prob[s].at(event[s]);
      }
      tally[argmax(proba)] += weight;
    };
    const std::uint64_t count = block_size(total, b);
    if (exhaustive) {
      std::vector<Code> event(spec.features.size());
      std::vector<std::size_t> digit(spec.features.size());
      std::uint64_t index = b * kSampleBlock;
      for (std::size_t f = spec.features.size(); f > 0; --f) {
        const auto& domain = spec.features[f - 1].domain;
        digit[f - 1] = static_cast<std::size_t>(index % domain.size());
        event[f - 1] = domain[digit[f - 1]];
        index /= domain.size();
      }
      for (std::uint64_t i = 0; i < count; ++i) {
        classify(event);
        advance(spec, digit, event);
      }
    } else {
      draw_block(spec, cdfs, options.seed, b, count, options.marginal, classify);
    }
    tallies[b] = std::move(tally);
  });

  std::vector<double> sums(classes, 0.0);
  for (const auto& tally : tallies) {
    for (std::size_t c = 0; c < classes; ++c) sums[c] += tally[c];
  }
  double mass = 0.0;
  for (double s : sums) mass += s;
  for (std::size_t c = 0; c < classes; ++c) {
    const double f = mass > 0.0 ? sums[c] / mass : 0.0;
    result.event_fraction.push_back(f);
    result.weighted.push_back(accuracy * f);
    result.standard_error.push_back(
        exhaustive ? 0.0 : std::sqrt(f * (1.0 - f) / static_cast<double>(total)));
  }
  return result;
}

std::string forecast_json(const AttackForecast& forecast, int indent) {
  nlohmann::ordered_json j;
  j["mode"] = std::string(to_string(forecast.mode));
  j["marginal"] = std::string(to_string(forecast.marginal));
  j["space_size"] = to_scientific(forecast.space_size);
  j["space_size_exact"] = forecast.space_size.str();
  j["sample_count"] = forecast.sample_count;
  j["model_accuracy"] = forecast.model_accuracy;
  j["most_likely"] = forecast.class_names.empty()
                         ? std::string()
                         : forecast.class_names[forecast.most_likely()];
  j["classes"] = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < forecast.class_names.size(); ++c) {
    nlohmann::ordered_json row;
    row["class"] = forecast.class_names[c];
    row["fraction"] = forecast.event_fraction[c];
    row["weighted"] = forecast.weighted[c];
    row["stderr"] = forecast.standard_error[c];
    j["classes"].push_back(std::move(row));
  }
  return j.dump(indent) + "\n";
}

std::string forecast_csv(const AttackForecast& forecast) {
  std::ostringstream out;
  out << "class,fraction,weighted,stderr\n";
  for (std::size_t c = 0; c < forecast.class_names.size(); ++c) {
    out << csv_field(forecast.class_names[c]) << ',' << format_double(forecast.event_fraction[c]) << ','
        << format_double(forecast.weighted[c]) << ','
        << format_double(forecast.standard_error[c]) << '\n';
  }
  return out.str();
}

}  // namespace eventcast
