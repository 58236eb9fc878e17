#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "eventcast/dataset.hpp"
#include "eventcast/learners.hpp"

namespace eventcast {

using BigInt = boost::multiprecision::cpp_int;

struct EventFeature {
  std::string name;
  std::vector<Code> domain;     // sorted, distinct
  std::vector<double> weights;  // observed frequency of each domain code

  bool operator==(const EventFeature&) const = default;
};

struct EventSpaceSpec {
  std::vector<EventFeature> features;

  // Exact product of domain sizes.
  BigInt size() const;
  bool operator==(const EventSpaceSpec&) const = default;
};

// Raised when exhaustive enumeration is requested above the limit.
class SpaceTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class MarginalMode { kUniform, kEmpirical };
enum class ForecastMode { kExhaustive, kSampled };

std::string_view to_string(MarginalMode mode);
MarginalMode marginal_mode_from_string(std::string_view text);
std::string_view to_string(ForecastMode mode);

// Domains of the selected features (distinct observed codes). Throws
// std::invalid_argument on an empty selection and DataError on unknown names.
EventSpaceSpec extract_domains(const EncodedDataset& dataset,
                               std::span<const std::string> selected);

// "4.33e+51"-style rendering with `digits` significant digits.
std::string to_scientific(const BigInt& value, int digits = 3);

using EventVisitor = std::function<void(std::span<const Code>)>;

// Calls visit for every event exactly once in odometer order (last feature
// fastest). Throws SpaceTooLarge when size() > limit.
void enumerate_events(const EventSpaceSpec& spec, std::uint64_t limit,
                      const EventVisitor& visit);

// Writes the event with mixed-radix index `index` (odometer order) to `out`.
void event_at(const EventSpaceSpec& spec, std::uint64_t index, std::span<Code> out);

// n independent events. Events are drawn in blocks of kSampleBlock, block b
// using the substream derive_seed(seed, b), so the stream is the same however
// the blocks are distributed over workers.
inline constexpr std::uint64_t kSampleBlock = 4096;
void sample_events(const EventSpaceSpec& spec, std::uint64_t n, std::uint64_t seed,
                   MarginalMode marginal, const EventVisitor& visit);

struct ForecastOptions {
  std::uint64_t limit = 10'000'000;
  std::uint64_t n_samples = 1'000'000;
  std::uint64_t seed = 0;
  MarginalMode marginal = MarginalMode::kUniform;
  // Sample even when the space is small enough to enumerate.
  bool force_sampling = false;
  std::size_t workers = 1;
};

struct AttackForecast {
  std::vector<std::string> class_names;
  std::vector<double> event_fraction;
  std::vector<double> weighted;  // model_accuracy * event_fraction
  std::vector<double> standard_error;
  double model_accuracy = 0.0;
  std::uint64_t sample_count = 0;
  ForecastMode mode = ForecastMode::kExhaustive;
  MarginalMode marginal = MarginalMode::kUniform;
  BigInt space_size = 0;

  std::size_t most_likely() const;
};

// Classifies every event (exhaustive, when size <= limit) or n sampled events
// and reports per-class fractions. Spec features are matched to model features
// by name, so spec order is free; the name sets must be equal (DataError).
AttackForecast forecast(const LearnerModel& model, const EventSpaceSpec& spec,
                        double accuracy, const ForecastOptions& options = {});

std::string forecast_json(const AttackForecast& forecast, int indent = 2);
// Header class,fraction,weighted,stderr.
std::string forecast_csv(const AttackForecast& forecast);

}  // namespace eventcast
