#include <doctest.h>

#include <cmath>

#include "eventcast/discretizer.hpp"
#include "eventcast/error.hpp"
#include "eventcast/rng.hpp"
#include "support.hpp"

using namespace eventcast;

TEST_CASE("log_sig examples") {
  CHECK(log_sig(0.0) == LogSigPair{0, 0});
  CHECK(log_sig(3456.0) == LogSigPair{3, 3});
  CHECK(log_sig(0.042) == LogSigPair{-2, 4});
  CHECK(log_sig(1.0) == LogSigPair{0, 1});
  CHECK(log_sig(1000.0) == LogSigPair{3, 1});
  CHECK(log_sig(0.3) == LogSigPair{-1, 3});
  CHECK(log_sig(9.999) == LogSigPair{0, 9});
  CHECK_THROWS_AS(log_sig(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(log_sig(INFINITY), std::invalid_argument);
  CHECK_THROWS_AS(log_sig(NAN), std::invalid_argument);
}

TEST_CASE("log_sig brackets the value and is monotone") {
  Rng rng(3);
  double previous_x = 0.0;
  LogSigPair previous{0, 0};
  std::vector<double> xs;
  for (int i = 0; i < 5000; ++i) xs.push_back(std::pow(10.0, -6.0 + 18.0 * rng.uniform()));
  std::sort(xs.begin(), xs.end());
  for (double x : xs) {
    const auto p = log_sig(x);
    REQUIRE(p.sig >= 1);
    REQUIRE(p.sig <= 9);
    const double low = p.sig * std::pow(10.0, p.mag);
    const double high = (p.sig + 1) * std::pow(10.0, p.mag);
    CHECK(low <= x * (1 + 1e-12));
    CHECK(x < high * (1 + 1e-12));
    CHECK(std::abs(low - x) / x < 1.0);
    if (previous_x > 0.0) CHECK(previous <= p);
    previous_x = x;
    previous = p;
  }
}

TEST_CASE("expansion replaces passthrough columns with log and sig") {
  std::vector<FeatureColumn> columns = {
      support::discrete_column("a", {0, 1, 0, 1}),
      support::passthrough_column("dur", {0.0, 0.042, 3456.0, 7.0}),
      support::discrete_column("b", {1, 0, 2, 1}),
  };
  EncodedDataset ds(std::move(columns), {0, 1, 0, 1}, support::class_names(2));
  const auto state = fit_log_sig(ds);
  REQUIRE(state.ranges.size() == 1);
  CHECK(state.ranges[0].min_mag == -2);
  CHECK(state.ranges[0].max_mag == 3);
  const auto out = expand_log_sig(ds, state);
  REQUIRE(out.feature_count() == 4);
  CHECK(out.all_discrete());
  CHECK(out.meta(1).name == "dur log");
  CHECK(out.meta(2).name == "dur sig");
  CHECK(out.meta(1).kind == FeatureKind::kMag);
  CHECK(out.meta(1).cardinality == 7);  // zero plus mags -2..3
  CHECK(out.column(1).codes == std::vector<Code>{0, 1, 6, 3});
  CHECK(out.column(2).codes == std::vector<Code>{0, 4, 3, 7});
  CHECK(out.meta(2).cardinality == 10);
  // event-space shrinkage bound
  CHECK(out.meta(1).cardinality * out.meta(2).cardinality <=
        (state.ranges[0].max_mag - state.ranges[0].min_mag + 2) * 10);

  EncodedDataset discrete({support::discrete_column("a", {0, 1})}, {0, 1}, support::class_names(2));
  CHECK_THROWS_AS(expand_log_sig(discrete), std::invalid_argument);
}

TEST_CASE("magnitudes outside the fitted range clamp") {
  EncodedDataset fit({support::passthrough_column("x", {1.0, 10.0, 0.0})}, {0, 1, 0},
                     support::class_names(2));
  const auto state = fit_log_sig(fit);
  EncodedDataset other({support::passthrough_column("x", {1e9, 1e-9, 0.0})}, {0, 1, 0},
                       support::class_names(2));
  const auto out = apply_discretizer(other, state);
  CHECK(out.column(0).codes == std::vector<Code>{2, 1, 0});
}

TEST_CASE("variance filter drops constants and records them") {
  auto ds = support::make_dataset({{3, 3, 3, 3}, {0, 1, 0, 1}}, {0, 1, 0, 1}, 2);
  DiscretizerState state;
  const auto out = variance_filter(ds, 0.0, state);
  CHECK(out.feature_count() == 1);
  CHECK(out.meta(0).name == "f1");
  CHECK(state.dropped_features == std::vector<std::string>{"f0"});
  REQUIRE(state.variances.size() == 2);
  CHECK(state.variances[1].variance == doctest::Approx(0.25));
  CHECK(apply_discretizer(ds, state) == out);

  auto constant = support::make_dataset({{1, 1}}, {0, 1}, 2);
  DiscretizerState s2;
  CHECK_THROWS_AS(variance_filter(constant, 0.0, s2), DataError);
}

TEST_CASE("code variance is the population variance") {
  const auto column = support::discrete_column("x", {1, 2, 3, 4});
  CHECK(code_variance(column) == doctest::Approx(1.25));
}
