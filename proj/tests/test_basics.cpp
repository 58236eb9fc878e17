#include <doctest.h>

#include <atomic>
#include <set>
#include <stdexcept>

#include "eventcast/config.hpp"
#include "eventcast/csv.hpp"
#include "eventcast/error.hpp"
#include "eventcast/format.hpp"
#include "eventcast/parallel.hpp"
#include "eventcast/rng.hpp"

using namespace eventcast;

TEST_CASE("rng is reproducible and seeds diverge") {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    CHECK(x == b());
    (void)c();
  }
  CHECK(Rng(42)() != Rng(43)());
  CHECK(derive_seed(1, "resample") != derive_seed(1, "learner"));
  CHECK(derive_seed(1, std::uint64_t{0}) != derive_seed(1, std::uint64_t{1}));
  CHECK(derive_seed(7, "x") == derive_seed(7, "x"));
}

TEST_CASE("rng below stays in range and covers it") {
  Rng rng(5);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const auto v = rng.below(7);
    REQUIRE(v < 7);
    seen.insert(v);
  }
  CHECK(seen.size() == 7);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("shuffle is a permutation") {
  std::vector<int> v(50);
  for (int i = 0; i < 50; ++i) v[i] = i;
  Rng rng(9);
  rng.shuffle(v.begin(), v.end());
  std::multiset<int> s(v.begin(), v.end());
  CHECK(s.size() == 50);
  CHECK(*s.begin() == 0);
  CHECK(*s.rbegin() == 49);
}

TEST_CASE("csv reader handles quoting, CRLF and blank lines") {
  CsvReader reader("\xEF\xBB\xBF" "a,b,c\r\n\"x,1\",\"he said \"\"hi\"\"\",\"multi\nline\"\n\n4,,6\n");
  std::vector<std::string> f;
  REQUIRE(reader.next(f));
  CHECK(f == std::vector<std::string>{"a", "b", "c"});
  REQUIRE(reader.next(f));
  CHECK(f == std::vector<std::string>{"x,1", "he said \"hi\"", "multi\nline"});
  REQUIRE(reader.next(f));
  CHECK(reader.line() == 5);
  CHECK(f == std::vector<std::string>{"4", "", "6"});
  CHECK_FALSE(reader.next(f));
}

TEST_CASE("csv_field quotes only when needed") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("q\"") == "\"q\"\"\"");
}

TEST_CASE("format_double round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.125, 0.0}) {
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.881234, 3) == "0.881");
}

TEST_CASE("parallel_for visits every index once and rethrows") {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
  for (auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(10, 3,
                               [](std::size_t i) {
                                 if (i == 5) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
}

TEST_CASE("config text sets keys and rejects unknown ones") {
  PipelineConfig config;
  apply_config_text(config,
                    "# comment\n[dataset]\npath = \"data.csv\"  # trailing\ndrop = [\"srcip\", \"dstip\"]\n"
                    "[learner]\nlearners = [\"gbt\", \"tree\"]\nn_rounds = 20\nlearning_rate = 0.1\n"
                    "[event_space]\nn_samples = 1e5\nmarginal = \"empirical\"\n[run]\nseed = 11\n");
  CHECK(config.dataset.path == "data.csv");
  CHECK(config.dataset.drop == std::vector<std::string>{"srcip", "dstip"});
  CHECK(config.learners == std::vector<LearnerKind>{LearnerKind::kGbt, LearnerKind::kTree});
  CHECK(config.learner.n_rounds == 20);
  CHECK(config.learner.learning_rate == doctest::Approx(0.1));
  CHECK(config.event_space.n_samples == 100000);
  CHECK(config.event_space.marginal == MarginalMode::kEmpirical);
  CHECK(config.run.seed == 11);
  CHECK_NOTHROW(config.validate());

  CHECK_THROWS_AS(apply_config_text(config, "[dataset]\nnope = 1\n"), ConfigError);
  CHECK_THROWS_AS(apply_config_text(config, "[learner]\nn_rounds = many\n"), ConfigError);
  CHECK_THROWS_AS(apply_config_text(config, "[learner\n"), ConfigError);
  CHECK_THROWS_AS(set_config_value(config, "resample.mode", "sideways"), ConfigError);
}

TEST_CASE("config validation catches inconsistent values") {
  PipelineConfig config;
  config.dataset.test_fraction = 1.0;
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config = PipelineConfig{};
  config.selection.method = "pca";
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config = PipelineConfig{};
  config.sweep.k_min = 10;
  config.sweep.k_max = 5;
  CHECK_THROWS_AS(config.validate(), ConfigError);
}

TEST_CASE("stage seeds derive from the run seed") {
  PipelineConfig a, b;
  b.run.seed = 1;
  CHECK(a.seed_for("split") != a.seed_for("resample"));
  CHECK(a.seed_for("split") != b.seed_for("split"));
}
