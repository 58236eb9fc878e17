#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace eventcast {

// Probability that a row's "sig" token names its own class. Predicting the
// class named by the token is right exactly this often, so the Bayes-optimal
// accuracy of a synthetic table is at least this value.
inline constexpr double kSynthTokenFidelity = 0.93;

// Class names of a synthetic table: "Normal" plus "Attack01", "Attack02", ...
std::vector<std::string> synthetic_class_names(std::size_t classes);

// Deterministic flow-style CSV with label column "attack_cat". Columns:
// srcip (identity, meant to be dropped), proto and service (class-dependent
// modes), dur and sbytes (class-dependent log-scale magnitudes), ct_srv
// (class-dependent count), sig (class token), ttl_const (constant).
// Class sizes fall off as 1/(c+1) with at least 2 rows each. Throws
// ConfigError unless classes >= 2 and rows >= 10 * classes.
std::string synthetic_csv(std::size_t rows, std::size_t classes, std::uint64_t seed);

}  // namespace eventcast
