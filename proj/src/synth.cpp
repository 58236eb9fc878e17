#include "eventcast/synth.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "eventcast/error.hpp"
#include "eventcast/format.hpp"
#include "eventcast/rng.hpp"

namespace eventcast {
namespace {

constexpr std::array<const char*, 6> kProtos = {"tcp", "udp", "icmp", "arp", "ospf", "sctp"};
constexpr std::array<const char*, 8> kServices = {"-",    "http", "dns", "ftp",
                                                  "smtp", "ssh",  "pop3", "snmp"};

std::vector<std::size_t> class_sizes(std::size_t rows, std::size_t classes) {
  double total_weight = 0.0;
  for (std::size_t c = 0; c < classes; ++c) total_weight += 1.0 / static_cast<double>(c + 1);
  std::vector<std::size_t> sizes(classes);
  std::size_t assigned = 0;
  for (std::size_t c = 1; c < classes; ++c) {
    const double share = static_cast<double>(rows) / static_cast<double>(c + 1) / total_weight;
    sizes[c] = std::max<std::size_t>(2, static_cast<std::size_t>(share));
    assigned += sizes[c];
  }
  sizes[0] = rows - assigned;
  return sizes;
}

struct SynthRow {
  std::size_t label;
  std::string proto;
  std::string service;
  double dur;
  double sbytes;
  long ct_srv;
  std::size_t token;
};

}  // namespace

std::vector<std::string> synthetic_class_names(std::size_t classes) {
  std::vector<std::string> names{"Normal"};
  for (std::size_t c = 1; c < classes; ++c) {
    char name[32];
    std::snprintf(name, sizeof name, "Attack%02zu", c);
    names.emplace_back(name);
  }
  return names;
}

std::string synthetic_csv(std::size_t rows, std::size_t classes, std::uint64_t seed) {
  if (classes < 2) throw ConfigError("synthetic data needs at least 2 classes");
  if (rows < 10 * classes) throw ConfigError("synthetic data needs rows >= 10 * classes");
  const auto names = synthetic_class_names(classes);
  const auto sizes = class_sizes(rows, classes);

  Rng rng(derive_seed(seed, "synthetic-rows"));
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<SynthRow> table;
  table.reserve(rows);
  for (std::size_t c = 0; c < classes; ++c) {
    const double shift = static_cast<double>(c);
    for (std::size_t i = 0; i < sizes[c]; ++i) {
      SynthRow row;
      row.label = c;
      row.proto = rng.uniform() < 0.7 ? kProtos[c % kProtos.size()]
                                      : kProtos[rng.below(kProtos.size())];
      row.service = rng.uniform() < 0.6 ? kServices[(3 * c) % kServices.size()]
                                        : kServices[rng.below(kServices.size())];
      row.dur = std::pow(10.0, -3.0 + 0.6 * shift + 0.4 * noise(rng));
      row.sbytes = std::round(std::pow(10.0, 2.0 + 0.35 * shift + 0.3 * noise(rng)));
      row.ct_srv = std::max(1L, std::lround(2.0 + 3.0 * shift + 2.0 * noise(rng)));
      row.token = c;
      if (rng.uniform() >= kSynthTokenFidelity) {
        row.token = (c + 1 + rng.below(classes - 1)) % classes;
      }
      table.push_back(std::move(row));
    }
  }
  Rng order(derive_seed(seed, "synthetic-order"));
  order.shuffle(table.begin(), table.end());

  std::ostringstream out;
  out << "srcip,proto,service,dur,sbytes,ct_srv,sig,ttl_const,attack_cat\n";
  for (std::size_t r = 0; r < table.size(); ++r) {
    const auto& row = table[r];
    out << "10." << (r >> 16) % 256 << '.' << (r >> 8) % 256 << '.' << r % 256 << ','
        << row.proto << ',' << row.service << ',' << format_double(row.dur, 6) << ','
        << format_double(row.sbytes, 12) << ',' << row.ct_srv << ",s" << row.token << ",64,"
        << names[row.label] << '\n';
  }
  return out.str();
}

}  // namespace eventcast
