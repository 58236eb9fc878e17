#include <CLI11.hpp>
#include <iostream>
#include <map>

#include "eventcast/config.hpp"
#include "eventcast/error.hpp"
#include "eventcast/event_space.hpp"
#include "eventcast/parallel.hpp"
#include "eventcast/pipeline.hpp"

namespace {

using eventcast::PipelineConfig;
using Command = void (*)(const PipelineConfig&, std::ostream&);

int run(int argc, char** argv) {
  CLI::App app{"eventcast: discrete event-space attack forecasting"};
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::pair<std::string, Command>>> commands = {
      {"preprocess", {"ingest, encode and discretize the dataset", eventcast::cmd_preprocess}},
      {"train", {"train, evaluate and select learners", eventcast::cmd_train}},
      {"sweep", {"k-best or recursive-elimination metric sweep", eventcast::cmd_sweep}},
      {"forecast", {"classify the event space of the saved model", eventcast::cmd_forecast}},
      {"synth", {"write a synthetic flow dataset", eventcast::cmd_synth}},
      {"report", {"collate artifacts into report.md", eventcast::cmd_report}},
  };

  std::string config_path;
  std::map<std::string, std::string> overrides;
  std::vector<std::pair<CLI::App*, Command>> subcommands;
  for (const auto& [name, entry] : commands) {
    CLI::App* sub = app.add_subcommand(name, entry.first);
    sub->add_option("-c,--config", config_path, "TOML configuration file");
    for (const auto& key : eventcast::config_keys()) {
      sub->add_option("--" + key.name, overrides[key.name], key.help);
    }
    subcommands.emplace_back(sub, entry.second);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  PipelineConfig config;
  if (!config_path.empty()) eventcast::apply_config_file(config, config_path);
  for (const auto& [sub, command] : subcommands) {
    if (!sub->parsed()) continue;
    for (const auto& key : eventcast::config_keys()) {
      if (sub->count("--" + key.name) > 0) {
        eventcast::set_config_value(config, key.name, overrides[key.name]);
      }
    }
    if (config.run.threads > 0) eventcast::set_default_workers(config.run.threads);
    command(config, std::cout);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const eventcast::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const eventcast::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const eventcast::SpaceTooLarge& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 4;
  }
}
