#include <cstdlib>
#include <iostream>
#include <CLI11.hpp>

#include "bpire/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Branching process in random environment with immigration: experiment runner"};
  app.require_subcommand(1, 1);

  std::string config_file;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::string> out_dir;
  std::optional<std::string> format;

  for (const char* kind : {"validate", "estimate", "sweep", "walkseries", "renewal", "identities", "oracle"}) {
    CLI::App* sub = app.add_subcommand(kind, std::string("run an experiment of kind '") + kind + "'");
    sub->add_option("--config", config_file, "TOML experiment config")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "master seed (overrides the config)");
    sub->add_option("--workers", workers, "worker threads (default: config, then BPIRE_WORKERS, then 1)")
        ->check(CLI::Range(1u, 1024u));
    sub->add_option("--out", out_dir, "output directory (overrides the config)");
    sub->add_option("--format", format, "series output format")->check(CLI::IsMember({"csv", "json"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  const std::string kind_name = app.get_subcommands().front()->get_name();
  const auto kind = bpire::parse_experiment_kind(kind_name);

  bpire::ExperimentConfig config;
  try {
    config = bpire::load_config(config_file, kind);
  } catch (const bpire::ConfigError& e) {
    std::cerr << config_file << ": " << e.what() << '\n';
    return 1;
  }
  if (seed) config.seed = *seed;
  if (workers) config.workers = *workers;
  if (out_dir) config.out_dir = *out_dir;
  if (format) config.format = *bpire::parse_output_format(*format);

  bpire::RunResult result;
  try {
    result = bpire::run_experiment(config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  for (const auto& a : result.artifacts) std::cout << (config.out_dir / a).string() << '\n';
  if (!result.message.empty()) std::cerr << result.message << '\n';
  return result.exit_code;
}
