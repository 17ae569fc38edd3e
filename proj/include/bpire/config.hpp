#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bpire/asymptotics.hpp"
#include "bpire/conditioned.hpp"
#include "bpire/engine.hpp"
#include "bpire/env.hpp"
#include "bpire/gfalgebra.hpp"

namespace bpire {

enum class ExperimentKind { validate, estimate, sweep, walkseries, renewal, identities, oracle };
enum class OutputFormat { csv, json };

std::string_view to_string(ExperimentKind kind);
std::optional<ExperimentKind> parse_experiment_kind(std::string_view name);
std::optional<OutputFormat> parse_output_format(std::string_view name);

/// Config parse or validation failure. `key()` is the dotted key path and
/// `line()` its 1-based source line (0 when unknown).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, std::size_t line, const std::string& message);
  const std::string& key() const noexcept { return key_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string key_;
  std::size_t line_;
};

struct RenewalSpec {
  RenewalTable::Kind which = RenewalTable::Kind::U;
  std::vector<double> grid;
  std::uint64_t paths = 100'000;
  std::uint64_t cap = 100'000;
};

struct OracleSpec {
  std::size_t env_samples = 20;
  std::uint64_t reps = 200'000;
};

/// Sizes for the identities self-test; the defaults fit in about a minute.
struct IdentitiesSpec {
  std::uint64_t walk_paths = 1'000'000;
  std::size_t duality_n = 10;
  std::size_t decomposition_envs = 20;
  std::uint64_t branch_reps = 20'000;
  std::uint64_t renewal_paths = 200'000;
  std::uint64_t harmonicity_reps = 200'000;
  std::size_t relation_paths = 1000;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::validate;
  IncrementLaw law = IncrementLaw::gaussian(1.0);
  Regime regime;
  std::size_t n = 0;
  std::vector<std::size_t> n_grid;
  std::uint64_t seed = 0;
  std::optional<unsigned> workers;
  SamplingTarget target = SamplingTarget::relative(0.03);
  std::filesystem::path out_dir = "out";
  Convention convention = Convention::paper_corollary;
  OutputFormat format = OutputFormat::csv;
  bool reversed = false;  // estimate: reversed-representation estimator
  WalkSeriesSpec series;
  RenewalSpec renewal;
  OracleSpec oracle;
  IdentitiesSpec identities;
  std::uint64_t config_hash = 0;  // FNV-1a of the config bytes
};

/// Parses and validates a TOML config. `expected` is the kind named on the
/// command line; the file's `kind` key (optional) must agree with it.
ExperimentConfig parse_config(std::string_view text, std::optional<ExperimentKind> expected = {});
ExperimentConfig load_config(const std::filesystem::path& file,
                             std::optional<ExperimentKind> expected = {});

std::uint64_t fnv1a64(std::string_view bytes) noexcept;

struct RunResult {
  int exit_code = 0;
  std::vector<std::filesystem::path> artifacts;  // relative to out_dir, manifest last
  std::string message;
};

/// Runs a validated config and writes its artifacts and manifest.json into
/// config.out_dir. Exit codes: 0 success, 2 numeric failure, 3 identity
/// violation. `workers` overrides config/env defaults when set.
RunResult run_experiment(const ExperimentConfig& config);

/// Full entry point: load, validate, run. Adds exit code 1 for config errors.
RunResult run_experiment(const std::filesystem::path& config_file,
                         std::optional<ExperimentKind> expected = {});

}  // namespace bpire
