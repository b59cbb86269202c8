#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cspgeo/instances.hpp"

namespace cspgeo {

inline constexpr int kConfigSchemaVersion = 1;
inline constexpr std::string_view kArtifactVersion = "cspgeo/1.0.0";

enum class ExperimentKind {
  shatter_scan,
  rigidity_scan,
  looseness_scan,
  heuristic_sweep,
  transfer_compare,
  moment_curves,
  concentration,
};

std::string_view to_string(ExperimentKind k);
ExperimentKind parse_experiment_kind(std::string_view name);

enum class InstanceSource { uniform, planted };

struct Budgets {
  std::uint64_t enumeration = std::uint64_t{1} << 26;  // cap on k^n and on search nodes
  std::uint64_t list_coloring = std::uint64_t{1} << 22;
};

struct ProcessParams {
  double gamma = 0.3;
  unsigned q = 5;
  double lambda = 0.0;
  unsigned adjacency_radius = 1;
  unsigned z_threshold = 10;
};

struct ExperimentConfig {
  int schema_version = kConfigSchemaVersion;
  ExperimentKind experiment = ExperimentKind::shatter_scan;
  Ensemble ensemble = Ensemble::coloring;
  unsigned n = 10;
  unsigned k = 3;
  /// Coloring: average degree d = 2m/n. SAT and NAE: clause density r = m/n.
  std::vector<double> densities;
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
  Budgets budgets;
  ProcessParams process;
  InstanceSource source = InstanceSource::uniform;  // shatter-scan and concentration
  SamplingMode sampling = SamplingMode::without_replacement;
  PlantBalance balance = PlantBalance::uniform;
  std::string statistic = "loose_variables";       // transfer-compare
  std::string output_dir = "results";
};

/// Throws ParameterError on unknown fields or wrong types.
ExperimentConfig config_from_json(const nlohmann::json& j);
/// Canonical form: every field present, keys sorted.
nlohmann::json config_to_json(const ExperimentConfig& c);
ExperimentConfig load_config(const std::filesystem::path& path);

struct ConfigIssue {
  std::string field;
  std::string message;
};

/// Range, budget and monotonicity checks; never runs anything. Empty means valid.
std::vector<ConfigIssue> validate_config(const ExperimentConfig& c);

/// FNV-1a 64 of the canonical config JSON, as 16 hex digits.
std::string config_hash(const ExperimentConfig& c);

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  [[nodiscard]] std::string csv() const;
};

struct TrialFailure {
  std::size_t density_index = 0;
  std::optional<std::uint64_t> trial;  // absent when a whole grid point failed
  std::uint64_t seed = 0;
  std::string message;
};

struct ResultRecord {
  std::string artifact_version{kArtifactVersion};
  std::string rng_version;
  std::string config_hash;
  ExperimentConfig config;
  std::vector<Table> tables;  // summary tables first, then per-trial tables
  std::vector<TrialFailure> failures;

  [[nodiscard]] bool ok() const noexcept { return failures.empty(); }
  [[nodiscard]] const Table* table(std::string_view name) const;
};

/// Worker threads from CSPGEO_WORKERS (default: hardware concurrency). Results do not
/// depend on the worker count.
unsigned worker_count();

/// Trial t at grid point g draws from derive(derive(seed, g), t); within a trial the
/// instance uses stream 0 and later operations streams 1, 2, ...
/// Throws ParameterError listing the issues if the config is invalid.
ResultRecord run_experiment(const ExperimentConfig& config, unsigned workers = 0);

nlohmann::json record_to_json(const ResultRecord& r);
ResultRecord record_from_json(const nlohmann::json& j);

/// Writes record.json, one CSV per table, plot.gp and, on failures, failures.json.
void write_record(const ResultRecord& r, const std::filesystem::path& dir);

/// Format a double as the shortest string that reads back to the same value.
std::string format_double(double v);

}  // namespace cspgeo
