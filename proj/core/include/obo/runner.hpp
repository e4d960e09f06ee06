#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "obo/config.hpp"
#include "obo/metrics.hpp"
#include "obo/problems.hpp"

namespace obo {

enum class OptimizerKind { sobow, oagd, ogd };

const char* to_string(OptimizerKind kind);
OptimizerKind optimizer_from_string(const std::string& name);

struct MetricFlags {
  bool blr = true;
  bool blr_static = false;
  bool hg_error = true;
  bool variations = true;
  bool timing = true;
};

// stream_default: the family's own choice (random for hyper_rep, zero otherwise).
enum class InitKind { stream_default, zero, random };

struct ExperimentConfig {
  StreamConfig stream{};
  OptimizerKind optimizer = OptimizerKind::sobow;
  OptimizerConfig optimizer_cfg{};
  MetricFlags metrics{};
  std::filesystem::path output_dir = "runs";
  std::string run_id = "run";
  // Master seed; stream and initialization seeds are derived from it.
  std::uint64_t seed = 0;
  InitKind init = InitKind::stream_default;
  double init_scale = 1.0;
  // Solve tolerances for the exact hypergradient measured in every round.
  double metric_solve_tol = 1e-10;
  double metric_inner_tol = 1e-10;
  // Skip writing files; artifacts are still returned.
  bool write_files = true;

  // Throws ConfigError on invalid fields.
  void check() const;
};

// Sub-seeds derived from the master seed.
std::uint64_t stream_seed(std::uint64_t master);
std::uint64_t init_seed(std::uint64_t master);

// Per-round CSV row, in schema column order. Metrics that were disabled are
// left empty and written as empty fields.
struct CsvRow {
  long t = 1;
  std::optional<double> blr_instant;
  std::optional<double> blr_cumulative;
  std::optional<double> blr_static_cumulative;
  std::optional<double> hg_error;
  double inner_err = 0.0;
  std::optional<double> h2_increment;
  std::optional<double> v1_increment;
  double x_norm = 0.0;
  double y_norm = 0.0;
  std::optional<std::int64_t> wallclock_ns;
};

inline constexpr const char* kCsvSchemaVersion = "obo-run-csv/1";
const std::vector<std::string>& csv_columns();

struct RunSummary {
  std::string run_id;
  std::string optimizer;
  bool ok = true;
  std::string error;
  std::optional<long> failed_round;
  long rounds_completed = 0;
  double final_blr_cumulative = 0.0;
  double final_blr_average = 0.0;  // cumulative / rounds
  std::optional<double> final_blr_static_cumulative;
  double mean_hg_error_last10 = 0.0;
  double v1_proxy = 0.0;
  double h2_proxy = 0.0;
  std::int64_t total_wallclock_ns = 0;
  RegularityConstants constants{};
  ValidationResult validation{};
};

struct ArtifactSet {
  RunSummary summary;
  std::vector<CsvRow> rows;
  RunLog log;
  std::optional<std::filesystem::path> csv_path;
  std::optional<std::filesystem::path> json_path;
};

// Drives the configured optimizer over the stream, measures every round and
// writes <output_dir>/<run_id>.csv and <run_id>.json.
ArtifactSet run_experiment(const ExperimentConfig& cfg);

enum class SweepAxis { eta, k_window, n_inner, alpha, beta };
SweepAxis sweep_axis_from_string(const std::string& name);
const char* to_string(SweepAxis axis);

struct SweepResult {
  SweepAxis axis{};
  std::vector<double> values;
  std::vector<RunSummary> runs;  // same order as values
  std::optional<std::filesystem::path> summary_path;
};

// One run per value with a shared seed. A failing run is recorded in its
// summary and does not stop the others.
SweepResult run_sweep(const ExperimentConfig& base, SweepAxis axis, const std::vector<double>& values);

struct CompareResult {
  std::vector<RunSummary> runs;
  std::string table;  // human-readable side-by-side summary
  std::optional<std::filesystem::path> summary_path;
};

CompareResult run_compare(const std::vector<ExperimentConfig>& configs,
                          const std::filesystem::path& out_dir);

// Oracle self-test on the first rounds plus config validation.
struct CheckResult {
  std::vector<std::string> lines;
  bool oracles_ok = true;
  ValidationResult validation{};
};

CheckResult run_check(const ExperimentConfig& cfg, int probes_per_round = 3, long rounds = 3);

// TOML config loading. Unknown keys are rejected with ConfigError.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
ExperimentConfig parse_experiment_config(const std::string& toml_text,
                                         const std::filesystem::path& base_dir = {});

// Serialization helpers shared with the CLI.
std::string format_csv(const std::vector<CsvRow>& rows);
std::string summary_json(const RunSummary& summary, const ExperimentConfig& cfg);
// Shortest round-trip decimal form.
std::string format_number(double value);

}  // namespace obo
