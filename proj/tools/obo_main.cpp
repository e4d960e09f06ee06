// obo: run, sweep, compare and check online bilevel experiments.
#include <cstdlib>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "obo/errors.hpp"
#include "obo/runner.hpp"

namespace {

constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("obo");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  const char* env = std::getenv("OBO_LOG_LEVEL");
  if (!env || !*env) return;
  const std::string level = env;
  if (level == "error") {
    spdlog::set_level(spdlog::level::err);
  } else if (level == "warn") {
    spdlog::set_level(spdlog::level::warn);
  } else if (level == "info") {
    spdlog::set_level(spdlog::level::info);
  } else if (level == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else {
    throw obo::ConfigError("OBO_LOG_LEVEL must be one of error, warn, info, debug (got '" + level + "')");
  }
}

std::vector<double> parse_values(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw obo::ConfigError("not a number in --values: '" + item + "'");
    out.push_back(v);
  }
  return out;
}

void print_summary(const obo::RunSummary& s) {
  std::cout << s.run_id << ": " << (s.ok ? "ok" : "FAILED") << ", " << s.rounds_completed
            << " rounds, cumulative BLR " << obo::format_number(s.final_blr_cumulative) << ", tail hg error "
            << obo::format_number(s.mean_hg_error_last10) << "\n";
  if (!s.ok) std::cout << "  error: " << s.error << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online bilevel optimization experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;

  auto* run = app.add_subcommand("run", "Run one experiment");
  run->add_option("--config", config_path, "TOML config file")->required()->check(CLI::ExistingFile);
  auto* run_out = run->add_option("--out", out_dir, "Output directory (overrides the config)");
  auto* run_seed = run->add_option("--seed", seed, "Master seed (overrides the config)");

  std::string axis;
  std::string values;
  auto* sweep = app.add_subcommand("sweep", "Run one experiment per value of a parameter");
  sweep->add_option("--config", config_path, "TOML config file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--axis", axis, "eta, k_window, n_inner, alpha or beta")->required();
  sweep->add_option("--values", values, "Comma-separated values")->required();
  auto* sweep_out = sweep->add_option("--out", out_dir, "Output directory (overrides the config)");

  std::vector<std::string> config_paths;
  auto* compare = app.add_subcommand("compare", "Run several configs and print a side-by-side table");
  compare->add_option("--configs", config_paths, "TOML config files")->required()->check(CLI::ExistingFile);
  compare->add_option("--out", out_dir, "Output directory")->required();

  auto* check = app.add_subcommand("check", "Oracle self-tests and config validation");
  check->add_option("--config", config_path, "TOML config file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    setup_logging();
    if (run->parsed()) {
      obo::ExperimentConfig cfg = obo::load_experiment_config(config_path);
      if (*run_out) cfg.output_dir = out_dir;
      if (*run_seed) cfg.seed = seed;
      const obo::ArtifactSet artifacts = obo::run_experiment(cfg);
      print_summary(artifacts.summary);
      if (artifacts.csv_path) std::cout << "  wrote " << artifacts.csv_path->string() << "\n";
      if (artifacts.json_path) std::cout << "  wrote " << artifacts.json_path->string() << "\n";
      return artifacts.summary.ok ? 0 : kRuntimeError;
    }
    if (sweep->parsed()) {
      obo::ExperimentConfig cfg = obo::load_experiment_config(config_path);
      if (*sweep_out) cfg.output_dir = out_dir;
      const auto result = obo::run_sweep(cfg, obo::sweep_axis_from_string(axis), parse_values(values));
      bool all_ok = true;
      for (const auto& s : result.runs) {
        print_summary(s);
        all_ok = all_ok && s.ok;
      }
      if (result.summary_path) std::cout << "wrote " << result.summary_path->string() << "\n";
      return all_ok ? 0 : kRuntimeError;
    }
    if (compare->parsed()) {
      std::vector<obo::ExperimentConfig> configs;
      for (const auto& p : config_paths) configs.push_back(obo::load_experiment_config(p));
      const auto result = obo::run_compare(configs, out_dir);
      std::cout << result.table;
      bool all_ok = true;
      for (const auto& s : result.runs) all_ok = all_ok && s.ok;
      return all_ok ? 0 : kRuntimeError;
    }
    if (check->parsed()) {
      const obo::ExperimentConfig cfg = obo::load_experiment_config(config_path);
      const auto result = obo::run_check(cfg);
      for (const auto& line : result.lines) std::cout << line << "\n";
      std::cout << "oracles: " << (result.oracles_ok ? "ok" : "FAILED") << ", conditions: "
                << (result.validation.all_passed() ? "all met" : "some not met") << "\n";
      return result.oracles_ok ? 0 : kRuntimeError;
    }
  } catch (const obo::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return 0;
}
