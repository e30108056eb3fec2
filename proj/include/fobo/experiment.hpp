#pragma once

#include "fobo/bench.hpp"
#include "fobo/loop.hpp"

#include <cstdint>
#include <filesystem>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fobo {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::string token)
      : std::runtime_error(what), token_(std::move(token)) {}
  const std::string& token() const noexcept { return token_; }

 private:
  std::string token_;
};

struct ExperimentConfig {
  BenchmarkId benchmark = BenchmarkId::branin;
  std::vector<AlgorithmId> algorithms{AlgorithmId::gpi_ms};
  std::size_t budget = 200;
  std::size_t initial_points = 5;
  std::size_t runs = 1;
  std::size_t restarts_k = 10;
  double noise_variance = 0.25;
  double alpha = 1.0;
  AlphaSchedule alpha_schedule = AlphaSchedule::constant;
  double eps_grad = 0.05;
  double eps_pi = 0.01;
  std::uint64_t master_seed = 0;
  std::filesystem::path output_dir = "results";
  std::size_t gp_restarts = 5;
  SeedSampling seed_sampling = SeedSampling::uniform;
  /// Wall-clock columns make CSVs non-reproducible, so they are opt-in.
  bool record_timing = false;

  void validate() const;
};

/// Sets one `key = value` entry. Throws ConfigError naming the bad key or value.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Flat `key = value` lines; '#' starts a comment.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

std::vector<AlgorithmId> parse_algorithm_list(const std::string& csv);

LoopConfig loop_config_for(const ExperimentConfig& config, AlgorithmId algorithm, std::size_t run_id);

struct AlgorithmRuns {
  AlgorithmId algorithm;
  std::vector<RunResult> runs;  // indexed by run_id
};

struct SummaryRow {
  std::string algorithm;
  std::size_t iteration = 0;
  std::size_t runs = 0;
  double mean_log10_regret = 0.0;
  double stderr_log10_regret = 0.0;
  double mean_regret = 0.0;
};

/// Per-algorithm mean and standard error of log10 regret at each iteration,
/// sorted by (algorithm, iteration).
std::vector<SummaryRow> summarize(const std::vector<AlgorithmRuns>& results);

/// Runs every (algorithm, run) pair on up to `jobs` threads (0 = all cores).
std::vector<AlgorithmRuns> execute_runs(const ExperimentConfig& config, std::size_t jobs);

/// execute_runs plus all output files. Returns the number of failed runs.
std::size_t run_experiment(const ExperimentConfig& config, std::size_t jobs);

std::string format_number(double v);
std::string csv_header();
std::string summary_header();

}  // namespace fobo
