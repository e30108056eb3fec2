// fobo: experiment runner and regret plotter.
//
//   fobo run --config exp.cfg [--jobs N] [--benchmark T] [--algorithms a,b] [--seed S] [--out DIR]
//   fobo plot --out regret.svg summary.csv [more.csv ...]

#include "fobo/experiment.hpp"
#include "fobo/plot.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <thread>

int main(int argc, char** argv) {
  CLI::App app{"First-order Bayesian optimization experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
  std::string benchmark, algorithms, out_dir;
  std::uint64_t seed = 0;
  auto* run_cmd = app.add_subcommand("run", "Run an experiment described by a config file");
  run_cmd->add_option("--config", config_path, "key = value config file")->required();
  run_cmd->add_option("--jobs", jobs, "Worker threads (default: all cores)");
  auto* bench_opt = run_cmd->add_option("--benchmark", benchmark, "Override benchmark");
  auto* algo_opt = run_cmd->add_option("--algorithms", algorithms, "Override algorithms (comma separated)");
  auto* seed_opt = run_cmd->add_option("--seed", seed, "Override master seed");
  auto* out_opt = run_cmd->add_option("--out", out_dir, "Override output directory");

  std::string plot_out;
  std::vector<std::string> summaries;
  auto* plot_cmd = app.add_subcommand("plot", "Plot mean log10 regret from summary CSVs");
  plot_cmd->add_option("--out", plot_out, "Output SVG path")->required();
  plot_cmd->add_option("summaries", summaries, "summary.csv files");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      fobo::ExperimentConfig config = fobo::load_config(config_path);
      if (*bench_opt) fobo::apply_setting(config, "benchmark", benchmark);
      if (*algo_opt) fobo::apply_setting(config, "algorithms", algorithms);
      if (*seed_opt) config.master_seed = seed;
      if (*out_opt) config.output_dir = out_dir;
      config.validate();
      const std::size_t failed = fobo::run_experiment(config, jobs);
      std::cout << "wrote results to " << config.output_dir.string() << '\n';
      if (failed > 0) {
        std::cerr << failed << " run(s) failed; see failures.csv\n";
        return 3;
      }
      return 0;
    }
    std::vector<std::filesystem::path> paths(summaries.begin(), summaries.end());
    fobo::plot_regret(paths, plot_out);
    return 0;
  } catch (const fobo::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
