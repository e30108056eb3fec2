#include "fobo/experiment.hpp"

#include "fobo/plot.hpp"

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace fobo {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::size_t parse_count(const std::string& key, const std::string& value) {
  std::size_t out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw ConfigError("config: '" + key + "' expects a non-negative integer, got '" + value + "'", value);
  return out;
}

double parse_real(const std::string& key, const std::string& value) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(out))
    throw ConfigError("config: '" + key + "' expects a real number, got '" + value + "'", value);
  return out;
}

bool parse_flag(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("config: '" + key + "' expects true or false, got '" + value + "'", value);
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << body;
}

}  // namespace

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_header() {
  return "run_id,algorithm,benchmark,iteration,best_true_value,immediate_regret,log10_regret,wall_time_ms,seed";
}

std::string summary_header() {
  return "algorithm,iteration,runs,mean_log10_regret,stderr_log10_regret,mean_regret";
}

void ExperimentConfig::validate() const {
  if (runs < 1) throw ConfigError("config: runs must be at least 1", "runs");
  if (restarts_k < 1) throw ConfigError("config: restarts_k must be at least 1", "restarts_k");
  if (initial_points < 2) throw ConfigError("config: initial_points must be at least 2", "initial_points");
  if (gp_restarts < 1) throw ConfigError("config: gp_restarts must be at least 1", "gp_restarts");
  if (algorithms.empty()) throw ConfigError("config: no algorithms selected", "algorithms");
  if (!(noise_variance >= 0.0)) throw ConfigError("config: noise_variance must be >= 0", "noise_variance");
  if (!(eps_grad > 0.0)) throw ConfigError("config: eps_grad must be > 0", "eps_grad");
}

std::vector<AlgorithmId> parse_algorithm_list(const std::string& csv) {
  std::vector<AlgorithmId> out;
  std::istringstream in(csv);
  std::string token;
  while (std::getline(in, token, ',')) {
    token = trim(token);
    if (token.empty()) continue;
    const auto id = parse_algorithm(token);
    if (!id) throw ConfigError("unknown algorithm '" + token + "'", token);
    if (std::find(out.begin(), out.end(), *id) == out.end()) out.push_back(*id);
  }
  if (out.empty()) throw ConfigError("empty algorithm list", csv);
  return out;
}

void apply_setting(ExperimentConfig& c, const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  if (key == "benchmark") {
    const auto id = parse_benchmark(value);
    if (!id) throw ConfigError("unknown benchmark '" + value + "'", value);
    c.benchmark = *id;
  } else if (key == "algorithms") {
    c.algorithms = parse_algorithm_list(value);
  } else if (key == "budget") {
    c.budget = parse_count(key, value);
  } else if (key == "initial_points") {
    c.initial_points = parse_count(key, value);
  } else if (key == "runs") {
    c.runs = parse_count(key, value);
  } else if (key == "restarts_k") {
    c.restarts_k = parse_count(key, value);
  } else if (key == "noise_variance") {
    c.noise_variance = parse_real(key, value);
  } else if (key == "alpha") {
    c.alpha = parse_real(key, value);
  } else if (key == "alpha_schedule") {
    if (value == "constant") c.alpha_schedule = AlphaSchedule::constant;
    else if (value == "decaying") c.alpha_schedule = AlphaSchedule::decaying;
    else throw ConfigError("unknown alpha_schedule '" + value + "'", value);
  } else if (key == "eps_grad") {
    c.eps_grad = parse_real(key, value);
  } else if (key == "eps_pi") {
    c.eps_pi = parse_real(key, value);
  } else if (key == "master_seed") {
    std::uint64_t seed = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), seed);
    if (ec != std::errc() || ptr != value.data() + value.size())
      throw ConfigError("config: master_seed expects an unsigned integer, got '" + value + "'", value);
    c.master_seed = seed;
  } else if (key == "output_dir") {
    c.output_dir = value;
  } else if (key == "gp_restarts") {
    c.gp_restarts = parse_count(key, value);
  } else if (key == "seed_sampling") {
    if (value == "uniform") c.seed_sampling = SeedSampling::uniform;
    else if (value == "halton") c.seed_sampling = SeedSampling::halton;
    else throw ConfigError("unknown seed_sampling '" + value + "'", value);
  } else if (key == "record_timing") {
    c.record_timing = parse_flag(key, value);
  } else {
    throw ConfigError("unknown config key '" + key + "'", key);
  }
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig config;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value", line);
    apply_setting(config, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string(), path.string());
  return parse_config(in);
}

LoopConfig loop_config_for(const ExperimentConfig& c, AlgorithmId algorithm, std::size_t run_id) {
  LoopConfig loop;
  loop.algorithm = algorithm;
  loop.budget = c.budget;
  loop.initial_points = c.initial_points;
  loop.restarts_k = c.restarts_k;
  loop.alpha = c.alpha;
  loop.alpha_schedule = c.alpha_schedule;
  loop.eps_grad = c.eps_grad;
  loop.eps_pi = c.eps_pi;
  loop.gp_restarts = c.gp_restarts;
  loop.seed = c.master_seed + run_id;
  loop.seed_sampling = c.seed_sampling;
  return loop;
}

std::vector<AlgorithmRuns> execute_runs(const ExperimentConfig& config, std::size_t jobs) {
  config.validate();
  const BenchmarkSpec spec = benchmark_spec(config.benchmark);
  const Problem problem = make_problem(spec, config.noise_variance);

  std::vector<AlgorithmRuns> results;
  for (AlgorithmId a : config.algorithms) results.push_back({a, std::vector<RunResult>(config.runs)});

  const std::size_t tasks = config.algorithms.size() * config.runs;
  const int threads = static_cast<int>(jobs > 0 ? jobs : static_cast<std::size_t>(omp_get_num_procs()));
  omp_set_max_active_levels(1);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::size_t t = 0; t < tasks; ++t) {
    const std::size_t a = t / config.runs;
    const std::size_t r = t % config.runs;
    const LoopConfig loop = loop_config_for(config, config.algorithms[a], r);
    try {
      results[a].runs[r] = run(problem, loop);
    } catch (const std::exception& ex) {
      results[a].runs[r].failure = ex.what();
    }
  }
  return results;
}

std::vector<SummaryRow> summarize(const std::vector<AlgorithmRuns>& results) {
  std::vector<SummaryRow> rows;
  std::vector<const AlgorithmRuns*> order;
  for (const auto& r : results) order.push_back(&r);
  std::sort(order.begin(), order.end(), [](const AlgorithmRuns* a, const AlgorithmRuns* b) {
    return algorithm_name(a->algorithm) < algorithm_name(b->algorithm);
  });
  for (const AlgorithmRuns* alg : order) {
    std::size_t longest = 0;
    for (const RunResult& r : alg->runs) longest = std::max(longest, r.trace.size());
    for (std::size_t it = 0; it < longest; ++it) {
      std::vector<double> logs;
      double regret_sum = 0.0;
      for (const RunResult& r : alg->runs) {
        if (it < r.trace.size()) {
          logs.push_back(r.trace[it].log10_regret);
          regret_sum += r.trace[it].immediate_regret;
        }
      }
      SummaryRow row;
      row.algorithm = std::string(algorithm_name(alg->algorithm));
      row.iteration = it;
      row.runs = logs.size();
      double sum = 0.0;
      for (double v : logs) sum += v;
      const double m = static_cast<double>(logs.size());
      row.mean_log10_regret = sum / m;
      row.mean_regret = regret_sum / m;
      if (logs.size() > 1) {
        double ss = 0.0;
        for (double v : logs) ss += (v - row.mean_log10_regret) * (v - row.mean_log10_regret);
        row.stderr_log10_regret = std::sqrt(ss / (m - 1.0)) / std::sqrt(m);
      }
      rows.push_back(row);
    }
  }
  return rows;
}

std::size_t run_experiment(const ExperimentConfig& config, std::size_t jobs) {
  const auto results = execute_runs(config, jobs);
  const std::string bench(benchmark_name(config.benchmark));
  std::filesystem::create_directories(config.output_dir);

  std::ostringstream failures;
  std::size_t failed = 0;
  for (const AlgorithmRuns& alg : results) {
    const std::string name(algorithm_name(alg.algorithm));
    std::ostringstream csv;
    csv << csv_header() << '\n';
    for (std::size_t r = 0; r < alg.runs.size(); ++r) {
      const RunResult& run = alg.runs[r];
      const std::uint64_t seed = config.master_seed + r;
      for (const RegretEntry& e : run.trace) {
        csv << r << ',' << name << ',' << bench << ',' << e.iteration << ',' << format_number(e.best_true_value)
            << ',' << format_number(e.immediate_regret) << ',' << format_number(e.log10_regret) << ','
            << (config.record_timing ? format_number(e.wall_time_ms) : std::string()) << ',' << seed << '\n';
      }
      if (run.failure) {
        ++failed;
        std::string msg = *run.failure;
        std::replace(msg.begin(), msg.end(), ',', ';');
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        failures << r << ',' << name << ',' << seed << ',' << run.trace.size() << ',' << msg << '\n';
      }
    }
    write_file(config.output_dir / (bench + "_" + name + ".csv"), csv.str());
  }

  std::ostringstream summary;
  summary << summary_header() << '\n';
  for (const SummaryRow& row : summarize(results)) {
    summary << row.algorithm << ',' << row.iteration << ',' << row.runs << ','
            << format_number(row.mean_log10_regret) << ',' << format_number(row.stderr_log10_regret) << ','
            << format_number(row.mean_regret) << '\n';
  }
  const auto summary_path = config.output_dir / "summary.csv";
  write_file(summary_path, summary.str());
  if (failed > 0) {
    write_file(config.output_dir / "failures.csv",
               "run_id,algorithm,seed,completed_entries,message\n" + failures.str());
  } else {
    std::filesystem::remove(config.output_dir / "failures.csv");
  }
  plot_regret({summary_path}, config.output_dir / "regret.svg");
  return failed;
}

}  // namespace fobo
