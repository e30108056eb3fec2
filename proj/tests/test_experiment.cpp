#include "fobo/experiment.hpp"
#include "fobo/plot.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

using namespace fobo;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("fobo_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

ExperimentConfig tiny_config(const fs::path& out) {
  ExperimentConfig c;
  c.benchmark = BenchmarkId::branin;
  c.algorithms = {AlgorithmId::gpi_ms};
  c.runs = 2;
  c.budget = 3;
  c.restarts_k = 2;
  c.gp_restarts = 2;
  c.master_seed = 11;
  c.output_dir = out;
  return c;
}

int run_cli(const std::string& args, const fs::path& stderr_file) {
  const std::string cmd = std::string(FOBO_CLI_PATH) + " " + args + " > /dev/null 2> " + stderr_file.string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write_summary(const fs::path& p, const std::string& alg, const std::vector<double>& values) {
  std::ofstream out(p);
  out << summary_header() << '\n';
  for (std::size_t i = 0; i < values.size(); ++i)
    out << alg << ',' << i << ",3," << format_number(values[i]) << ",0.1," << format_number(std::pow(10.0, values[i]))
        << '\n';
}

}  // namespace

TEST_CASE("config parsing") {
  std::istringstream in(
      "# comment line\n"
      "benchmark = hartmann6\n"
      "algorithms = gEI-MS, ZOBO-EI\n"
      "budget = 40   # trailing comment\n"
      "runs = 3\n"
      "\n"
      "noise_variance = 0.1\n"
      "alpha_schedule = decaying\n"
      "master_seed = 123\n"
      "output_dir = out/here\n"
      "seed_sampling = halton\n");
  const ExperimentConfig c = parse_config(in);
  CHECK(c.benchmark == BenchmarkId::hartmann6);
  REQUIRE(c.algorithms.size() == 2);
  CHECK(c.algorithms[0] == AlgorithmId::gei_ms);
  CHECK(c.algorithms[1] == AlgorithmId::zobo_ei);
  CHECK(c.budget == 40);
  CHECK(c.runs == 3);
  CHECK(c.noise_variance == 0.1);
  CHECK(c.alpha_schedule == AlphaSchedule::decaying);
  CHECK(c.master_seed == 123);
  CHECK(c.output_dir == fs::path("out/here"));
  CHECK(c.seed_sampling == SeedSampling::halton);
  CHECK(c.initial_points == 5);
  CHECK(c.restarts_k == 10);
}

TEST_CASE("config errors name the offending token") {
  const auto token_of = [](const std::string& text) {
    std::istringstream in(text);
    try {
      parse_config(in).validate();
    } catch (const ConfigError& e) {
      return e.token();
    }
    return std::string("<no error>");
  };
  CHECK(token_of("algorithms = gPI-MS,gXY\n") == "gXY");
  CHECK(token_of("benchmark = rosenbrock\n") == "rosenbrock");
  CHECK(token_of("colour = blue\n") == "colour");
  CHECK(token_of("budget = many\n") == "many");
  CHECK(token_of("no equals sign here\n") == "no equals sign here");
  CHECK(token_of("runs = 0\n") == "runs");
  CHECK(token_of("restarts_k = 0\n") == "restarts_k");
}

TEST_CASE("per-run seeds are master seed plus run id") {
  ExperimentConfig c;
  c.master_seed = 1000;
  CHECK(loop_config_for(c, AlgorithmId::gei_ms, 0).seed == 1000);
  CHECK(loop_config_for(c, AlgorithmId::gpi_msc, 7).seed == 1007);
}

TEST_CASE("run_experiment writes traces, summary and plot") {
  const fs::path dir = scratch_dir("experiment");
  const ExperimentConfig cfg = tiny_config(dir);
  CHECK(run_experiment(cfg, 1) == 0);
  const fs::path trace = dir / "branin_gPI-MS.csv";
  REQUIRE(fs::exists(trace));
  CHECK(fs::exists(dir / "summary.csv"));
  CHECK(fs::exists(dir / "regret.svg"));
  CHECK_FALSE(fs::exists(dir / "failures.csv"));

  const auto rows = read_csv(trace);
  REQUIRE(rows.size() == 1 + 2 * 4);
  CHECK(rows[0].size() == 9);
  std::ostringstream header;
  for (std::size_t i = 0; i < rows[0].size(); ++i) header << (i ? "," : "") << rows[0][i];
  CHECK(header.str() == csv_header());
  for (std::size_t r = 1; r < rows.size(); ++r) {
    REQUIRE(rows[r].size() == 9);
    CHECK(rows[r][0] == std::to_string((r - 1) / 4));
    CHECK(rows[r][1] == "gPI-MS");
    CHECK(rows[r][2] == "branin");
    CHECK(rows[r][3] == std::to_string((r - 1) % 4));
    CHECK(rows[r][7].empty());
    CHECK(rows[r][8] == std::to_string(11 + (r - 1) / 4));
  }

  // Recompute the summary from the raw rows.
  std::map<std::size_t, std::vector<double>> logs, regrets;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    logs[std::stoul(rows[r][3])].push_back(std::stod(rows[r][6]));
    regrets[std::stoul(rows[r][3])].push_back(std::stod(rows[r][5]));
  }
  const auto summary = read_csv(dir / "summary.csv");
  REQUIRE(summary.size() == 1 + 4);
  for (std::size_t r = 1; r < summary.size(); ++r) {
    const std::size_t it = std::stoul(summary[r][1]);
    const auto& v = logs[it];
    const double mean = (v[0] + v[1]) / 2;
    const double sd = std::sqrt(((v[0] - mean) * (v[0] - mean) + (v[1] - mean) * (v[1] - mean)) / 1.0);
    CHECK(summary[r][0] == "gPI-MS");
    CHECK(summary[r][2] == "2");
    CHECK(std::abs(std::stod(summary[r][3]) - mean) <= 1e-12);
    CHECK(std::abs(std::stod(summary[r][4]) - sd / std::sqrt(2.0)) <= 1e-12);
    CHECK(std::abs(std::stod(summary[r][5]) - (regrets[it][0] + regrets[it][1]) / 2) <= 1e-12);
  }
  fs::remove_all(dir);
}

TEST_CASE("timing column is filled only when requested") {
  const fs::path dir = scratch_dir("timing");
  ExperimentConfig cfg = tiny_config(dir);
  cfg.runs = 1;
  cfg.budget = 1;
  cfg.record_timing = true;
  run_experiment(cfg, 1);
  const auto rows = read_csv(dir / "branin_gPI-MS.csv");
  REQUIRE(rows.size() == 3);
  CHECK(std::stod(rows[1][7]) >= 0.0);
  fs::remove_all(dir);
}

TEST_CASE("summaries are sorted by algorithm and iteration") {
  const fs::path dir = scratch_dir("sorted");
  ExperimentConfig cfg = tiny_config(dir);
  cfg.algorithms = {AlgorithmId::zobo_ei, AlgorithmId::fobo_mm};
  cfg.budget = 2;
  const auto results = execute_runs(cfg, 2);
  const auto rows = summarize(results);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].algorithm == "FOBO-MM");
  CHECK(rows[3].algorithm == "ZOBO-EI");
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows[i].iteration == i % 3);
}

TEST_CASE("number formatting round-trips") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double v = n(rng);
    CHECK(std::stod(format_number(v)) == v);
  }
}

TEST_CASE("CLI runs reproduce identical CSV bytes") {
  const fs::path dir = scratch_dir("cli_determinism");
  {
    std::ofstream cfg(dir / "exp.cfg");
    cfg << "benchmark = branin\nalgorithms = gEI-MSC\nruns = 2\nbudget = 2\nrestarts_k = 2\ngp_restarts = 2\n"
           "master_seed = 4\n";
  }
  const fs::path err = dir / "stderr.txt";
  const std::string base = "run --config " + (dir / "exp.cfg").string() + " --jobs 2 --out ";
  REQUIRE(run_cli(base + (dir / "a").string(), err) == 0);
  REQUIRE(run_cli(base + (dir / "b").string(), err) == 0);
  CHECK(slurp(dir / "a" / "summary.csv") == slurp(dir / "b" / "summary.csv"));
  CHECK(slurp(dir / "a" / "branin_gEI-MSC.csv") == slurp(dir / "b" / "branin_gEI-MSC.csv"));
  CHECK_FALSE(slurp(dir / "a" / "summary.csv").empty());

  // Flag overrides take effect.
  REQUIRE(run_cli(base + (dir / "c").string() + " --benchmark levy4 --algorithms ZOBO-EI --seed 9", err) == 0);
  const auto rows = read_csv(dir / "c" / "levy4_ZOBO-EI.csv");
  REQUIRE(rows.size() == 1 + 2 * 3);
  CHECK(rows[1][8] == "9");
  fs::remove_all(dir);
}

TEST_CASE("CLI rejects an unknown algorithm") {
  const fs::path dir = scratch_dir("cli_error");
  {
    std::ofstream cfg(dir / "exp.cfg");
    cfg << "benchmark = branin\nbudget = 1\n";
  }
  const fs::path err = dir / "stderr.txt";
  const int code = run_cli("run --config " + (dir / "exp.cfg").string() + " --algorithms gPI-MS,gXY --out " +
                               (dir / "out").string(),
                           err);
  CHECK(code != 0);
  CHECK(slurp(err).find("gXY") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("plot a constant summary") {
  const fs::path dir = scratch_dir("plot_constant");
  write_summary(dir / "s.csv", "gPI-MS", {0.0, 0.0, 0.0, 0.0});
  const auto series = read_summary_series(dir / "s.csv");
  REQUIRE(series.size() == 1);
  CHECK(series[0].values == std::vector<double>{0.0, 0.0, 0.0, 0.0});
  plot_regret({dir / "s.csv"}, dir / "out.svg");
  const std::string svg = slurp(dir / "out.svg");
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("version=\"1.1\"") != std::string::npos);
  // All vertices of the polyline share one y coordinate.
  const auto start = svg.find("points=\"");
  REQUIRE(start != std::string::npos);
  const auto end = svg.find('"', start + 8);
  std::istringstream pts(svg.substr(start + 8, end - start - 8));
  std::string pair;
  std::vector<std::string> ys;
  while (pts >> pair) ys.push_back(pair.substr(pair.find(',') + 1));
  REQUIRE(ys.size() == 4);
  for (const auto& y : ys) CHECK(y == ys[0]);
  fs::remove_all(dir);
}

TEST_CASE("plot two summaries") {
  const fs::path dir = scratch_dir("plot_two");
  write_summary(dir / "a.csv", "gEI-MS", {1.0, 0.5, 0.2});
  write_summary(dir / "b.csv", "ZOBO-EI", {1.0, 0.8, 0.7});
  plot_regret({dir / "a.csv", dir / "b.csv"}, dir / "out.svg");
  const std::string svg = slurp(dir / "out.svg");
  std::size_t polylines = 0;
  for (auto p = svg.find("<polyline"); p != std::string::npos; p = svg.find("<polyline", p + 1)) ++polylines;
  CHECK(polylines == 2);
  CHECK(svg.find(">gEI-MS<") != std::string::npos);
  CHECK(svg.find(">ZOBO-EI<") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("plot errors leave no output") {
  const fs::path dir = scratch_dir("plot_errors");
  CHECK_THROWS_AS(plot_regret({}, dir / "none.svg"), PlotError);
  CHECK_FALSE(fs::exists(dir / "none.svg"));

  write_summary(dir / "a.csv", "gEI-MS", {1.0, 0.5, 0.2});
  write_summary(dir / "b.csv", "ZOBO-EI", {1.0, 0.8});
  try {
    plot_regret({dir / "a.csv", dir / "b.csv"}, dir / "bad.svg");
    FAIL("expected PlotError");
  } catch (const PlotError& e) {
    CHECK(std::string(e.what()).find("b.csv") != std::string::npos);
  }
  CHECK_FALSE(fs::exists(dir / "bad.svg"));

  const fs::path err = dir / "stderr.txt";
  CHECK(run_cli("plot --out " + (dir / "cli.svg").string(), err) != 0);
  CHECK_FALSE(fs::exists(dir / "cli.svg"));
  fs::remove_all(dir);
}
