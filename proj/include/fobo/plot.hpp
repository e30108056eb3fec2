#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace fobo {

class PlotError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PlotSeries {
  std::string name;
  std::vector<double> iterations;
  std::vector<double> values;
};

/// Reads the per-algorithm series of a summary.csv (mean log10 regret).
std::vector<PlotSeries> read_summary_series(const std::filesystem::path& path);

/// Standalone SVG 1.1 with one polyline and one legend entry per series.
std::string render_regret_svg(const std::vector<PlotSeries>& series);

/// Plots every algorithm found in the given summaries. All must share one
/// iteration grid; nothing is written on error.
void plot_regret(const std::vector<std::filesystem::path>& summaries, const std::filesystem::path& out);

}  // namespace fobo
