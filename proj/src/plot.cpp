#include "fobo/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace fobo {
namespace {

constexpr double kWidth = 720.0, kHeight = 450.0;
constexpr double kLeft = 70.0, kRight = 170.0, kTop = 30.0, kBottom = 50.0;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::vector<PlotSeries> read_summary_series(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PlotError("cannot read summary " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw PlotError("empty summary " + path.string());
  const auto header = split(line, ',');
  const auto column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw PlotError(path.string() + ": missing column " + name);
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t c_alg = column("algorithm");
  const std::size_t c_it = column("iteration");
  const std::size_t c_val = column("mean_log10_regret");

  std::vector<PlotSeries> series;
  std::map<std::string, std::size_t> index;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() < header.size()) throw PlotError(path.string() + ": short row: " + line);
    const std::string& name = fields[c_alg];
    auto [it, inserted] = index.try_emplace(name, series.size());
    if (inserted) series.push_back({name, {}, {}});
    PlotSeries& s = series[it->second];
    s.iterations.push_back(std::stod(fields[c_it]));
    s.values.push_back(std::stod(fields[c_val]));
  }
  return series;
}

std::string render_regret_svg(const std::vector<PlotSeries>& series) {
  if (series.empty()) throw PlotError("no series to plot");
  double x_lo = INFINITY, x_hi = -INFINITY, y_lo = INFINITY, y_hi = -INFINITY;
  for (const PlotSeries& s : series) {
    for (double x : s.iterations) x_lo = std::min(x_lo, x), x_hi = std::max(x_hi, x);
    for (double y : s.values) y_lo = std::min(y_lo, y), y_hi = std::max(y_hi, y);
  }
  if (!(x_hi > x_lo)) x_hi = x_lo + 1.0;
  if (!(y_hi > y_lo)) {
    y_lo -= 0.5;
    y_hi += 0.5;
  }
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const auto sx = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * plot_w; };
  const auto sy = [&](double y) { return kTop + (y_hi - y) / (y_hi - y_lo) * plot_h; };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n"
      << "<g id=\"axes\" stroke=\"black\" stroke-width=\"1\">\n"
      << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(kTop + plot_h) << "\" x2=\"" << fmt(kLeft + plot_w)
      << "\" y2=\"" << fmt(kTop + plot_h) << "\"/>\n"
      << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(kTop) << "\" x2=\"" << fmt(kLeft) << "\" y2=\""
      << fmt(kTop + plot_h) << "\"/>\n"
      << "</g>\n<g id=\"ticks\" font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = x_lo + (x_hi - x_lo) * t / 4.0;
    const double yv = y_lo + (y_hi - y_lo) * t / 4.0;
    svg << "<text x=\"" << fmt(sx(xv)) << "\" y=\"" << fmt(kTop + plot_h + 16) << "\" text-anchor=\"middle\">"
        << fmt(xv) << "</text>\n"
        << "<text x=\"" << fmt(kLeft - 6) << "\" y=\"" << fmt(sy(yv) + 4) << "\" text-anchor=\"end\">" << fmt(yv)
        << "</text>\n";
  }
  svg << "</g>\n"
      << "<text x=\"" << fmt(kLeft + plot_w / 2) << "\" y=\"" << fmt(kHeight - 10)
      << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">iteration</text>\n"
      << "<text x=\"16\" y=\"" << fmt(kTop + plot_h / 2) << "\" font-family=\"sans-serif\" font-size=\"13\" "
      << "text-anchor=\"middle\" transform=\"rotate(-90 16 " << fmt(kTop + plot_h / 2)
      << ")\">mean log10 immediate regret</text>\n";

  svg << "<g id=\"series\" fill=\"none\" stroke-width=\"1.5\">\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const PlotSeries& s = series[i];
    svg << "<polyline stroke=\"" << kPalette[i % std::size(kPalette)] << "\" data-name=\"" << escape(s.name)
        << "\" points=\"";
    for (std::size_t j = 0; j < s.values.size(); ++j) {
      if (j) svg << ' ';
      svg << fmt(sx(s.iterations[j])) << ',' << fmt(sy(s.values[j]));
    }
    svg << "\"/>\n";
  }
  svg << "</g>\n<g id=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double y = kTop + 10 + 20.0 * static_cast<double>(i);
    const double x = kLeft + plot_w + 15;
    svg << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(x + 25) << "\" y2=\"" << fmt(y)
        << "\" stroke=\"" << kPalette[i % std::size(kPalette)] << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << fmt(x + 32) << "\" y=\"" << fmt(y + 4) << "\">" << escape(series[i].name)
        << "</text>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

void plot_regret(const std::vector<std::filesystem::path>& summaries, const std::filesystem::path& out) {
  if (summaries.empty()) throw PlotError("plot: no summary files given");
  std::vector<PlotSeries> all;
  std::vector<double> grid;
  std::vector<std::string> offending;
  std::string grid_owner;
  for (const auto& path : summaries) {
    for (PlotSeries& s : read_summary_series(path)) {
      if (grid_owner.empty()) {
        grid = s.iterations;
        grid_owner = path.string();
      } else if (s.iterations != grid) {
        offending.push_back(path.string());
      }
      all.push_back(std::move(s));
    }
  }
  if (!offending.empty()) {
    std::string msg = "plot: iteration grid differs from " + grid_owner + " in:";
    std::sort(offending.begin(), offending.end());
    offending.erase(std::unique(offending.begin(), offending.end()), offending.end());
    for (const auto& f : offending) msg += " " + f;
    throw PlotError(msg);
  }
  const std::string svg = render_regret_svg(all);
  std::ofstream file(out, std::ios::binary);
  if (!file) throw PlotError("plot: cannot write " + out.string());
  file << svg;
}

}  // namespace fobo
