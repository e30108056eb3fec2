#include "fobo/bench.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fobo {
namespace {

using std::numbers::pi;

// Each returns the standard (minimization) form and fills its gradient.

double branin(const Point& x, Point& g) {
  constexpr double a = 1.0, r = 6.0, s = 10.0;
  const double b = 5.1 / (4.0 * pi * pi), c = 5.0 / pi, t = 1.0 / (8.0 * pi);
  const double u = x[1] - b * x[0] * x[0] + c * x[0] - r;
  g.resize(2);
  g[0] = 2.0 * a * u * (-2.0 * b * x[0] + c) - s * (1.0 - t) * std::sin(x[0]);
  g[1] = 2.0 * a * u;
  return a * u * u + s * (1.0 - t) * std::cos(x[0]) + s;
}

double levy(const Point& x, Point& g) {
  const Eigen::Index d = x.size();
  g.resize(d);
  const Point w = (x.array() - 1.0) / 4.0 + 1.0;
  double f = std::pow(std::sin(pi * w[0]), 2);
  Point dw = Point::Zero(d);
  dw[0] += pi * std::sin(2.0 * pi * w[0]);
  for (Eigen::Index i = 0; i + 1 < d; ++i) {
    const double e = w[i] - 1.0;
    const double sn = std::sin(pi * w[i] + 1.0);
    f += e * e * (1.0 + 10.0 * sn * sn);
    dw[i] += 2.0 * e * (1.0 + 10.0 * sn * sn) + e * e * 10.0 * pi * std::sin(2.0 * (pi * w[i] + 1.0));
  }
  const double e = w[d - 1] - 1.0;
  const double sl = std::sin(2.0 * pi * w[d - 1]);
  f += e * e * (1.0 + sl * sl);
  dw[d - 1] += 2.0 * e * (1.0 + sl * sl) + e * e * 2.0 * pi * std::sin(4.0 * pi * w[d - 1]);
  g = dw / 4.0;
  return f;
}

double ackley(const Point& x, Point& g) {
  constexpr double a = 20.0, b = 0.2, c = 2.0 * pi;
  const double d = static_cast<double>(x.size());
  const double r = std::sqrt(x.squaredNorm() / d);
  double cos_sum = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) cos_sum += std::cos(c * x[i]);
  const double e1 = std::exp(-b * r);
  const double e2 = std::exp(cos_sum / d);
  g.resize(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    // The radial term has a cusp at the origin; use the zero subgradient there.
    const double radial = r > 0.0 ? a * b * e1 * x[i] / (d * r) : 0.0;
    g[i] = radial + e2 * c * std::sin(c * x[i]) / d;
  }
  return -a * e1 - e2 + a + std::numbers::e;
}

double dixon_price(const Point& x, Point& g) {
  g = Point::Zero(x.size());
  double f = (x[0] - 1.0) * (x[0] - 1.0);
  g[0] = 2.0 * (x[0] - 1.0);
  for (Eigen::Index i = 1; i < x.size(); ++i) {
    const double weight = static_cast<double>(i + 1);
    const double t = 2.0 * x[i] * x[i] - x[i - 1];
    f += weight * t * t;
    g[i] += 2.0 * weight * t * 4.0 * x[i];
    g[i - 1] -= 2.0 * weight * t;
  }
  return f;
}

constexpr std::array<double, 4> kHartAlpha = {1.0, 1.2, 3.0, 3.2};
constexpr double kHartA[4][6] = {{10, 3, 17, 3.5, 1.7, 8},
                                 {0.05, 10, 17, 0.1, 8, 14},
                                 {3, 3.5, 1.7, 10, 17, 8},
                                 {17, 8, 0.05, 10, 0.1, 14}};
constexpr double kHartP[4][6] = {{0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886},
                                 {0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991},
                                 {0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650},
                                 {0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381}};

double hartmann6(const Point& x, Point& g) {
  g = Point::Zero(6);
  double f = 0.0;
  for (int i = 0; i < 4; ++i) {
    double inner = 0.0;
    for (int j = 0; j < 6; ++j) inner += kHartA[i][j] * std::pow(x[j] - kHartP[i][j], 2);
    const double term = kHartAlpha[static_cast<std::size_t>(i)] * std::exp(-inner);
    f -= term;
    for (int j = 0; j < 6; ++j) g[j] += term * 2.0 * kHartA[i][j] * (x[j] - kHartP[i][j]);
  }
  return f;
}

double cosine_mixture(const Point& x, Point& g) {
  g.resize(x.size());
  double f = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    f += x[i] * x[i] - 0.1 * std::cos(5.0 * pi * x[i]);
    g[i] = 2.0 * x[i] + 0.5 * pi * std::sin(5.0 * pi * x[i]);
  }
  return f;
}

Point filled(Eigen::Index d, double v) { return Point::Constant(d, v); }

}  // namespace

std::string_view benchmark_name(BenchmarkId id) {
  switch (id) {
    case BenchmarkId::branin: return "branin";
    case BenchmarkId::levy4: return "levy4";
    case BenchmarkId::ackley5: return "ackley5";
    case BenchmarkId::dixonprice5: return "dixonprice5";
    case BenchmarkId::hartmann6: return "hartmann6";
    case BenchmarkId::cosine8: return "cosine8";
    case BenchmarkId::reg6d: return "reg6d";
  }
  return "unknown";
}

std::vector<BenchmarkId> all_benchmarks() {
  return {BenchmarkId::branin,    BenchmarkId::levy4,   BenchmarkId::ackley5, BenchmarkId::dixonprice5,
          BenchmarkId::hartmann6, BenchmarkId::cosine8, BenchmarkId::reg6d};
}

std::optional<BenchmarkId> parse_benchmark(std::string_view name) {
  for (BenchmarkId id : all_benchmarks())
    if (benchmark_name(id) == name) return id;
  return std::nullopt;
}

BenchmarkSpec benchmark_spec(BenchmarkId id) {
  const std::string name(benchmark_name(id));
  switch (id) {
    case BenchmarkId::branin: {
      Point lo(2), hi(2), opt(2);
      lo << -5.0, 0.0;
      hi << 10.0, 15.0;
      opt << pi, 2.275;
      return {id, name, Domain(lo, hi), -0.39788735772973816, opt};
    }
    case BenchmarkId::levy4:
      return {id, name, Domain(filled(4, -10.0), filled(4, 10.0)), 0.0, filled(4, 1.0)};
    case BenchmarkId::ackley5:
      return {id, name, Domain(filled(5, -32.768), filled(5, 32.768)), 0.0, filled(5, 0.0)};
    case BenchmarkId::dixonprice5: {
      Point opt(5);
      for (int i = 0; i < 5; ++i) {
        const double p = std::pow(2.0, i + 1);
        opt[i] = std::pow(2.0, -(p - 2.0) / p);
      }
      return {id, name, Domain(filled(5, -10.0), filled(5, 10.0)), 0.0, opt};
    }
    case BenchmarkId::hartmann6: {
      Point opt(6);
      opt << 0.20168952, 0.15001069, 0.47687398, 0.27533243, 0.31165162, 0.65730054;
      return {id, name, Domain(filled(6, 0.0), filled(6, 1.0)), 3.3223680114155147, opt};
    }
    case BenchmarkId::cosine8:
      return {id, name, Domain(filled(8, -1.0), filled(8, 1.0)), 0.8, filled(8, 0.0)};
    case BenchmarkId::reg6d: {
      Point opt(6);
      for (int i = 1; i <= 6; ++i) opt[i - 1] = 10.0 * i / (i - 0.5) - 1.0;
      return {id, name, Domain(filled(6, 0.0), filled(6, 100.0)), 0.0, opt};
    }
  }
  throw std::invalid_argument("benchmark_spec: unknown benchmark");
}

ValueAndGradient evaluate(const BenchmarkSpec& spec, const Point& x) {
  if (!spec.domain.contains(x, 1e-12))
    throw std::invalid_argument("evaluate: point lies outside the " + spec.name + " domain");
  ValueAndGradient out;
  double f = 0.0;
  switch (spec.id) {
    case BenchmarkId::branin: f = branin(x, out.gradient); break;
    case BenchmarkId::levy4: f = levy(x, out.gradient); break;
    case BenchmarkId::ackley5: f = ackley(x, out.gradient); break;
    case BenchmarkId::dixonprice5: f = dixon_price(x, out.gradient); break;
    case BenchmarkId::hartmann6: f = hartmann6(x, out.gradient); break;
    case BenchmarkId::cosine8: f = cosine_mixture(x, out.gradient); break;
    case BenchmarkId::reg6d: return reg6d_loss(x);
  }
  out.value = -f;
  out.gradient = -out.gradient;
  return out;
}

Evaluation observe(const BenchmarkSpec& spec, const Point& x, double noise_variance,
                   std::mt19937_64& rng) {
  if (!(noise_variance >= 0.0)) throw std::invalid_argument("observe: noise_variance must be >= 0");
  const ValueAndGradient exact = evaluate(spec, x);
  Evaluation e{x, exact.value, exact.gradient, exact.value};
  if (noise_variance > 0.0) {
    std::normal_distribution<double> noise(0.0, std::sqrt(noise_variance));
    e.value_noisy += noise(rng);
    for (Eigen::Index i = 0; i < e.gradient_noisy.size(); ++i) e.gradient_noisy[i] += noise(rng);
  }
  return e;
}

Point reg6d_inner_solution(const Point& lambda) {
  if (lambda.size() != 6) throw std::invalid_argument("reg6d: lambda must have 6 components");
  Point x(6);
  for (int i = 0; i < 6; ++i) x[i] = 10.0 * (i + 1) / (1.0 + lambda[i]);
  return x;
}

ValueAndGradient reg6d_loss(const Point& lambda) {
  if (lambda.size() != 6) throw std::invalid_argument("reg6d: lambda must have 6 components");
  for (int i = 0; i < 6; ++i)
    if (!(lambda[i] >= 0.0 && lambda[i] <= 100.0))
      throw std::invalid_argument("reg6d: lambda must lie in [0, 100]^6");
  const Point inner = reg6d_inner_solution(lambda);
  ValueAndGradient out;
  out.gradient.resize(6);
  double loss = 0.0;
  for (int i = 0; i < 6; ++i) {
    const double idx = i + 1.0;
    const double resid = inner[i] - idx + 0.5;
    loss += resid * resid;
    const double dx = -10.0 * idx / ((1.0 + lambda[i]) * (1.0 + lambda[i]));
    out.gradient[i] = -2.0 * resid * dx;
  }
  out.value = -loss;
  return out;
}

double immediate_regret(double best_true_value, const BenchmarkSpec& spec) {
  return std::abs(spec.optimum_value - best_true_value);
}

double log10_regret(double regret) { return std::log10(std::max(regret, 1e-12)); }

}  // namespace fobo
