#pragma once

#include "fobo/domain.hpp"

#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace fobo {

enum class BenchmarkId { branin, levy4, ackley5, dixonprice5, hartmann6, cosine8, reg6d };

/// A maximization problem: value is the negated standard test function.
struct BenchmarkSpec {
  BenchmarkId id;
  std::string name;
  Domain domain;
  double optimum_value;
  Point optimum_point;
};

std::string_view benchmark_name(BenchmarkId id);
std::optional<BenchmarkId> parse_benchmark(std::string_view name);
std::vector<BenchmarkId> all_benchmarks();
BenchmarkSpec benchmark_spec(BenchmarkId id);

struct ValueAndGradient {
  double value = 0.0;
  Point gradient;
};

/// Exact value and gradient. Throws std::invalid_argument outside the domain.
ValueAndGradient evaluate(const BenchmarkSpec& spec, const Point& x);

/// One query record. value_true is kept for regret accounting only.
struct Evaluation {
  Point point;
  double value_noisy = 0.0;
  Point gradient_noisy;
  double value_true = 0.0;
};

/// Adds independent N(0, noise_variance) to the value and to each gradient component.
Evaluation observe(const BenchmarkSpec& spec, const Point& x, double noise_variance,
                   std::mt19937_64& rng);

/// Negated validation loss of the 6-D regularization problem, whose inner
/// ridge-type training problem is solved in closed form per coordinate.
ValueAndGradient reg6d_loss(const Point& lambda);

/// Coordinate-wise minimizer of the training loss for a given lambda.
Point reg6d_inner_solution(const Point& lambda);

double immediate_regret(double best_true_value, const BenchmarkSpec& spec);

struct RegretEntry {
  std::size_t iteration = 0;
  double best_true_value = 0.0;
  double immediate_regret = 0.0;
  double log10_regret = 0.0;
  double wall_time_ms = 0.0;
};

using RegretTrace = std::vector<RegretEntry>;

/// log10(max(regret, 1e-12)).
double log10_regret(double regret);

}  // namespace fobo
