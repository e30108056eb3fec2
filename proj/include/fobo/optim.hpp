#pragma once

#include "fobo/domain.hpp"

#include <cstddef>
#include <functional>
#include <random>
#include <vector>

namespace fobo {

enum class Sense { minimize, maximize };

enum class SeedSampling { uniform, halton };

/// A scalar objective over a box. `value_and_gradient` is optional; without it
/// gradients come from central finite differences.
struct Objective {
  std::function<double(const Point&)> value;
  std::function<double(const Point&, Point&)> value_and_gradient;
};

struct OptResult {
  Point point;
  double value = 0.0;
  std::size_t seed_index = 0;
  bool converged = false;
  std::size_t iterations = 0;
};

struct LocalOptions {
  std::size_t max_iterations = 200;
  double gradient_tolerance = 1e-6;
  /// Finite-difference step as a fraction of each box side.
  double fd_step = 1e-6;
  /// Also stop once an accepted step improves the objective by no more than
  /// this fraction of max(1, |f|). Zero disables the test.
  double relative_decrease_tolerance = 0.0;
};

/// Projected BFGS on a box. The returned value never loses to the start.
/// Throws OptimizationError when the objective is non-finite at `start`.
OptResult local_optimize(const Objective& objective, const Point& start, const Domain& domain,
                         Sense sense, const LocalOptions& options = {});

/// k seed points drawn from `rng`; halton uses a random shift per call.
std::vector<Point> draw_seeds(const Domain& domain, std::size_t k, std::mt19937_64& rng,
                              SeedSampling sampling = SeedSampling::uniform);

/// Runs local_optimize from k seeds. Exactly k results in seed order; a seed
/// whose optimization throws comes back as its start point, unconverged.
std::vector<OptResult> multistart_optimize(const Objective& objective, const Domain& domain,
                                           std::size_t k, std::mt19937_64& rng, Sense sense,
                                           SeedSampling sampling = SeedSampling::uniform,
                                           const LocalOptions& options = {});

/// Index of the best result for the given sense; ties go to the lowest index.
std::size_t best_index(const std::vector<OptResult>& results, Sense sense);

}  // namespace fobo
