#include "fobo/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fobo {
namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxBacktracks = 40;

class SignedObjective {
 public:
  SignedObjective(const Objective& objective, const Domain& domain, Sense sense, double fd_step)
      : objective_(objective), domain_(domain), sign_(sense == Sense::minimize ? 1.0 : -1.0),
        fd_step_(fd_step) {
    if (!objective_.value && !objective_.value_and_gradient)
      throw std::invalid_argument("Objective: no callable supplied");
  }

  double value(const Point& x) const {
    if (objective_.value) return sign_ * objective_.value(x);
    Point scratch(x.size());
    return sign_ * objective_.value_and_gradient(x, scratch);
  }

  double value_and_gradient(const Point& x, Point& grad) const {
    if (objective_.value_and_gradient) {
      grad.resize(x.size());
      const double f = objective_.value_and_gradient(x, grad);
      grad *= sign_;
      return sign_ * f;
    }
    const double f = value(x);
    grad.resize(x.size());
    Point probe = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double h = fd_step_ * (domain_.upper()[i] - domain_.lower()[i]);
      const double hi = std::min(x[i] + h, domain_.upper()[i]);
      const double lo = std::max(x[i] - h, domain_.lower()[i]);
      probe[i] = hi;
      const double f_hi = value(probe);
      probe[i] = lo;
      const double f_lo = value(probe);
      probe[i] = x[i];
      grad[i] = (f_hi - f_lo) / (hi - lo);
    }
    return f;
  }

 private:
  const Objective& objective_;
  const Domain& domain_;
  double sign_;
  double fd_step_;
};

// Zeroes components that point out of the box at an active bound.
Point projected_gradient(const Point& x, const Point& g, const Domain& domain) {
  Point pg = g;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] <= domain.lower()[i] && g[i] > 0.0) pg[i] = 0.0;
    if (x[i] >= domain.upper()[i] && g[i] < 0.0) pg[i] = 0.0;
  }
  return pg;
}

double van_der_corput(std::size_t index, std::size_t base) {
  double result = 0.0;
  double f = 1.0 / static_cast<double>(base);
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= static_cast<double>(base);
  }
  return result;
}

constexpr std::size_t kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

}  // namespace

OptResult local_optimize(const Objective& objective, const Point& start, const Domain& domain,
                         Sense sense, const LocalOptions& options) {
  if (start.size() != static_cast<Eigen::Index>(domain.dim()))
    throw std::invalid_argument("local_optimize: start dimension does not match domain");
  const SignedObjective f(objective, domain, sense, options.fd_step);
  const Eigen::Index d = start.size();

  Point x = domain.clamp(start);
  Point g;
  double fx = f.value_and_gradient(x, g);
  if (!std::isfinite(fx)) throw OptimizationError("local_optimize: objective is not finite at start");

  Eigen::MatrixXd inv_hessian = Eigen::MatrixXd::Identity(d, d);
  bool fresh_hessian = true;
  bool converged = false;
  std::size_t iter = 0;

  for (; iter < options.max_iterations; ++iter) {
    if (!g.allFinite()) break;
    const Point pg = projected_gradient(x, g, domain);
    if (pg.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) {
      converged = true;
      break;
    }

    // Quasi-Newton step on the free variables; bound-active ones stay put.
    Point direction = Point::Zero(d);
    {
      std::vector<Eigen::Index> free;
      for (Eigen::Index i = 0; i < d; ++i)
        if (pg[i] != 0.0) free.push_back(i);
      for (Eigen::Index a : free) {
        double acc = 0.0;
        for (Eigen::Index b : free) acc += inv_hessian(a, b) * g[b];
        direction[a] = -acc;
      }
    }
    if (direction.dot(pg) >= 0.0) {
      inv_hessian.setIdentity();
      fresh_hessian = true;
      direction = -pg;
    }
    if (fresh_hessian) {
      // Keep the first trial step inside a box-sized neighbourhood.
      const double longest = (direction.cwiseAbs().cwiseQuotient(domain.width())).maxCoeff();
      if (longest > 1.0) direction /= longest;
    }

    double step = 1.0;
    Point x_new;
    Point g_new;
    double f_new = std::numeric_limits<double>::quiet_NaN();
    bool accepted = false;
    for (int bt = 0; bt < kMaxBacktracks; ++bt, step *= 0.5) {
      x_new = domain.clamp(x + step * direction);
      if ((x_new - x).lpNorm<Eigen::Infinity>() == 0.0) break;
      f_new = f.value_and_gradient(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= fx + kArmijo * g.dot(x_new - x)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (fresh_hessian) break;
      inv_hessian.setIdentity();
      fresh_hessian = true;
      continue;
    }

    const Point s = x_new - x;
    const Point y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (fresh_hessian) inv_hessian *= sy / y.squaredNorm();
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd left = Eigen::MatrixXd::Identity(d, d) - rho * s * y.transpose();
      inv_hessian = left * inv_hessian * left.transpose() + rho * s * s.transpose();
      fresh_hessian = false;
    }
    const double decrease = fx - f_new;
    x = x_new;
    g = g_new;
    fx = f_new;
    if (options.relative_decrease_tolerance > 0.0 &&
        decrease <= options.relative_decrease_tolerance * std::max({1.0, std::abs(fx), std::abs(fx + decrease)})) {
      converged = true;
      break;
    }
    if (decrease <= 1e-15 * std::max(1.0, std::abs(fx)) &&
        s.cwiseAbs().cwiseQuotient(domain.width()).maxCoeff() < 1e-12) {
      break;
    }
  }

  OptResult result;
  result.point = x;
  result.value = sense == Sense::minimize ? fx : -fx;
  result.converged = converged;
  result.iterations = iter;
  return result;
}

std::vector<Point> draw_seeds(const Domain& domain, std::size_t k, std::mt19937_64& rng,
                              SeedSampling sampling) {
  const std::size_t d = domain.dim();
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Point> seeds;
  seeds.reserve(k);
  if (sampling == SeedSampling::halton) {
    if (d > std::size(kPrimes)) throw std::invalid_argument("draw_seeds: halton supports d <= 16");
    Point shift(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) shift[static_cast<Eigen::Index>(i)] = unif(rng);
    for (std::size_t s = 0; s < k; ++s) {
      Point u(static_cast<Eigen::Index>(d));
      for (std::size_t i = 0; i < d; ++i) {
        const double v = van_der_corput(s + 1, kPrimes[i]) + shift[static_cast<Eigen::Index>(i)];
        u[static_cast<Eigen::Index>(i)] = v - std::floor(v);
      }
      seeds.push_back(domain.from_unit(u));
    }
    return seeds;
  }
  for (std::size_t s = 0; s < k; ++s) {
    Point u(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) u[static_cast<Eigen::Index>(i)] = unif(rng);
    seeds.push_back(domain.clamp(domain.from_unit(u)));
  }
  return seeds;
}

std::vector<OptResult> multistart_optimize(const Objective& objective, const Domain& domain,
                                           std::size_t k, std::mt19937_64& rng, Sense sense,
                                           SeedSampling sampling, const LocalOptions& options) {
  if (k < 1) throw std::invalid_argument("multistart_optimize: k must be at least 1");
  const std::vector<Point> seeds = draw_seeds(domain, k, rng, sampling);
  std::vector<OptResult> results(k);

#pragma omp parallel for schedule(dynamic, 1) if (k > 1)
  for (std::size_t s = 0; s < k; ++s) {
    try {
      results[s] = local_optimize(objective, seeds[s], domain, sense, options);
    } catch (const std::exception&) {
      OptResult failed;
      failed.point = seeds[s];
      try {
        Point scratch;
        failed.value = objective.value ? objective.value(seeds[s])
                                       : objective.value_and_gradient(seeds[s], scratch);
      } catch (const std::exception&) {
        failed.value = std::numeric_limits<double>::quiet_NaN();
      }
      failed.converged = false;
      results[s] = failed;
    }
    results[s].seed_index = s;
  }
  return results;
}

std::size_t best_index(const std::vector<OptResult>& results, Sense sense) {
  if (results.empty()) throw std::invalid_argument("best_index: no results");
  std::size_t best = results.size();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const double v = results[i].value;
    if (!std::isfinite(v)) continue;
    if (best == results.size()) {
      best = i;
      continue;
    }
    const bool better = sense == Sense::minimize ? v < results[best].value : v > results[best].value;
    if (better) best = i;
  }
  return best == results.size() ? 0 : best;
}

}  // namespace fobo
