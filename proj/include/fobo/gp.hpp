#pragma once

#include "fobo/domain.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <random>
#include <span>
#include <vector>

namespace fobo {

/// Hyperparameters of a constant-mean GP with isotropic squared-exponential
/// kernel. Variances and the mean are in output units; the lengthscale is
/// measured in the unit box the GP rescales its inputs into.
struct GPHyperparams {
  double signal_variance = 1.0;
  double lengthscale = 1.0;
  double noise_variance = 0.0;
  double constant_mean = 0.0;

  /// Throws std::invalid_argument unless every field is finite,
  /// signal_variance > 0, lengthscale > 0 and noise_variance >= 0.
  void validate() const;
};

/// sigma^2 * exp(-|x - y|^2 / (2 l^2)).
double kernel(const Point& x, const Point& y, const GPHyperparams& h);

/// Log density of targets under N(constant_mean * 1, K + noise * I). Inputs are
/// used exactly as given (no rescaling).
double log_marginal_likelihood(std::span<const Point> inputs, std::span<const double> targets,
                               const GPHyperparams& h);

/// An immutable GP posterior. train_inputs holds one unit-box point per column.
struct FittedGP {
  GPHyperparams hyperparams;
  Domain domain;
  Eigen::MatrixXd train_inputs;
  Eigen::VectorXd train_targets;
  Eigen::MatrixXd chol_factor;
  Eigen::VectorXd weight_vector;
  double log_marginal = 0.0;
  /// Standard deviation used to standardize the targets (1 when degenerate).
  double target_scale = 1.0;
  /// Diagonal jitter that was needed on top of noise_variance.
  double jitter = 0.0;

  std::size_t size() const noexcept { return static_cast<std::size_t>(train_targets.size()); }
  std::size_t dim() const noexcept { return domain.dim(); }
};

/// Conditions a GP with fixed hyperparameters on raw-coordinate inputs.
FittedGP condition_gp(const Domain& domain, std::span<const Point> inputs,
                      std::span<const double> targets, const GPHyperparams& h,
                      double target_scale = 1.0);

struct FitOptions {
  std::size_t restarts = 5;
  double log_signal_lo = -6.0, log_signal_hi = 6.0;
  double log_length_lo = -4.0, log_length_hi = 4.0;
  double log_noise_lo = -12.0, log_noise_hi = 2.0;
  /// Stopping rule of each local MLE run (the usual L-BFGS-B defaults).
  double gradient_tolerance = 1e-5;
  double relative_decrease_tolerance = 2.2e-9;
  std::size_t max_iterations = 200;
};

struct FitOutcome {
  FittedGP gp;
  /// Starting hyperparameters of each restart (output units) and the log
  /// marginal likelihood they achieve on the unit-box inputs.
  std::vector<GPHyperparams> initial_guesses;
  std::vector<double> initial_log_marginals;
};

/// Maximum-likelihood fit with multistart over log-space hyperparameters.
FitOutcome fit_detailed(std::span<const Point> inputs, std::span<const double> targets,
                        const Domain& domain, const FitOptions& options, std::mt19937_64& rng);

FittedGP fit(std::span<const Point> inputs, std::span<const double> targets, const Domain& domain,
             std::size_t restarts, std::mt19937_64& rng);

struct Prediction {
  double mean = 0.0;
  double variance = 0.0;
};

struct PredictionWithGradient {
  double mean = 0.0;
  double variance = 0.0;
  Point mean_gradient;
  Point variance_gradient;
};

/// Noiseless posterior at a raw-coordinate point. Add hyperparams.noise_variance
/// for the predictive variance of a noisy observation.
Prediction posterior(const FittedGP& gp, const Point& x);
PredictionWithGradient posterior_with_gradient(const FittedGP& gp, const Point& x);

}  // namespace fobo
