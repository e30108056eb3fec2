#include "fobo/gp.hpp"

#include "fobo/kernels.hpp"
#include "fobo/optim.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace fobo {
namespace {

constexpr double kLog2Pi = 1.83787706640934548356;
constexpr double kJitterStart = 1e-10;
constexpr double kJitterMax = 1e-4;

struct Factor {
  Eigen::MatrixXd lower;
  double jitter = 0.0;
};

// Cholesky of `cov`, adding jitter (relative to signal_variance) x10 per retry.
bool usable(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  return llt.info() == Eigen::Success && llt.matrixLLT().allFinite();
}

Factor cholesky_with_jitter(const Eigen::MatrixXd& cov, double signal_variance) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (usable(llt)) return {llt.matrixL(), 0.0};
  double jitter = kJitterStart * signal_variance;
  const double limit = kJitterMax * signal_variance * (1.0 + 1e-9);
  for (; jitter <= limit; jitter *= 10.0) {
    Eigen::MatrixXd shifted = cov;
    shifted.diagonal().array() += jitter;
    llt.compute(shifted);
    if (usable(llt)) return {llt.matrixL(), jitter};
  }
  std::ostringstream msg;
  msg << "Cholesky factorization failed after jitter " << jitter / 10.0;
  throw NumericalError(msg.str(), jitter / 10.0);
}

Eigen::MatrixXd columns_of(std::span<const Point> pts) {
  if (pts.empty()) return {};
  const Eigen::Index d = pts.front().size();
  Eigen::MatrixXd out(d, static_cast<Eigen::Index>(pts.size()));
  for (std::size_t j = 0; j < pts.size(); ++j) {
    if (pts[j].size() != d) throw std::invalid_argument("GP inputs have inconsistent dimensions");
    out.col(static_cast<Eigen::Index>(j)) = pts[j];
  }
  return out;
}

double log_det_from_lower(const Eigen::MatrixXd& lower) {
  return 2.0 * lower.diagonal().array().log().sum();
}

// Log marginal likelihood of standardized targets over log-space parameters
// (log signal variance, log lengthscale, log noise variance), zero mean.
class StandardizedLikelihood {
 public:
  StandardizedLikelihood(Eigen::MatrixXd sq_dist, Eigen::VectorXd targets)
      : sq_dist_(std::move(sq_dist)), targets_(std::move(targets)) {}

  double value_and_gradient(const Point& theta, Point& grad) const {
    grad = Point::Zero(3);
    const double sf2 = std::exp(theta[0]);
    const double ell = std::exp(theta[1]);
    const double sn2 = std::exp(theta[2]);
    const Eigen::Index n = targets_.size();

    const Eigen::MatrixXd signal = se_kernel_from_distances(sq_dist_, sf2, ell);
    Eigen::MatrixXd cov = signal;
    cov.diagonal().array() += sn2;
    Factor factor;
    try {
      factor = cholesky_with_jitter(cov, sf2);
    } catch (const NumericalError&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
    const auto lower = factor.lower.triangularView<Eigen::Lower>();
    const Eigen::VectorXd alpha = factor.lower.transpose().triangularView<Eigen::Upper>().solve(lower.solve(targets_));
    const double lml = -0.5 * targets_.dot(alpha) - 0.5 * log_det_from_lower(factor.lower) -
                       0.5 * static_cast<double>(n) * kLog2Pi;

    Eigen::MatrixXd inverse = Eigen::MatrixXd::Identity(n, n);
    lower.solveInPlace(inverse);
    factor.lower.transpose().triangularView<Eigen::Upper>().solveInPlace(inverse);
    // W = alpha alpha^T - K^{-1}; dL/dtheta_j = 0.5 tr(W dK_j).
    const Eigen::MatrixXd w = alpha * alpha.transpose() - inverse;
    grad[0] = 0.5 * (w.array() * signal.array()).sum();
    grad[1] = 0.5 * (w.array() * signal.array() * sq_dist_.array()).sum() / (ell * ell);
    grad[2] = 0.5 * sn2 * w.trace();
    return lml;
  }

  double value(const Point& theta) const {
    Point scratch;
    return value_and_gradient(theta, scratch);
  }

 private:
  Eigen::MatrixXd sq_dist_;
  Eigen::VectorXd targets_;
};

}  // namespace

void GPHyperparams::validate() const {
  if (!std::isfinite(signal_variance) || !std::isfinite(lengthscale) ||
      !std::isfinite(noise_variance) || !std::isfinite(constant_mean))
    throw std::invalid_argument("GPHyperparams: all values must be finite");
  if (!(signal_variance > 0.0)) throw std::invalid_argument("GPHyperparams: signal_variance must be > 0");
  if (!(lengthscale > 0.0)) throw std::invalid_argument("GPHyperparams: lengthscale must be > 0");
  if (!(noise_variance >= 0.0)) throw std::invalid_argument("GPHyperparams: noise_variance must be >= 0");
}

double kernel(const Point& x, const Point& y, const GPHyperparams& h) {
  if (x.size() != y.size()) throw std::invalid_argument("kernel: dimension mismatch");
  return h.signal_variance *
         std::exp(-(x - y).squaredNorm() / (2.0 * h.lengthscale * h.lengthscale));
}

double log_marginal_likelihood(std::span<const Point> inputs, std::span<const double> targets,
                               const GPHyperparams& h) {
  h.validate();
  if (inputs.empty()) throw std::invalid_argument("log_marginal_likelihood: need at least one input");
  if (inputs.size() != targets.size())
    throw std::invalid_argument("log_marginal_likelihood: inputs and targets differ in length");
  const Eigen::MatrixXd pts = columns_of(inputs);
  Eigen::MatrixXd cov = se_kernel_from_distances(squared_distances(pts), h.signal_variance, h.lengthscale);
  cov.diagonal().array() += h.noise_variance;
  const Factor factor = cholesky_with_jitter(cov, h.signal_variance);
  Eigen::VectorXd resid(static_cast<Eigen::Index>(targets.size()));
  for (std::size_t i = 0; i < targets.size(); ++i)
    resid[static_cast<Eigen::Index>(i)] = targets[i] - h.constant_mean;
  const Eigen::VectorXd z = factor.lower.triangularView<Eigen::Lower>().solve(resid);
  return -0.5 * z.squaredNorm() - 0.5 * log_det_from_lower(factor.lower) -
         0.5 * static_cast<double>(targets.size()) * kLog2Pi;
}

FittedGP condition_gp(const Domain& domain, std::span<const Point> inputs,
                      std::span<const double> targets, const GPHyperparams& h, double target_scale) {
  h.validate();
  if (inputs.empty()) throw std::invalid_argument("condition_gp: need at least one input");
  if (inputs.size() != targets.size())
    throw std::invalid_argument("condition_gp: inputs and targets differ in length");

  Eigen::MatrixXd unit(static_cast<Eigen::Index>(domain.dim()), static_cast<Eigen::Index>(inputs.size()));
  for (std::size_t j = 0; j < inputs.size(); ++j) {
    if (inputs[j].size() != static_cast<Eigen::Index>(domain.dim()))
      throw std::invalid_argument("condition_gp: input dimension does not match domain");
    unit.col(static_cast<Eigen::Index>(j)) = domain.to_unit(inputs[j]);
  }
  Eigen::VectorXd y(static_cast<Eigen::Index>(targets.size()));
  for (std::size_t i = 0; i < targets.size(); ++i) y[static_cast<Eigen::Index>(i)] = targets[i];

  Eigen::MatrixXd cov = se_kernel_from_distances(squared_distances(unit), h.signal_variance, h.lengthscale);
  cov.diagonal().array() += h.noise_variance;
  Factor factor = cholesky_with_jitter(cov, h.signal_variance);

  const Eigen::VectorXd resid = y.array() - h.constant_mean;
  const auto lower = factor.lower.triangularView<Eigen::Lower>();
  const Eigen::VectorXd z = lower.solve(resid);
  Eigen::VectorXd weights = factor.lower.transpose().triangularView<Eigen::Upper>().solve(z);

  const double lml = -0.5 * z.squaredNorm() - 0.5 * log_det_from_lower(factor.lower) -
                     0.5 * static_cast<double>(y.size()) * kLog2Pi;

  return FittedGP{h,
                  domain,
                  std::move(unit),
                  std::move(y),
                  std::move(factor.lower),
                  std::move(weights),
                  lml,
                  target_scale,
                  factor.jitter};
}

FitOutcome fit_detailed(std::span<const Point> inputs, std::span<const double> targets,
                        const Domain& domain, const FitOptions& options, std::mt19937_64& rng) {
  if (inputs.size() < 2) throw std::invalid_argument("fit: need at least two inputs");
  if (inputs.size() != targets.size())
    throw std::invalid_argument("fit: inputs and targets differ in length");
  if (options.restarts < 1) throw std::invalid_argument("fit: restarts must be at least 1");

  const double n = static_cast<double>(targets.size());
  const double mean = std::accumulate(targets.begin(), targets.end(), 0.0) / n;
  double ss = 0.0;
  for (double t : targets) ss += (t - mean) * (t - mean);
  double scale = std::sqrt(ss / n);
  if (!std::isfinite(scale) || !std::isfinite(mean)) throw FitError("fit: targets are not finite");
  if (scale <= 1e-12 * std::max(1.0, std::abs(mean))) scale = 1.0;

  std::vector<Point> unit_inputs;
  unit_inputs.reserve(inputs.size());
  Eigen::MatrixXd unit(static_cast<Eigen::Index>(domain.dim()), static_cast<Eigen::Index>(inputs.size()));
  for (std::size_t j = 0; j < inputs.size(); ++j) {
    if (inputs[j].size() != static_cast<Eigen::Index>(domain.dim()))
      throw std::invalid_argument("fit: input dimension does not match domain");
    unit_inputs.push_back(domain.to_unit(inputs[j]));
    unit.col(static_cast<Eigen::Index>(j)) = unit_inputs.back();
  }
  Eigen::VectorXd standardized(static_cast<Eigen::Index>(targets.size()));
  for (std::size_t i = 0; i < targets.size(); ++i)
    standardized[static_cast<Eigen::Index>(i)] = (targets[i] - mean) / scale;

  const StandardizedLikelihood likelihood(squared_distances(unit), standardized);
  Objective objective;
  objective.value_and_gradient = [&likelihood](const Point& theta, Point& grad) {
    return likelihood.value_and_gradient(theta, grad);
  };
  Point lo(3), hi(3);
  lo << options.log_signal_lo, options.log_length_lo, options.log_noise_lo;
  hi << options.log_signal_hi, options.log_length_hi, options.log_noise_hi;
  const Domain bounds(lo, hi);

  const auto to_output_units = [&](const Point& theta) {
    GPHyperparams h;
    h.signal_variance = std::exp(theta[0]) * scale * scale;
    h.lengthscale = std::exp(theta[1]);
    h.noise_variance = std::exp(theta[2]) * scale * scale;
    h.constant_mean = mean;
    return h;
  };
  // Converts a standardized-scale likelihood into output units.
  const double log_scale_shift = n * std::log(scale);

  FitOutcome outcome{FittedGP{GPHyperparams{}, domain, {}, {}, {}, {}, 0.0, scale, 0.0}, {}, {}};
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Point> starts;
  for (std::size_t r = 0; r < options.restarts; ++r) {
    Point theta(3);
    for (Eigen::Index i = 0; i < 3; ++i) theta[i] = lo[i] + unif(rng) * (hi[i] - lo[i]);
    starts.push_back(theta);
  }

  LocalOptions local;
  local.max_iterations = options.max_iterations;
  local.gradient_tolerance = options.gradient_tolerance;
  local.relative_decrease_tolerance = options.relative_decrease_tolerance;

  Point best_theta;
  double best_value = -std::numeric_limits<double>::infinity();
  for (const Point& theta0 : starts) {
    const double start_value = likelihood.value(theta0);
    outcome.initial_guesses.push_back(to_output_units(theta0));
    outcome.initial_log_marginals.push_back(start_value - log_scale_shift);
    try {
      const OptResult r = local_optimize(objective, theta0, bounds, Sense::maximize, local);
      if (std::isfinite(r.value) && r.value > best_value) {
        best_value = r.value;
        best_theta = r.point;
      }
    } catch (const OptimizationError&) {
      continue;
    }
  }
  if (best_theta.size() == 0) throw FitError("fit: no restart produced a finite log marginal likelihood");

  outcome.gp = condition_gp(domain, inputs, targets, to_output_units(best_theta), scale);
  return outcome;
}

FittedGP fit(std::span<const Point> inputs, std::span<const double> targets, const Domain& domain,
             std::size_t restarts, std::mt19937_64& rng) {
  FitOptions options;
  options.restarts = restarts;
  return fit_detailed(inputs, targets, domain, options, rng).gp;
}

Prediction posterior(const FittedGP& gp, const Point& x) {
  if (x.size() != static_cast<Eigen::Index>(gp.dim()))
    throw std::invalid_argument("posterior: dimension mismatch");
  const Point u = gp.domain.to_unit(x);
  const double sf2 = gp.hyperparams.signal_variance;
  const double scale = -0.5 / (gp.hyperparams.lengthscale * gp.hyperparams.lengthscale);
  const Eigen::Index n = gp.train_inputs.cols();
  Eigen::VectorXd k(n);
  for (Eigen::Index j = 0; j < n; ++j)
    k[j] = sf2 * std::exp(scale * (gp.train_inputs.col(j) - u).squaredNorm());
  Prediction p;
  p.mean = gp.hyperparams.constant_mean + k.dot(gp.weight_vector);
  const Eigen::VectorXd v = gp.chol_factor.triangularView<Eigen::Lower>().solve(k);
  p.variance = std::clamp(sf2 - v.squaredNorm(), 0.0, sf2);
  return p;
}

PredictionWithGradient posterior_with_gradient(const FittedGP& gp, const Point& x) {
  if (x.size() != static_cast<Eigen::Index>(gp.dim()))
    throw std::invalid_argument("posterior: dimension mismatch");
  const Point u = gp.domain.to_unit(x);
  const double sf2 = gp.hyperparams.signal_variance;
  const double inv_l2 = 1.0 / (gp.hyperparams.lengthscale * gp.hyperparams.lengthscale);
  const Eigen::Index n = gp.train_inputs.cols();
  const Eigen::Index d = u.size();

  Eigen::VectorXd k(n);
  // Column j holds d k_j / d u.
  Eigen::MatrixXd dk(d, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Point diff = u - gp.train_inputs.col(j);
    k[j] = sf2 * std::exp(-0.5 * inv_l2 * diff.squaredNorm());
    dk.col(j) = -k[j] * inv_l2 * diff;
  }
  const auto lower = gp.chol_factor.triangularView<Eigen::Lower>();
  const Eigen::VectorXd v = lower.solve(k);
  const Eigen::VectorXd beta = gp.chol_factor.transpose().triangularView<Eigen::Upper>().solve(v);

  PredictionWithGradient p;
  p.mean = gp.hyperparams.constant_mean + k.dot(gp.weight_vector);
  const double raw_var = sf2 - v.squaredNorm();
  p.variance = std::clamp(raw_var, 0.0, sf2);
  const Point inv_width = gp.domain.width().cwiseInverse();
  p.mean_gradient = (dk * gp.weight_vector).cwiseProduct(inv_width);
  if (raw_var > 0.0 && raw_var < sf2) {
    p.variance_gradient = (-2.0 * (dk * beta)).cwiseProduct(inv_width);
  } else {
    p.variance_gradient = Point::Zero(d);
  }
  return p;
}

}  // namespace fobo
