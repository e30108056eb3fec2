#pragma once

// Data-parallel kernels (OpenMP). Each has a serial twin in fobo::reference
// that the tests compare against and the benchmarks time.

#include "fobo/gp.hpp"

#include <Eigen/Core>

#include <functional>
#include <vector>

namespace fobo {

/// Columns of `points` are points; returns the n x n matrix of squared distances.
Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& points);

/// sigma^2 * exp(-D / (2 l^2)) elementwise.
Eigen::MatrixXd se_kernel_from_distances(const Eigen::MatrixXd& sq_dist, double signal_variance,
                                         double lengthscale);

/// Posterior mean and variance at each column of `points` (raw coordinates).
std::vector<Prediction> posterior_batch(const FittedGP& gp, const Eigen::MatrixXd& points);

/// Applies `fn` to each column of `points`; `fn` must be safe to call concurrently.
Eigen::VectorXd evaluate_batch(const std::function<double(const Point&)>& fn,
                               const Eigen::MatrixXd& points);

namespace reference {

Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& points);
Eigen::MatrixXd se_kernel_from_distances(const Eigen::MatrixXd& sq_dist, double signal_variance,
                                         double lengthscale);
std::vector<Prediction> posterior_batch(const FittedGP& gp, const Eigen::MatrixXd& points);
Eigen::VectorXd evaluate_batch(const std::function<double(const Point&)>& fn,
                               const Eigen::MatrixXd& points);

}  // namespace reference
}  // namespace fobo
