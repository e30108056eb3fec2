#include "fobo/kernels.hpp"

#include <cmath>

namespace fobo {
namespace {
// Below this many rows the fork/join overhead dominates.
constexpr Eigen::Index kParallelThreshold = 48;
}  // namespace

Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& points) {
  const Eigen::Index n = points.cols();
  Eigen::MatrixXd out(n, n);
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      out(i, j) = (points.col(i) - points.col(j)).squaredNorm();
    }
  }
  return out;
}

Eigen::MatrixXd se_kernel_from_distances(const Eigen::MatrixXd& sq_dist, double signal_variance,
                                         double lengthscale) {
  const Eigen::Index n = sq_dist.cols();
  const double scale = -0.5 / (lengthscale * lengthscale);
  Eigen::MatrixXd out(sq_dist.rows(), n);
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < sq_dist.rows(); ++i) {
      out(i, j) = signal_variance * std::exp(scale * sq_dist(i, j));
    }
  }
  return out;
}

std::vector<Prediction> posterior_batch(const FittedGP& gp, const Eigen::MatrixXd& points) {
  const Eigen::Index m = points.cols();
  std::vector<Prediction> out(static_cast<std::size_t>(m));
#pragma omp parallel for schedule(static) if (m >= kParallelThreshold)
  for (Eigen::Index j = 0; j < m; ++j) {
    out[static_cast<std::size_t>(j)] = posterior(gp, points.col(j));
  }
  return out;
}

Eigen::VectorXd evaluate_batch(const std::function<double(const Point&)>& fn,
                               const Eigen::MatrixXd& points) {
  const Eigen::Index m = points.cols();
  Eigen::VectorXd out(m);
#pragma omp parallel for schedule(dynamic, 16) if (m >= kParallelThreshold)
  for (Eigen::Index j = 0; j < m; ++j) {
    out[j] = fn(points.col(j));
  }
  return out;
}

}  // namespace fobo
