#include "fobo/kernels.hpp"

#include <cmath>

namespace fobo::reference {

Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& points) {
  const Eigen::Index n = points.cols();
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      double acc = 0.0;
      for (Eigen::Index k = 0; k < points.rows(); ++k) {
        const double diff = points(k, i) - points(k, j);
        acc += diff * diff;
      }
      out(i, j) = acc;
    }
  }
  return out;
}

Eigen::MatrixXd se_kernel_from_distances(const Eigen::MatrixXd& sq_dist, double signal_variance,
                                         double lengthscale) {
  Eigen::MatrixXd out(sq_dist.rows(), sq_dist.cols());
  for (Eigen::Index j = 0; j < sq_dist.cols(); ++j) {
    for (Eigen::Index i = 0; i < sq_dist.rows(); ++i) {
      out(i, j) = signal_variance * std::exp(-sq_dist(i, j) / (2.0 * lengthscale * lengthscale));
    }
  }
  return out;
}

std::vector<Prediction> posterior_batch(const FittedGP& gp, const Eigen::MatrixXd& points) {
  std::vector<Prediction> out;
  out.reserve(static_cast<std::size_t>(points.cols()));
  for (Eigen::Index j = 0; j < points.cols(); ++j) out.push_back(posterior(gp, points.col(j)));
  return out;
}

Eigen::VectorXd evaluate_batch(const std::function<double(const Point&)>& fn,
                               const Eigen::MatrixXd& points) {
  Eigen::VectorXd out(points.cols());
  for (Eigen::Index j = 0; j < points.cols(); ++j) out[j] = fn(points.col(j));
  return out;
}

}  // namespace fobo::reference
