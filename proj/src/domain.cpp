#include "fobo/domain.hpp"

#include <cmath>

namespace fobo {

Domain::Domain(Point lower, Point upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() == 0) throw std::invalid_argument("Domain: dimension must be at least 1");
  if (lower_.size() != upper_.size())
    throw std::invalid_argument("Domain: lower and upper bounds differ in dimension");
  for (Eigen::Index i = 0; i < lower_.size(); ++i) {
    if (!std::isfinite(lower_[i]) || !std::isfinite(upper_[i]) || !(lower_[i] < upper_[i]))
      throw std::invalid_argument("Domain: requires finite lower[i] < upper[i] in dimension " +
                                  std::to_string(i));
  }
}

Domain Domain::unit(std::size_t d) {
  return Domain(Point::Zero(static_cast<Eigen::Index>(d)), Point::Ones(static_cast<Eigen::Index>(d)));
}

bool Domain::contains(const Point& x, double tol) const {
  if (x.size() != lower_.size()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double slack = tol * (upper_[i] - lower_[i]);
    if (!(x[i] >= lower_[i] - slack && x[i] <= upper_[i] + slack)) return false;
  }
  return true;
}

Point Domain::clamp(const Point& x) const { return x.cwiseMax(lower_).cwiseMin(upper_); }

Point Domain::to_unit(const Point& x) const {
  return (x - lower_).cwiseQuotient(upper_ - lower_);
}

Point Domain::from_unit(const Point& u) const {
  return lower_ + u.cwiseProduct(upper_ - lower_);
}

}  // namespace fobo
