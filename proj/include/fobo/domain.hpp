#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fobo {

using Point = Eigen::VectorXd;

/// Error raised when a linear-algebra step cannot be completed, e.g. a
/// Cholesky factorization that still fails at the largest allowed jitter.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double jitter)
      : std::runtime_error(what), jitter_(jitter) {}
  double jitter() const noexcept { return jitter_; }

 private:
  double jitter_;
};

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OptimizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Axis-aligned search box.
class Domain {
 public:
  Domain(Point lower, Point upper);

  /// Unit hypercube [0,1]^d.
  static Domain unit(std::size_t d);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(lower_.size()); }
  const Point& lower() const noexcept { return lower_; }
  const Point& upper() const noexcept { return upper_; }
  Point width() const { return upper_ - lower_; }

  bool contains(const Point& x, double tol = 0.0) const;
  Point clamp(const Point& x) const;

  Point to_unit(const Point& x) const;
  Point from_unit(const Point& u) const;

 private:
  Point lower_;
  Point upper_;
};

}  // namespace fobo
