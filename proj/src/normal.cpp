#include "fobo/normal.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace fobo::normal {
namespace {

constexpr double kSqrtHalf = 0.70710678118654752440;

// Continued fraction 1/(t + 1/(t + 2/(t + 3/(t + ...)))), valid for large t.
double mills_continued_fraction(double t) {
  double acc = t;
  for (int k = 60; k >= 1; --k) acc = t + k / acc;
  return 1.0 / acc;
}

}  // namespace

double pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double cdf(double z) { return 0.5 * std::erfc(-z * kSqrtHalf); }

double log_pdf(double z) { return -0.5 * z * z - kLogSqrt2Pi; }

double mills_ratio(double t) {
  if (t < 30.0) return cdf(-t) / pdf(t);
  return mills_continued_fraction(t);
}

double log_cdf(double z) {
  if (z > -30.0) return std::log(cdf(z));
  return log_pdf(z) + std::log(mills_continued_fraction(-z));
}

double log_cdf_diff(double a, double b) {
  if (!(a < b)) return -std::numeric_limits<double>::infinity();
  // Reflect so the interval never lies entirely in the upper tail.
  if (a > 0.0) {
    const double na = -b;
    b = -a;
    a = na;
  }
  if (b > 0.0) {
    // a <= 0 < b: both erf terms are non-negative, no cancellation.
    return std::log(0.5 * (std::erf(b * kSqrtHalf) + std::erf(-a * kSqrtHalf)));
  }
  const double lb = log_cdf(b);
  const double la = log_cdf(a);
  return lb + std::log1p(-std::exp(la - lb));
}

double log_ei_kernel(double z) {
  if (z > -1.0) return std::log(z * cdf(z) + pdf(z));
  const double t = -z;
  // z*Phi(z) + phi(z) = phi(z) * (1 - t * R(t)); the bracket loses ~log10(t^2) digits.
  const double q = 1.0 - t * mills_ratio(t);
  if (q > 0.0) return log_pdf(z) + std::log(q);
  // Asymptotic limit 1 - tR ~ 1/t^2 once the subtraction is exhausted.
  return log_pdf(z) - 2.0 * std::log(t);
}

}  // namespace fobo::normal
