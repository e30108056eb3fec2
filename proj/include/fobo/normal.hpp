#pragma once

// Standard-normal helpers with tail-stable log forms.

namespace fobo::normal {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

double pdf(double z);
double cdf(double z);
double log_pdf(double z);
double log_cdf(double z);

/// Mills ratio Phi(-t) / phi(t) for t >= 0.
double mills_ratio(double t);

/// log(Phi(b) - Phi(a)) for a < b, accurate when both ends sit in the same tail.
double log_cdf_diff(double a, double b);

/// log(z * Phi(z) + phi(z)); the standardized expected-improvement kernel.
double log_ei_kernel(double z);

}  // namespace fobo::normal
