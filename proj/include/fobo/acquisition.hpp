#pragma once

#include "fobo/gp.hpp"

#include <vector>

namespace fobo {

/// One GP for the objective plus one per partial derivative; all conditioned
/// on the same inputs in the same order.
struct SurrogateEnsemble {
  FittedGP fgp;
  std::vector<FittedGP> pgp;
  Domain domain;

  std::size_t dim() const noexcept { return domain.dim(); }
};

/// Best noisy observation so far.
struct Incumbent {
  Point point;
  double value = 0.0;
};

/// Mean and standard deviation of |Z| for Z ~ N(mu, sigma^2).
struct FoldedNormalStats {
  double mean_abs = 0.0;
  double std_abs = 0.0;
};

FoldedNormalStats folded_normal_stats(double mu, double sigma);

/// sqrt(posterior variance + noise variance).
double predictive_std(const FittedGP& gp, const Point& x);

/// Sum over dimensions of E|df/dx_i| + sd|df/dx_i| under the partial GPs.
/// Small values mark likely stationary points.
double gei_value(const SurrogateEnsemble& ens, const Point& x);
double gei_value_and_gradient(const SurrogateEnsemble& ens, const Point& x, Point& grad);

/// E|df/dx_i| alone, the per-dimension acquisition of the FOBO baseline.
double abs_gradient_value_and_gradient(const FittedGP& partial, const Point& x, Point& grad);

double ei_value(const FittedGP& fgp, const Point& x, const Incumbent& inc);
/// log EI with its gradient; finite far into the tail where EI itself underflows.
double log_ei_value_and_gradient(const FittedGP& fgp, const Point& x, const Incumbent& inc,
                                 Point& grad);

/// P0(x) * prod_i Pi(x): probability of improving on the incumbent by eps_pi
/// times the probabilities that each partial derivative lies in [-eps_grad,
/// eps_grad]. Both tolerances are in units of the respective GP's standardized
/// targets (multiplied by FittedGP::target_scale before use).
double gpi_value(const SurrogateEnsemble& ens, const Point& x, const Incumbent& inc,
                 double eps_grad, double eps_pi);
double log_gpi_value_and_gradient(const SurrogateEnsemble& ens, const Point& x,
                                  const Incumbent& inc, double eps_grad, double eps_pi, Point& grad);

/// Single gradient-window factor Phi((eps - mu)/s) - Phi((-eps - mu)/s).
double gradient_window_probability(double mu, double s, double eps);

/// mu(x) + alpha * sqrt(posterior variance).
double significance(const FittedGP& fgp, const Point& x, double alpha);

}  // namespace fobo
