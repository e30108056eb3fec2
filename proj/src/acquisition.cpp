#include "fobo/acquisition.hpp"

#include "fobo/normal.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fobo {
namespace {

constexpr double kMinStd = 1e-300;

// Folded-normal moments plus partial derivatives w.r.t. (mu, sigma).
struct FoldedMoments {
  double mean_abs, std_abs;
  double dmean_dmu, dmean_ds;
  double dstd_dmu, dstd_ds;
};

FoldedMoments folded_moments(double mu, double s) {
  FoldedMoments m{};
  if (s <= kMinStd) {
    m.mean_abs = std::abs(mu);
    m.dmean_dmu = mu > 0 ? 1.0 : (mu < 0 ? -1.0 : 0.0);
    return m;
  }
  const double t = mu / s;
  const double at = std::abs(t);
  // E|Z| = |mu| + 2 s h(-|t|) with h(z) = z Phi(z) + phi(z); keeps the excess
  // over |mu| free of cancellation.
  const double h = std::exp(normal::log_ei_kernel(-at));
  m.mean_abs = std::abs(mu) + 2.0 * s * h;
  const double var_ratio = std::max(0.0, 1.0 - 4.0 * at * h - 4.0 * h * h);
  m.std_abs = s * std::sqrt(var_ratio);

  m.dmean_dmu = std::erf(t / std::sqrt(2.0));
  m.dmean_ds = 2.0 * normal::pdf(t);
  if (m.std_abs > 1e-12 * s) {
    const double dvar_dmu = 2.0 * mu - 2.0 * m.mean_abs * m.dmean_dmu;
    const double dvar_ds = 2.0 * s - 2.0 * m.mean_abs * m.dmean_ds;
    m.dstd_dmu = dvar_dmu / (2.0 * m.std_abs);
    m.dstd_ds = dvar_ds / (2.0 * m.std_abs);
  }
  return m;
}

struct EiTerms {
  double log_h;      // log(z Phi(z) + phi(z))
  double cdf_over_h; // Phi(z) / h(z)
  double pdf_over_h; // phi(z) / h(z)
};

EiTerms ei_terms(double z) {
  EiTerms e{};
  e.log_h = normal::log_ei_kernel(z);
  if (z > -1.0) {
    const double h = std::exp(e.log_h);
    e.cdf_over_h = normal::cdf(z) / h;
    e.pdf_over_h = normal::pdf(z) / h;
    return e;
  }
  const double t = -z;
  const double r = normal::mills_ratio(t);
  double q = 1.0 - t * r;
  if (!(q > 0.0)) q = 1.0 / (t * t);
  e.cdf_over_h = r / q;
  e.pdf_over_h = 1.0 / q;
  return e;
}

void check_ensemble(const SurrogateEnsemble& ens) {
  if (ens.pgp.size() != ens.dim())
    throw std::invalid_argument("SurrogateEnsemble: need one partial-derivative GP per dimension");
}

// d log(Phi(b) - Phi(a)) / d(mu, s) for a = (-eps - mu)/s, b = (eps - mu)/s.
double log_window(double mu, double s, double eps, double& dmu, double& ds) {
  s = std::max(s, kMinStd);
  const double a = (-eps - mu) / s;
  const double b = (eps - mu) / s;
  const double log_p = normal::log_cdf_diff(a, b);
  dmu = 0.0;
  ds = 0.0;
  if (std::isfinite(log_p)) {
    const double wa = std::exp(normal::log_pdf(a) - log_p);
    const double wb = std::exp(normal::log_pdf(b) - log_p);
    // dP/dmu = (phi(a) - phi(b)) / s, dP/ds = (a phi(a) - b phi(b)) / s
    dmu = (wa - wb) / s;
    const double ta = std::isfinite(a) ? a * wa : 0.0;
    const double tb = std::isfinite(b) ? b * wb : 0.0;
    ds = (ta - tb) / s;
    if (!std::isfinite(dmu)) dmu = 0.0;
    if (!std::isfinite(ds)) ds = 0.0;
  }
  return log_p;
}

}  // namespace

FoldedNormalStats folded_normal_stats(double mu, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("folded_normal_stats: sigma must be > 0");
  if (!std::isfinite(mu) || !std::isfinite(sigma))
    throw std::invalid_argument("folded_normal_stats: arguments must be finite");
  const FoldedMoments m = folded_moments(mu, sigma);
  return {m.mean_abs, m.std_abs};
}

double predictive_std(const FittedGP& gp, const Point& x) {
  return std::sqrt(posterior(gp, x).variance + gp.hyperparams.noise_variance);
}

double gei_value(const SurrogateEnsemble& ens, const Point& x) {
  check_ensemble(ens);
  double total = 0.0;
  for (const FittedGP& partial : ens.pgp) {
    const Prediction p = posterior(partial, x);
    const double s = std::sqrt(p.variance + partial.hyperparams.noise_variance);
    const FoldedMoments m = folded_moments(p.mean, s);
    total += m.mean_abs + m.std_abs;
  }
  return total;
}

double gei_value_and_gradient(const SurrogateEnsemble& ens, const Point& x, Point& grad) {
  check_ensemble(ens);
  grad = Point::Zero(x.size());
  double total = 0.0;
  for (const FittedGP& partial : ens.pgp) {
    const PredictionWithGradient p = posterior_with_gradient(partial, x);
    const double s = std::sqrt(p.variance + partial.hyperparams.noise_variance);
    const FoldedMoments m = folded_moments(p.mean, s);
    total += m.mean_abs + m.std_abs;
    grad += (m.dmean_dmu + m.dstd_dmu) * p.mean_gradient;
    if (s > kMinStd) grad += (m.dmean_ds + m.dstd_ds) / (2.0 * s) * p.variance_gradient;
  }
  return total;
}

double abs_gradient_value_and_gradient(const FittedGP& partial, const Point& x, Point& grad) {
  const PredictionWithGradient p = posterior_with_gradient(partial, x);
  const double s = std::sqrt(p.variance + partial.hyperparams.noise_variance);
  const FoldedMoments m = folded_moments(p.mean, s);
  grad = m.dmean_dmu * p.mean_gradient;
  if (s > kMinStd) grad += m.dmean_ds / (2.0 * s) * p.variance_gradient;
  return m.mean_abs;
}

double ei_value(const FittedGP& fgp, const Point& x, const Incumbent& inc) {
  const Prediction p = posterior(fgp, x);
  const double s = std::sqrt(p.variance + fgp.hyperparams.noise_variance);
  const double gap = p.mean - inc.value;
  if (s <= kMinStd) return std::max(gap, 0.0);
  return s * std::exp(normal::log_ei_kernel(gap / s));
}

double log_ei_value_and_gradient(const FittedGP& fgp, const Point& x, const Incumbent& inc,
                                 Point& grad) {
  const PredictionWithGradient p = posterior_with_gradient(fgp, x);
  const double s = std::max(std::sqrt(p.variance + fgp.hyperparams.noise_variance), kMinStd);
  const double z = (p.mean - inc.value) / s;
  const EiTerms e = ei_terms(z);
  // log EI = log s + log h(z); dEI/dmu = Phi(z), dEI/ds = phi(z).
  grad = (e.cdf_over_h / s) * p.mean_gradient + (e.pdf_over_h / s) / (2.0 * s) * p.variance_gradient;
  if (!grad.allFinite()) grad.setZero();
  return std::log(s) + e.log_h;
}

double gradient_window_probability(double mu, double s, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("gradient_window_probability: eps must be > 0");
  double dmu = 0.0, ds = 0.0;
  return std::exp(log_window(mu, s, eps, dmu, ds));
}

double log_gpi_value_and_gradient(const SurrogateEnsemble& ens, const Point& x,
                                  const Incumbent& inc, double eps_grad, double eps_pi, Point& grad) {
  if (!(eps_grad > 0.0)) throw std::invalid_argument("gpi_value: eps_grad must be > 0");
  check_ensemble(ens);
  grad = Point::Zero(x.size());

  const PredictionWithGradient f = posterior_with_gradient(ens.fgp, x);
  const double s0 = std::max(std::sqrt(f.variance + ens.fgp.hyperparams.noise_variance), kMinStd);
  const double z = (f.mean - inc.value - eps_pi * ens.fgp.target_scale) / s0;
  double total = normal::log_cdf(z);
  {
    const double ratio = std::exp(normal::log_pdf(z) - total);  // phi(z) / Phi(z)
    if (std::isfinite(ratio)) {
      grad += (ratio / s0) * f.mean_gradient;
      grad += (-z * ratio / s0) / (2.0 * s0) * f.variance_gradient;
    }
  }
  for (const FittedGP& partial : ens.pgp) {
    const PredictionWithGradient p = posterior_with_gradient(partial, x);
    const double s = std::sqrt(p.variance + partial.hyperparams.noise_variance);
    double dmu = 0.0, ds = 0.0;
    total += log_window(p.mean, s, eps_grad * partial.target_scale, dmu, ds);
    grad += dmu * p.mean_gradient;
    if (s > kMinStd) grad += ds / (2.0 * s) * p.variance_gradient;
  }
  if (!std::isfinite(total)) grad.setZero();
  return total;
}

double gpi_value(const SurrogateEnsemble& ens, const Point& x, const Incumbent& inc,
                 double eps_grad, double eps_pi) {
  Point unused;
  return std::exp(log_gpi_value_and_gradient(ens, x, inc, eps_grad, eps_pi, unused));
}

double significance(const FittedGP& fgp, const Point& x, double alpha) {
  const Prediction p = posterior(fgp, x);
  return p.mean + alpha * std::sqrt(p.variance);
}

}  // namespace fobo
