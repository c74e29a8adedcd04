#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "ripcert/common.hpp"

namespace ripcert {

/// A named closed-form bound value. Bounds are reported raw (not clamped to
/// [0,1]); vacuousness is itself experimental signal.
struct BoundReport {
  std::string name;
  std::vector<std::pair<std::string, double>> inputs;
  double bound_value = 0.0;
  bool vacuous = false;  // bound >= 1

  static BoundReport make(std::string name,
                          std::vector<std::pair<std::string, double>> inputs,
                          double value) {
    return BoundReport{std::move(name), std::move(inputs), value, value >= 1.0};
  }
};

struct BernoulliNormBounds {
  double upper = 0.0;     // P(||x||^2 > 1+mu) <= exp(-mu^2 rho n / 3)
  double lower = 0.0;     // P(||x||^2 < 1-mu) <= exp(-mu^2 rho n / 2)
  double two_sided = 0.0; // complement bound: 2 exp(-mu^2 rho n / 3)
};

/// Chernoff bounds for the prior norm ||x||^2 (a scaled Binomial count).
inline BernoulliNormBounds bernoulli_norm_bounds(double rho, Index n, double mu) {
  if (!(mu > 0.0 && mu <= 1.0))
    throw parameter_error("bernoulli_norm_bounds: mu must lie in (0, 1]");
  if (!(rho > 0.0 && rho < 1.0) || n < 1)
    throw parameter_error("bernoulli_norm_bounds: invalid rho or n");
  const double e = mu * mu * rho * static_cast<double>(n);
  return BernoulliNormBounds{std::exp(-e / 3.0), std::exp(-e / 2.0),
                             2.0 * std::exp(-e / 3.0)};
}

/// P(chi^2_m / m >= 1 + delta) <= exp(-delta^2 m / 12).
inline double chi2_upper_bound(Index m, double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw parameter_error("chi2_upper_bound: delta must lie in (0, 1)");
  if (m < 1) throw parameter_error("chi2_upper_bound: need m >= 1");
  return std::exp(-delta * delta * static_cast<double>(m) / 12.0);
}

/// P(planted sample is (s,delta)-RIP) <= exp(-delta^2 m/12)
/// + 2 exp(-(1-delta)^2 s/24); equally a bound on witness failure.
inline double planted_rip_prob_bound(Index m, Index s, double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw parameter_error("planted_rip_prob_bound: delta must lie in (0, 1)");
  if (m < 1 || s < 1) throw parameter_error("planted_rip_prob_bound: need m, s >= 1");
  return std::exp(-delta * delta * static_cast<double>(m) / 12.0) +
         2.0 * std::exp(-(1.0 - delta) * (1.0 - delta) * static_cast<double>(s) / 24.0);
}

struct NullNonRipBound {
  double value = 0.0;
  bool vacuous = false;
};

/// P(null sample is not (s,delta)-RIP) <= 2 exp(s log(9 e n / s)
/// - delta^2 m / 256).
inline NullNonRipBound null_nonrip_prob_bound(Index n, Index m, Index s, double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw parameter_error("null_nonrip_prob_bound: delta must lie in (0, 1)");
  if (s < 1 || s > n || m < 1)
    throw parameter_error("null_nonrip_prob_bound: need 1 <= s <= n and m >= 1");
  const double exponent =
      static_cast<double>(s) *
          std::log(9.0 * std::exp(1.0) * static_cast<double>(n) / static_cast<double>(s)) -
      delta * delta * static_cast<double>(m) / 256.0;
  const double v = 2.0 * std::exp(exponent);
  return NullNonRipBound{v, v >= 1.0};
}

struct ExperimentParams {
  double eps = 0.0;
  double rho = 0.0;
  double beta = 0.0;
};

/// Parameters of the planted-vs-null experiment: eps = (1-delta)/(2(1+delta)),
/// rho = s/(2n), beta = -(1-eps).
inline ExperimentParams derive_experiment_params(double delta, Index s, Index n) {
  if (!(delta > 0.0 && delta < 1.0))
    throw parameter_error("derive_experiment_params: delta must lie in (0, 1)");
  if (s < 1 || s > n) throw parameter_error("derive_experiment_params: need 1 <= s <= n");
  ExperimentParams p;
  p.eps = (1.0 - delta) / (2.0 * (1.0 + delta));
  p.rho = static_cast<double>(s) / (2.0 * static_cast<double>(n));
  p.beta = -(1.0 - p.eps);
  return p;
}

}  // namespace ripcert
