#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "ripcert/common.hpp"
#include "ripcert/parallel.hpp"
#include "ripcert/rng.hpp"
#include "ripcert/sampling.hpp"

namespace ripcert {

namespace detail {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kMaxLog = 709.782712893384;  // log(DBL_MAX)

/// Streaming log-sum-exp with a fixed accumulation order.
class LogSum {
 public:
  void add(double lx) {
    if (lx == kNegInf) return;
    if (lx <= max_) {
      acc_ += std::exp(lx - max_);
      return;
    }
    if (max_ == kNegInf) {
      max_ = lx;
      acc_ = 1.0;
      return;
    }
    acc_ = acc_ * std::exp(max_ - lx) + 1.0;
    max_ = lx;
  }

  double value() const {
    if (max_ == kNegInf) return kNegInf;
    return max_ + std::log(acc_);
  }

 private:
  double max_ = kNegInf;
  double acc_ = 0.0;
};

inline double log_binom(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return kNegInf;
  return std::lgamma(static_cast<double>(n) + 1.0) -
         std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

inline double log_binom_pmf(std::int64_t n, double p, std::int64_t k) {
  if (k < 0 || k > n) return kNegInf;
  return log_binom(n, k) + static_cast<double>(k) * std::log(p) +
         static_cast<double>(n - k) * std::log1p(-p);
}

// log P(overlap = k) for two independent uniform subsets of sizes a and b in
// a ground set of n elements.
inline double log_hypergeom_pmf(std::int64_t n, std::int64_t a, std::int64_t b,
                                std::int64_t k) {
  if (k < 0 || k > std::min(a, b) || a - k > n - b) return kNegInf;
  return log_binom(b, k) + log_binom(n - b, a - k) - log_binom(n, a);
}

}  // namespace detail

/// Taylor truncation of (1 - 4x)^{-m/2}: sum_{d<=k} x^d (1/d!) prod_a (2m+4a).
/// Coefficients live in log space; the series overflows doubles near d = 150
/// otherwise.
class PhiSeries {
 public:
  PhiSeries(std::int64_t m, int k) : m_(m), k_(k) {
    if (m < 1) throw parameter_error("phi series: need m >= 1");
    if (k < 0) throw parameter_error("phi series: need k >= 0");
    log_coef_.resize(static_cast<std::size_t>(k) + 1);
    log_coef_[0] = 0.0;
    for (int d = 1; d <= k; ++d)
      log_coef_[static_cast<std::size_t>(d)] =
          log_coef_[static_cast<std::size_t>(d) - 1] +
          std::log(2.0 * static_cast<double>(m) + 4.0 * (d - 1)) - std::log(d);
  }

  std::int64_t m() const { return m_; }
  int degree() const { return k_; }

  /// log of the truncated series; requires x >= 0 (all terms nonnegative).
  double log_eval(double x) const {
    if (x < 0.0) throw parameter_error("phi series: log_eval needs x >= 0");
    if (x == 0.0 || k_ == 0) return 0.0;
    const double lx = std::log(x);
    detail::LogSum sum;
    for (int d = 0; d <= k_; ++d)
      sum.add(log_coef_[static_cast<std::size_t>(d)] + d * lx);
    return sum.value();
  }

  /// Series value. Errors (naming the offending degree) when the result
  /// leaves the double range; handles x < 0 with alternating terms.
  double eval(double x) const {
    if (x >= 0.0) {
      const double lv = log_eval(x);
      if (lv > detail::kMaxLog) throw phi_overflow(overflow_message(x), argmax_degree(x), x);
      return std::exp(lv);
    }
    const double lx = std::log(-x);
    double sum = 0.0;
    for (int d = 0; d <= k_; ++d) {
      const double lterm = log_coef_[static_cast<std::size_t>(d)] + d * lx;
      if (lterm > detail::kMaxLog) throw phi_overflow(overflow_message(x), d, x);
      sum += (d % 2 == 0 ? 1.0 : -1.0) * std::exp(lterm);
    }
    return sum;
  }

 private:
  int argmax_degree(double x) const {
    const double lx = std::log(x);
    int best = 0;
    double best_l = detail::kNegInf;
    for (int d = 0; d <= k_; ++d) {
      const double l = log_coef_[static_cast<std::size_t>(d)] + d * lx;
      if (l > best_l) {
        best_l = l;
        best = d;
      }
    }
    return best;
  }

  std::string overflow_message(double x) const {
    return "phi series: value exceeds double range at x = " + std::to_string(x) +
           " (dominant degree " + std::to_string(argmax_degree(x)) + ")";
  }

  std::int64_t m_;
  int k_;
  std::vector<double> log_coef_;
};

inline double phi_truncated(std::int64_t m, int k, double x) {
  return PhiSeries(m, k).eval(x);
}

enum class LdlrMethod { monte_carlo, exact_overlap };
enum class PriorKind { raw, truncated };

struct LdlrEstimate {
  int degree = 0;
  double value = 1.0;
  double stderr_value = 0.0;  // 0 for the exact method
  std::uint64_t samples = 0;
  LdlrMethod method = LdlrMethod::exact_overlap;
  PriorKind prior = PriorKind::raw;
};

namespace detail {

inline PriorKind prior_kind(double eps) {
  return eps < 1.0 ? PriorKind::truncated : PriorKind::raw;
}

// log E[f] where the expectation runs over the signed overlap of two
// independent prior draws: conditional on |S1 cap S2| = k, the inner product
// is (k - 2j)/(rho*n) with weight C(k,j)/2^k. `log_f` maps the inner product
// to the log of a nonnegative integrand.
template <class LogF>
double overlap_inner_log(std::int64_t k, double rho_n, LogF&& log_f) {
  LogSum sum;
  const double lhalf = -static_cast<double>(k) * std::log(2.0);
  for (std::int64_t j = 0; j <= k; ++j) {
    const double t = static_cast<double>(k - 2 * j) / rho_n;
    sum.add(log_binom(k, j) + lhalf + log_f(t));
  }
  return sum.value();
}

// Exact expectation over the raw prior via the direct overlap law
// |S1 cap S2| ~ Binomial(n, rho^2).
template <class LogF>
double expect_overlap_binomial_log(Index n, double rho, LogF&& log_f) {
  const double rho_n = rho * static_cast<double>(n);
  LogSum total;
  for (std::int64_t k = 0; k <= n; ++k)
    total.add(log_binom_pmf(n, rho * rho, k) + overlap_inner_log(k, rho_n, log_f));
  return total.value();
}

// Exact expectation over the (possibly truncated) prior by conditioning each
// spike on its support size (Binomial law, truncation folds sizes above the
// cutoff into the empty support) and the overlap on both sizes
// (hypergeometric). Independent summation order from the route above.
template <class LogF>
double expect_overlap_support_log(Index n, double rho, double eps, LogF&& log_f,
                                  double cost_ceiling = 1e10) {
  const std::int64_t cutoff = truncation_cutoff(n, rho, eps);
  const double rho_n = rho * static_cast<double>(n);

  const double cost = static_cast<double>(cutoff + 1) * static_cast<double>(cutoff + 1) *
                      static_cast<double>(cutoff + 1);
  if (cost > cost_ceiling)
    throw refusal("ldlr exact: support enumeration needs ~" + std::to_string(cost) +
                      " terms, above " + std::to_string(cost_ceiling),
                  cost);

  // weight of effective support size a (truncated draws have empty support)
  std::vector<double> log_w(static_cast<std::size_t>(cutoff) + 1, kNegInf);
  {
    LogSum zero_mass;
    zero_mass.add(log_binom_pmf(n, rho, 0));
    for (std::int64_t a = cutoff + 1; a <= n; ++a) zero_mass.add(log_binom_pmf(n, rho, a));
    log_w[0] = zero_mass.value();
    for (std::int64_t a = 1; a <= cutoff; ++a)
      log_w[static_cast<std::size_t>(a)] = log_binom_pmf(n, rho, a);
  }

  std::vector<double> inner(static_cast<std::size_t>(cutoff) + 1);
  for (std::int64_t k = 0; k <= cutoff; ++k)
    inner[static_cast<std::size_t>(k)] = overlap_inner_log(k, rho_n, log_f);

  LogSum total;
  for (std::int64_t a = 0; a <= cutoff; ++a)
    for (std::int64_t b = 0; b <= cutoff; ++b) {
      LogSum cond;
      const std::int64_t kmax = std::min(a, b);
      for (std::int64_t k = std::max<std::int64_t>(0, a + b - n); k <= kmax; ++k)
        cond.add(log_hypergeom_pmf(n, a, b, k) + inner[static_cast<std::size_t>(k)]);
      total.add(log_w[static_cast<std::size_t>(a)] + log_w[static_cast<std::size_t>(b)] +
                cond.value());
    }
  return total.value();
}

// 2d-th moment of the overlap <v1, v2>, exact. Used by tests for the
// truncated <= raw moment inequality.
inline double overlap_moment_exact(Index n, double rho, double eps, int d) {
  auto log_f = [d](double t) {
    if (t == 0.0) return kNegInf;
    return 2.0 * d * std::log(std::abs(t));
  };
  if (d == 0) return 1.0;
  const double lv = eps >= 1.0 ? expect_overlap_binomial_log(n, rho, log_f)
                               : expect_overlap_support_log(n, rho, eps, log_f);
  return std::exp(lv);
}

}  // namespace detail

/// Monte-Carlo estimate of ||L^{<=D}||^2: averages
/// phi_{m, floor(D/2)}(beta^2 <v1,v2>^2 / 4) over independent spike pairs
/// drawn from the prior truncated per eps (eps = 1 means the raw prior).
inline LdlrEstimate ldlr_norm_mc(const WishartParams& params, double eps, int D,
                                 std::uint64_t num_pairs, std::uint64_t seed,
                                 int threads = 1) {
  params.validate();
  detail::validate_eps(eps);
  if (D < 0) throw parameter_error("ldlr_norm_mc: need D >= 0");
  if (num_pairs < 2) throw parameter_error("ldlr_norm_mc: need num_pairs >= 2");

  LdlrEstimate est;
  est.degree = D;
  est.samples = num_pairs;
  est.method = LdlrMethod::monte_carlo;
  est.prior = detail::prior_kind(eps);

  const int kdeg = D / 2;
  if (params.beta == 0.0 || kdeg == 0) {
    est.value = 1.0;  // phi(0) = 1 and the degree floor kills every term
    est.stderr_value = 0.0;
    return est;
  }

  const PhiSeries phi(params.m, kdeg);
  const double beta_sq = params.beta * params.beta;
  const double rho = params.prior.rho;
  const Index n = params.n;

  constexpr std::uint64_t kChunk = 4096;
  const std::uint64_t n_chunks = (num_pairs + kChunk - 1) / kChunk;
  struct Partial {
    double sum = 0.0, sumsq = 0.0;
  };
  std::vector<Partial> partials(n_chunks);

  run_chunks(n_chunks, threads, [&](std::uint64_t c) {
    rng::Stream stream(rng::derive_stream(seed, c));
    const std::uint64_t lo = c * kChunk;
    const std::uint64_t hi = std::min(num_pairs, lo + kChunk);
    Eigen::VectorXd v1, v2;
    Partial p;
    for (std::uint64_t i = lo; i < hi; ++i) {
      detail::fill_sparse_rademacher(stream, n, rho, v1);
      detail::fill_sparse_rademacher(stream, n, rho, v2);
      detail::truncate_spike(n, rho, eps, v1);
      detail::truncate_spike(n, rho, eps, v2);
      const double ip = v1.dot(v2);
      const double lx = phi.log_eval(beta_sq * ip * ip / 4.0);
      if (lx > detail::kMaxLog)
        throw phi_overflow("ldlr_norm_mc: phi overflow at overlap " + std::to_string(ip),
                           phi.degree(), beta_sq * ip * ip / 4.0);
      const double val = std::exp(lx);
      p.sum += val;
      p.sumsq += val * val;
    }
    partials[c] = p;
  });

  double sum = 0.0, sumsq = 0.0;
  for (const auto& p : partials) {  // chunk order: thread-count independent
    sum += p.sum;
    sumsq += p.sumsq;
  }
  const double nd = static_cast<double>(num_pairs);
  est.value = sum / nd;
  const double var = std::max(0.0, (sumsq - sum * sum / nd) / (nd - 1.0));
  est.stderr_value = std::sqrt(var / nd);
  return est;
}

/// Exact ||L^{<=D}||^2 through the overlap distribution. Raw prior: the
/// overlap count is Binomial(n, rho^2). Truncated prior: each spike is
/// conditioned on its support size with truncated sizes folded to zero, and
/// the overlap is hypergeometric given both sizes.
inline LdlrEstimate ldlr_norm_exact(const WishartParams& params, double eps, int D) {
  params.validate();
  detail::validate_eps(eps);
  if (D < 0) throw parameter_error("ldlr_norm_exact: need D >= 0");
  if (params.n > 10'000)
    throw refusal("ldlr_norm_exact: overlap enumeration limited to n <= 10^4",
                  static_cast<double>(params.n) * static_cast<double>(params.n));

  LdlrEstimate est;
  est.degree = D;
  est.method = LdlrMethod::exact_overlap;
  est.prior = detail::prior_kind(eps);
  est.samples = 0;

  const int kdeg = D / 2;
  if (params.beta == 0.0 || kdeg == 0) {
    est.value = 1.0;
    return est;
  }

  const PhiSeries phi(params.m, kdeg);
  const double beta_sq = params.beta * params.beta;
  auto log_f = [&](double t) { return phi.log_eval(beta_sq * t * t / 4.0); };

  const double lv = est.prior == PriorKind::raw
                        ? detail::expect_overlap_binomial_log(params.n, params.prior.rho, log_f)
                        : detail::expect_overlap_support_log(params.n, params.prior.rho, eps,
                                                             log_f);
  est.value = lv > detail::kMaxLog ? std::numeric_limits<double>::infinity() : std::exp(lv);
  return est;
}

struct MomentBoundReport {
  double q = 0.0;      // geometric ratio
  double bound = 1.0;  // sum of q^d for d <= floor(D/2)
  bool diverging = false;  // q >= 1
};

/// Closed-form geometric bound on the truncated-prior ||L^{<=D}||^2 at
/// rho = s/(2n): q = beta^2 ((m+2D)/n + 4 sqrt(2D) (m+2D)/(s sqrt(n))
/// + 6 D (m+2D)/s^2), bound = sum_{d <= floor(D/2)} q^d.
inline MomentBoundReport ldlr_moment_bound(Index n, Index m, Index s, int D, double beta) {
  if (!(s >= 1 && s <= m && m <= n))
    throw parameter_error("ldlr_moment_bound: need 1 <= s <= m <= n");
  if (D < 0) throw parameter_error("ldlr_moment_bound: need D >= 0");

  const double nd = static_cast<double>(n), md = static_cast<double>(m),
               sd = static_cast<double>(s), Dd = static_cast<double>(D);
  const double m2d = md + 2.0 * Dd;
  MomentBoundReport rep;
  rep.q = beta * beta *
          (m2d / nd + 4.0 * std::sqrt(2.0 * Dd) * m2d / (sd * std::sqrt(nd)) +
           6.0 * Dd * m2d / (sd * sd));
  rep.diverging = rep.q >= 1.0;

  double bound = 0.0, term = 1.0;
  for (int d = 0; d <= D / 2; ++d) {
    bound += term;
    term *= rep.q;
    if (!std::isfinite(bound)) break;
  }
  rep.bound = bound;
  return rep;
}

}  // namespace ripcert
