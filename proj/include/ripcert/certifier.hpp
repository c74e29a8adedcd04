#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "ripcert/common.hpp"
#include "ripcert/rip_core.hpp"

namespace ripcert {

/// Configuration of the lazy certifier: enumerate supports of size r and
/// scale B_r by (s-1)/(r-1) to bound B_s.
struct LazyConfig {
  int r = 2;
  int s = 2;
  double delta = 0.0;
  bool normalize_columns = true;  // the scaling step assumes unit columns
  double c_r = 1.0;
  EnumerationPolicy policy;

  void validate(Index n) const {
    if (s < 2 || static_cast<Index>(s) > n)
      throw parameter_error("lazy certifier: need 2 <= s <= n");
    if (r <= 1 || r > s)
      throw parameter_error("lazy certifier: need 1 < r <= s");
    if (!(delta > 0.0 && delta < 1.0))
      throw parameter_error("lazy certifier: delta must lie in (0, 1)");
  }
};

struct CertificateOutcome {
  bool yes = false;
  double b_r = 0.0;
  double scaled_bound = 0.0;   // ((s-1)/(r-1)) * b_r
  int r_used = 0;
  bool exact_regime = false;   // r == s: the certifier degenerated to the exact decision
  std::optional<std::vector<Index>> witness;  // argmax support on a "no"
};

/// Subset size for the lazy certifier: clamp(ceil(c_r * s^2 * ln(n) /
/// (delta^2 * m)), 2, s). Exposed pre-clamp for the tradeoff sweep.
inline double select_r_raw(int s, Index m, Index n, double delta, double c_r = 1.0) {
  if (s < 2) throw parameter_error("select_r: need s >= 2");
  if (m < 1 || n < 1) throw parameter_error("select_r: need m, n >= 1");
  if (!(delta > 0.0 && delta < 1.0))
    throw parameter_error("select_r: delta must lie in (0, 1)");
  if (!(c_r > 0.0)) throw parameter_error("select_r: need c_r > 0");
  return c_r * static_cast<double>(s) * static_cast<double>(s) *
         std::log(static_cast<double>(n)) /
         (delta * delta * static_cast<double>(m));
}

inline int select_r(int s, Index m, Index n, double delta, double c_r = 1.0) {
  const double raw = select_r_raw(s, m, n, delta, c_r);
  const double up = std::ceil(raw);
  int r = up >= static_cast<double>(s) ? s : static_cast<int>(up);
  if (r < 2) r = 2;
  return r;
}

/// Unit-column copy. Throws data_error on a zero column.
inline SensingMatrix normalize_columns(const SensingMatrix& x) {
  SensingMatrix out = x;
  for (Index j = 0; j < out.data.cols(); ++j) {
    const double norm = out.data.col(j).norm();
    if (norm == 0.0) throw data_error("normalize_columns: zero column " + std::to_string(j));
    out.data.col(j) /= norm;
  }
  return out;
}

/// The lazy certifier: computes B_r exhaustively and answers yes iff
/// ((s-1)/(r-1)) * B_r <= delta. A yes certifies the matrix it actually
/// examined (after column normalization when that is enabled).
inline CertificateOutcome lazy_certify(const SensingMatrix& x, const LazyConfig& cfg) {
  require_scaled(x, "lazy_certify");
  cfg.validate(x.cols());
  if (!x.all_finite()) throw data_error("lazy_certify: non-finite entries");

  const SensingMatrix* target = &x;
  SensingMatrix normalized;
  if (cfg.normalize_columns) {
    normalized = normalize_columns(x);
    target = &normalized;
  }

  EnumerationPolicy policy = cfg.policy;
  policy.kind = EnumerationPolicy::Kind::exhaustive;
  RestrictedNormResult res = max_restricted_norm(*target, cfg.r, policy);

  CertificateOutcome out;
  out.b_r = res.value;
  out.r_used = cfg.r;
  out.exact_regime = (cfg.r == cfg.s);
  out.scaled_bound =
      (static_cast<double>(cfg.s) - 1.0) / (static_cast<double>(cfg.r) - 1.0) * res.value;
  out.yes = out.scaled_bound <= cfg.delta;
  if (!out.yes) out.witness = res.argmax_support;
  return out;
}

/// Problem-1 wrapper: pick r by the selection rule, then run the lazy
/// certifier. Never answers yes on a non-RIP input (it refuses when the
/// enumeration is infeasible rather than guessing).
inline CertificateOutcome certify_problem1(const SensingMatrix& x, int s, double delta,
                                           double c_r = 1.0,
                                           const EnumerationPolicy& policy = {},
                                           bool normalize = true) {
  require_scaled(x, "certify_problem1");
  if (!x.all_finite()) throw data_error("certify_problem1: non-finite entries");
  LazyConfig cfg;
  cfg.s = s;
  cfg.delta = delta;
  cfg.c_r = c_r;
  cfg.r = select_r(s, x.rows(), x.cols(), delta, c_r);
  cfg.normalize_columns = normalize;
  cfg.policy = policy;
  return lazy_certify(x, cfg);
}

}  // namespace ripcert
