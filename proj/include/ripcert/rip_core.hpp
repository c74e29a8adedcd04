#pragma once

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ripcert/common.hpp"
#include "ripcert/parallel.hpp"
#include "ripcert/rng.hpp"
#include "ripcert/subsets.hpp"

namespace ripcert {

struct RipParams {
  int s = 0;
  double delta = 0.0;

  void validate(Index n) const {
    if (s < 1 || static_cast<Index>(s) > n)
      throw parameter_error("rip params: need 1 <= s <= n");
    if (!(delta > 0.0 && delta < 1.0))
      throw parameter_error("rip params: delta must lie in (0, 1)");
  }
};

struct RestrictedNormResult {
  double value = 0.0;
  std::vector<Index> argmax_support;
  std::uint64_t subsets_examined = 0;
};

struct EnumerationPolicy {
  enum class Kind { exhaustive, sampled };

  Kind kind = Kind::exhaustive;
  std::uint64_t samples = 0;  // sampled policy only
  std::uint64_t seed = 0;     // sampled policy only
  std::uint64_t ceiling = 100'000'000ull;
  bool override_ceiling = false;
  int threads = 1;

  static EnumerationPolicy sampled_policy(std::uint64_t samples, std::uint64_t seed) {
    EnumerationPolicy p;
    p.kind = Kind::sampled;
    p.samples = samples;
    p.seed = seed;
    return p;
  }
};

namespace detail {

// Spectral norm (largest |eigenvalue|) of the leading r x r block of a
// symmetric matrix. Closed form up to r = 2; tridiagonalization + QL via
// Eigen beyond that. The solver member reuses its workspace across calls.
struct SpectralWorkspace {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;

  double spectral_norm(const Eigen::MatrixXd& g, int r) {
    if (r == 1) return std::abs(g(0, 0));
    if (r == 2) {
      const double a = g(0, 0), b = g(1, 1), c = g(0, 1);
      const double mid = 0.5 * (a + b);
      const double rad = std::sqrt(0.25 * (a - b) * (a - b) + c * c);
      return std::max(std::abs(mid + rad), std::abs(mid - rad));
    }
    solver.compute(g.topLeftCorner(r, r), Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();
    return std::max(std::abs(ev(0)), std::abs(ev(r - 1)));
  }
};

inline void check_columns_finite(const Eigen::MatrixXd& x, std::span<const Index> cols,
                                 const char* who) {
  for (Index j : cols)
    if (!x.col(j).allFinite())
      throw data_error(std::string(who) + ": non-finite entries in column " +
                       std::to_string(j));
}

// Deviation Gram entry <x_a, x_b> - [a == b] for the scaled matrix.
inline double deviation_entry(const Eigen::MatrixXd& x, Index a, Index b) {
  return x.col(a).dot(x.col(b)) - (a == b ? 1.0 : 0.0);
}

struct RangeBest {
  double value = -std::numeric_limits<double>::infinity();
  std::vector<Index> support;
};

// Walks the colex subsets with rank in [lo, hi), maintaining the deviation
// Gram incrementally: a successor step that changes positions 0..i only
// recomputes pairs touching those positions, so the common i = 0 step costs
// r column dots instead of r^2.
template <class Visit>
void walk_colex_range(const Eigen::MatrixXd& x, int r, std::uint64_t lo,
                      std::uint64_t hi, Visit&& visit) {
  if (lo >= hi) return;
  const Index n = x.cols();
  std::vector<Index> cols;
  colex_unrank(lo, r, n, cols);

  Eigen::MatrixXd g(r, r);
  auto refresh_pairs = [&](int changed_max) {
    for (int a = 0; a <= changed_max; ++a)
      for (int b = a; b < r; ++b) {
        const double v = deviation_entry(x, cols[static_cast<std::size_t>(a)],
                                         cols[static_cast<std::size_t>(b)]);
        g(a, b) = v;
        g(b, a) = v;
      }
  };
  refresh_pairs(r - 1);

  for (std::uint64_t rank = lo;; ++rank) {
    visit(g, cols);
    if (rank + 1 >= hi) break;
    const int changed = colex_next(cols, n);
    refresh_pairs(changed);
  }
}

}  // namespace detail

/// Spectral norm of X_S^T X_S - I over the given support. Requires the
/// inv-sqrt-m scale tag; S must be nonempty with distinct in-range indices.
inline double restricted_gram_norm(const SensingMatrix& x, std::span<const Index> support) {
  require_scaled(x, "restricted_gram_norm");
  if (support.empty()) throw parameter_error("restricted_gram_norm: empty support");
  std::vector<Index> s(support.begin(), support.end());
  std::sort(s.begin(), s.end());
  if (s.front() < 0 || s.back() >= x.cols())
    throw parameter_error("restricted_gram_norm: support index out of range");
  if (std::adjacent_find(s.begin(), s.end()) != s.end())
    throw parameter_error("restricted_gram_norm: repeated support index");
  detail::check_columns_finite(x.data, s, "restricted_gram_norm");

  const int r = static_cast<int>(s.size());
  Eigen::MatrixXd g(r, r);
  for (int a = 0; a < r; ++a)
    for (int b = a; b < r; ++b) {
      const double v = detail::deviation_entry(x.data, s[static_cast<std::size_t>(a)],
                                               s[static_cast<std::size_t>(b)]);
      g(a, b) = v;
      g(b, a) = v;
    }
  detail::SpectralWorkspace ws;
  return ws.spectral_norm(g, r);
}

/// B_r(X) under the exhaustive policy; a lower bound on it (with the
/// maximizing sampled support) under the sampled policy. Ties go to the
/// colex-lowest support, independent of the thread count.
inline RestrictedNormResult max_restricted_norm(const SensingMatrix& x, int r,
                                                const EnumerationPolicy& policy = {}) {
  require_scaled(x, "max_restricted_norm");
  const Index n = x.cols();
  if (r < 1 || static_cast<Index>(r) > n)
    throw parameter_error("max_restricted_norm: need 1 <= r <= n");
  if (!x.all_finite()) throw data_error("max_restricted_norm: non-finite entries");

  if (policy.kind == EnumerationPolicy::Kind::exhaustive) {
    const std::uint64_t total =
        binom_capped(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(r));
    if (total > policy.ceiling && !policy.override_ceiling) {
      const double est = total == kBinomSaturated
                             ? std::numeric_limits<double>::infinity()
                             : static_cast<double>(total);
      throw refusal("max_restricted_norm: exhaustive enumeration needs " +
                        (total == kBinomSaturated ? std::string("> 1.8e19")
                                                  : std::to_string(total)) +
                        " subsets, above the ceiling of " + std::to_string(policy.ceiling),
                    est);
    }

    const std::uint64_t n_ranges =
        std::max<std::uint64_t>(1, std::min<std::uint64_t>(
                                       total, policy.threads < 1 ? 1 : policy.threads));
    std::vector<detail::RangeBest> best(n_ranges);
    run_chunks(n_ranges, policy.threads, [&](std::uint64_t c) {
      auto [lo, hi] = chunk_bounds(total, c, n_ranges);
      detail::SpectralWorkspace ws;
      detail::RangeBest local;
      detail::walk_colex_range(x.data, r, lo, hi,
                               [&](const Eigen::MatrixXd& g, const std::vector<Index>& cols) {
                                 const double v = ws.spectral_norm(g, r);
                                 if (v > local.value) {  // first hit = lowest colex
                                   local.value = v;
                                   local.support = cols;
                                 }
                               });
      best[c] = std::move(local);
    });

    RestrictedNormResult out;
    out.subsets_examined = total;
    out.value = -std::numeric_limits<double>::infinity();
    for (const auto& b : best) {
      if (b.value > out.value) {
        out.value = b.value;
        out.argmax_support = b.support;
      }
    }
    return out;
  }

  // sampled policy: fixed-size logical chunks keep the reduction identical
  // across thread counts
  if (policy.samples < 1) throw parameter_error("max_restricted_norm: sampled policy needs samples >= 1");
  constexpr std::uint64_t kChunk = 1024;
  const std::uint64_t n_chunks = (policy.samples + kChunk - 1) / kChunk;
  std::vector<detail::RangeBest> best(n_chunks);
  run_chunks(n_chunks, policy.threads, [&](std::uint64_t c) {
    const std::uint64_t lo = c * kChunk;
    const std::uint64_t hi = std::min(policy.samples, lo + kChunk);
    detail::SpectralWorkspace ws;
    detail::RangeBest local;
    Eigen::MatrixXd g(r, r);
    std::vector<Index> cols;
    std::vector<char> taken(static_cast<std::size_t>(n));
    for (std::uint64_t idx = lo; idx < hi; ++idx) {
      rng::Stream stream(rng::derive_stream(policy.seed, idx));
      cols.clear();
      std::fill(taken.begin(), taken.end(), 0);
      for (Index k = n - r; k < n; ++k) {  // Floyd's uniform r-subset
        Index cand = static_cast<Index>(stream.below(static_cast<std::uint64_t>(k) + 1));
        if (taken[static_cast<std::size_t>(cand)]) cand = k;
        taken[static_cast<std::size_t>(cand)] = 1;
        cols.push_back(cand);
      }
      std::sort(cols.begin(), cols.end());
      for (int a = 0; a < r; ++a)
        for (int b = a; b < r; ++b) {
          const double v = detail::deviation_entry(x.data, cols[static_cast<std::size_t>(a)],
                                                   cols[static_cast<std::size_t>(b)]);
          g(a, b) = v;
          g(b, a) = v;
        }
      const double v = ws.spectral_norm(g, r);
      if (v > local.value ||
          (v == local.value && !local.support.empty() && colex_less(cols, local.support))) {
        local.value = v;
        local.support = cols;
      }
    }
    best[c] = std::move(local);
  });

  RestrictedNormResult out;
  out.subsets_examined = policy.samples;
  out.value = -std::numeric_limits<double>::infinity();
  for (const auto& b : best) {
    if (b.value > out.value ||
        (b.value == out.value && !b.support.empty() && !out.argmax_support.empty() &&
         colex_less(b.support, out.argmax_support))) {
      out.value = b.value;
      out.argmax_support = b.support;
    }
  }
  return out;
}

struct RipDecision {
  bool is_rip = false;
  RestrictedNormResult detail;  // witness support when is_rip is false
};

/// Exact decision: X is (s, delta)-RIP iff B_s(X) <= delta. Refuses rather
/// than guesses when the enumeration exceeds the cost ceiling.
inline RipDecision is_rip_exact(const SensingMatrix& x, const RipParams& params,
                                EnumerationPolicy policy = {}) {
  params.validate(x.cols());
  policy.kind = EnumerationPolicy::Kind::exhaustive;
  RipDecision d;
  d.detail = max_restricted_norm(x, params.s, policy);
  d.is_rip = d.detail.value <= params.delta;
  return d;
}

}  // namespace ripcert
