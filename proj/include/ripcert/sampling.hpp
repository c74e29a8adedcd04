#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "ripcert/common.hpp"
#include "ripcert/parallel.hpp"
#include "ripcert/rng.hpp"

namespace ripcert {

/// Sparse Rademacher prior: each entry is +-1/sqrt(rho*n) with probability
/// rho/2 each, 0 otherwise.
struct SparseRademacherParams {
  Index n = 0;
  double rho = 0.0;

  void validate() const {
    if (n < 1) throw parameter_error("sparse Rademacher prior: n must be >= 1");
    if (!(rho > 0.0 && rho < 1.0))
      throw parameter_error("sparse Rademacher prior: rho must lie in (0, 1)");
  }
};

/// Spiked Wishart model parameters: m rows, n columns, spike strength beta,
/// and the spike prior.
struct WishartParams {
  Index n = 0;
  Index m = 0;
  double beta = 0.0;
  SparseRademacherParams prior;

  void validate() const {
    prior.validate();
    if (prior.n != n) throw parameter_error("Wishart params: prior dimension must equal n");
    if (m < 1 || m > n) throw parameter_error("Wishart params: need 1 <= m <= n");
    if (!(beta >= -1.0) || !std::isfinite(beta))
      throw parameter_error("Wishart params: beta must lie in [-1, inf)");
  }
};

/// One draw from the planted or null model. `truncated` means the spike made
/// the covariance indefinite (beta*||x||^2 < -1) and the rows were drawn
/// isotropically with the spike ignored.
struct SpikedSample {
  Eigen::MatrixXd matrix;  // m x n, entries under the raw N(0,1) convention
  std::optional<Eigen::VectorXd> spike;
  bool truncated = false;
};

namespace detail {

// Stream layout for matrix draws: stream 0 is the spike, row i uses stream
// i+1. The null sampler uses the same row streams, so a beta = 0 planted
// draw is bitwise identical to the null draw with the same seed.
inline constexpr std::uint64_t kSpikeStream = 0;

inline std::uint64_t row_stream(std::uint64_t seed, Index i) {
  return rng::derive_stream(seed, static_cast<std::uint64_t>(i) + 1);
}

inline void fill_sparse_rademacher(rng::Stream& stream, Index n, double rho,
                                   Eigen::VectorXd& out) {
  const std::uint64_t t_plus = rng::probability_threshold(rho / 2.0);
  const std::uint64_t t_any = rng::probability_threshold(rho);
  const double mag = 1.0 / std::sqrt(rho * static_cast<double>(n));
  out.resize(n);
  for (Index i = 0; i < n; ++i) {
    const std::uint64_t u = stream.next_u64();
    out[i] = u < t_plus ? mag : (u < t_any ? -mag : 0.0);
  }
}

// Largest support size the truncated prior keeps. A prior draw has
// ||x||^2 = ||x||_0/(rho*n) exactly, so the predicate -(1-eps)||x||^2 < -1
// is the integer condition ||x||_0 > rho*n/(1-eps); deciding on the count
// keeps samplers and exact enumerations consistent at integral thresholds.
// The nudge protects thresholds that are meant to be integral.
inline std::int64_t truncation_cutoff(Index n, double rho, double eps) {
  if (eps >= 1.0) return n;
  const double thresh = rho * static_cast<double>(n) / (1.0 - eps);
  const auto t = static_cast<std::int64_t>(std::floor(thresh * (1.0 + 1e-12) + 1e-12));
  return std::min<std::int64_t>(t, n);
}

// Zeroes the draw when -(1-eps)*||x||^2 < -1. At eps = 1 the predicate is
// vacuously false, i.e. the raw prior.
inline void truncate_spike(Index n, double rho, double eps, Eigen::VectorXd& x) {
  if (eps >= 1.0) return;
  const std::int64_t cutoff = truncation_cutoff(n, rho, eps);
  std::int64_t nnz = 0;
  for (Index i = 0; i < x.size(); ++i) nnz += x[i] != 0.0;
  if (nnz > cutoff) x.setZero();
}

inline void validate_eps(double eps) {
  if (!(eps > 0.0 && eps <= 1.0))
    throw parameter_error("truncated prior: eps must lie in (0, 1]");
}

// Fills row `i` of `mat` with N(0, I + beta*x*x^T) via a rank-one update of
// an isotropic draw: u = g + c*<g,x>*x with c = (sqrt(1+beta*t)-1)/t,
// t = ||x||^2. Exact row covariance, O(n + nnz) per row.
inline void fill_planted_row(rng::Stream& stream, const Eigen::VectorXd& x,
                             const std::vector<Index>& support, double c,
                             Eigen::MatrixXd& mat, Index i) {
  const Index n = x.size();
  for (Index j = 0; j < n; ++j) mat(i, j) = stream.gauss();
  if (c == 0.0 || support.empty()) return;
  double dot = 0.0;
  for (Index j : support) dot += mat(i, j) * x[j];
  const double scale = c * dot;
  for (Index j : support) mat(i, j) += scale * x[j];
}

}  // namespace detail

/// One draw from the sparse Rademacher prior. Deterministic given
/// (params, seed).
inline Eigen::VectorXd sample_sparse_rademacher(const SparseRademacherParams& params,
                                                std::uint64_t seed) {
  params.validate();
  rng::Stream stream(rng::derive_stream(seed, 0));
  Eigen::VectorXd x;
  detail::fill_sparse_rademacher(stream, params.n, params.rho, x);
  return x;
}

/// Prior draw, replaced by the zero vector when the spike would make
/// I - (1-eps)*x*x^T indefinite. Uses the same stream as
/// sample_sparse_rademacher, so an untruncated draw equals the raw draw.
inline Eigen::VectorXd sample_truncated_prior(const SparseRademacherParams& params,
                                              double eps, std::uint64_t seed) {
  detail::validate_eps(eps);
  Eigen::VectorXd x = sample_sparse_rademacher(params, seed);
  detail::truncate_spike(params.n, params.rho, eps, x);
  return x;
}

/// Batch of independent prior draws; draw i uses stream derive(seed, i).
inline std::vector<Eigen::VectorXd> sample_prior_batch(const SparseRademacherParams& params,
                                                       std::uint64_t count,
                                                       std::uint64_t seed,
                                                       int threads = 1) {
  params.validate();
  std::vector<Eigen::VectorXd> out(count);
  run_chunks(count, threads, [&](std::uint64_t i) {
    rng::Stream stream(rng::derive_stream(seed, i));
    detail::fill_sparse_rademacher(stream, params.n, params.rho, out[i]);
  });
  return out;
}

/// Null model: all m*n entries i.i.d. standard Gaussian.
inline SpikedSample sample_null(Index m, Index n, std::uint64_t seed,
                                int threads = 1) {
  if (m < 1 || n < 1) throw parameter_error("sample_null: need m, n >= 1");
  SpikedSample s;
  s.matrix.resize(m, n);
  run_chunks(static_cast<std::uint64_t>(m), threads, [&](std::uint64_t i) {
    rng::Stream stream(detail::row_stream(seed, static_cast<Index>(i)));
    for (Index j = 0; j < n; ++j) s.matrix(static_cast<Index>(i), j) = stream.gauss();
  });
  return s;
}

/// Planted rows around a fixed spike x: N(0, I + beta*x*x^T) when feasible,
/// isotropic with truncated = true otherwise. x = 0 counts as feasible.
inline SpikedSample sample_planted_with_spike(Index m, Index n, double beta,
                                              const Eigen::VectorXd& x,
                                              std::uint64_t seed, int threads = 1) {
  if (m < 1 || n < 1) throw parameter_error("sample_planted_with_spike: need m, n >= 1");
  if (x.size() != n) throw parameter_error("sample_planted_with_spike: spike has wrong dimension");
  SpikedSample s;
  s.spike = x;
  s.matrix.resize(m, n);

  const double t = x.squaredNorm();
  double c = 0.0;
  if (t > 0.0 && beta * t >= -1.0) {
    c = (std::sqrt(1.0 + beta * t) - 1.0) / t;
  } else if (t > 0.0) {
    s.truncated = true;  // indefinite covariance: rows stay isotropic
  }

  std::vector<Index> support;
  for (Index j = 0; j < n; ++j)
    if (x[j] != 0.0) support.push_back(j);

  const double c_used = s.truncated ? 0.0 : c;
  run_chunks(static_cast<std::uint64_t>(m), threads, [&](std::uint64_t i) {
    rng::Stream stream(detail::row_stream(seed, static_cast<Index>(i)));
    detail::fill_planted_row(stream, x, support, c_used, s.matrix,
                             static_cast<Index>(i));
  });
  return s;
}

/// Planted model: spike from the sparse Rademacher prior (stream 0), rows
/// from streams 1..m.
inline SpikedSample sample_planted(const WishartParams& params, std::uint64_t seed,
                                   int threads = 1) {
  params.validate();
  rng::Stream spike_stream(rng::derive_stream(seed, detail::kSpikeStream));
  Eigen::VectorXd x;
  detail::fill_sparse_rademacher(spike_stream, params.n, params.prior.rho, x);
  return sample_planted_with_spike(params.m, params.n, params.beta, x, seed, threads);
}

/// Adversarial instance: rows of a Gaussian projected onto the orthogonal
/// complement of a random s-sparse unit vector, which lands that vector in
/// the kernel. Equivalent to beta = -1 with an exactly unit spike.
inline SpikedSample sample_kernel_planted(Index m, Index n, Index s,
                                          std::uint64_t seed, int threads = 1) {
  if (m < 1 || n < 1) throw parameter_error("sample_kernel_planted: need m, n >= 1");
  if (s < 1 || s > n) throw parameter_error("sample_kernel_planted: need 1 <= s <= n");
  rng::Stream spike_stream(rng::derive_stream(seed, detail::kSpikeStream));

  // Floyd's algorithm for a uniform s-subset, then random signs.
  std::vector<Index> support;
  std::vector<char> taken(static_cast<std::size_t>(n), 0);
  for (Index k = n - s; k < n; ++k) {
    Index cand = static_cast<Index>(spike_stream.below(static_cast<std::uint64_t>(k) + 1));
    if (taken[static_cast<std::size_t>(cand)]) cand = k;
    taken[static_cast<std::size_t>(cand)] = 1;
    support.push_back(cand);
  }
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  const double mag = 1.0 / std::sqrt(static_cast<double>(s));
  for (Index j : support) x[j] = (spike_stream.next_u64() & 1ull) ? mag : -mag;

  SpikedSample out;
  out.spike = x;
  out.matrix.resize(m, n);
  const double t = x.squaredNorm();
  run_chunks(static_cast<std::uint64_t>(m), threads, [&](std::uint64_t i) {
    rng::Stream stream(detail::row_stream(seed, static_cast<Index>(i)));
    auto row = out.matrix.row(static_cast<Index>(i));
    for (Index j = 0; j < n; ++j) row[j] = stream.gauss();
    double dot = 0.0;
    for (Index j : support) dot += row[j] * x[j];
    const double scale = dot / t;
    for (Index j : support) row[j] -= scale * x[j];
  });
  return out;
}

/// Certifier-facing view of a sample: matrix, scale tag and metadata only.
inline SensingMatrix sensing_from_sample(const SpikedSample& sample, Scale scale,
                                         std::uint64_t seed,
                                         const std::string& model = "unknown") {
  SensingMatrix x{sample.matrix, Scale::raw, seed, model};
  return scale == Scale::inv_sqrt_m ? x.scaled() : x;
}

}  // namespace ripcert
