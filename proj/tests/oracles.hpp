// Test-only oracles, independent of the library's computation paths.
#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <vector>

#include "ripcert/common.hpp"
#include "ripcert/rng.hpp"

namespace oracles {

using ripcert::Index;

// max |  ||X v||^2 - ||v||^2 | over random unit vectors supported on S;
// a lower bound on the restricted deviation norm that converges from below.
inline double random_direction_norm(const ripcert::SensingMatrix& x,
                                    const std::vector<Index>& support,
                                    std::uint64_t iters, std::uint64_t seed) {
  ripcert::rng::Stream stream(seed);
  const auto r = static_cast<Index>(support.size());
  Eigen::VectorXd coeffs(r);
  Eigen::MatrixXd cols(x.rows(), r);
  for (Index k = 0; k < r; ++k) cols.col(k) = x.data.col(support[static_cast<std::size_t>(k)]);
  double best = 0.0;
  for (std::uint64_t it = 0; it < iters; ++it) {
    for (Index k = 0; k < r; ++k) coeffs[k] = stream.gauss();
    coeffs /= coeffs.norm();
    const double dev = std::abs((cols * coeffs).squaredNorm() - 1.0);
    if (dev > best) best = dev;
  }
  return best;
}

// All size-r subsets by simple recursion, reported through a callback.
template <class Fn>
void for_each_subset(Index n, int r, Fn&& fn) {
  std::vector<Index> subset(static_cast<std::size_t>(r));
  auto rec = [&](auto&& self, int pos, Index start) -> void {
    if (pos == r) {
      fn(subset);
      return;
    }
    for (Index v = start; v < n; ++v) {
      subset[static_cast<std::size_t>(pos)] = v;
      self(self, pos + 1, v + 1);
    }
  };
  rec(rec, 0, 0);
}

// max |  ||X v||^2 - 1 | over all 2-sparse unit vectors on an angle grid;
// covers every pair of columns and every sign pattern.
inline double grid_norm_2sparse(const ripcert::SensingMatrix& x, int angles) {
  const Index n = x.cols();
  double best = 0.0;
  const double pi = 3.14159265358979323846;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      for (int a = 0; a < angles; ++a) {
        const double theta = pi * (static_cast<double>(a) + 0.5) / angles;
        const double c = std::cos(theta), s = std::sin(theta);
        const double dev =
            std::abs((c * x.data.col(i) + s * x.data.col(j)).squaredNorm() - 1.0);
        if (dev > best) best = dev;
      }
    }
  return best;
}

// [I | H D / sqrt(m)] for a Sylvester Hadamard H and random signs D: 2m unit
// columns in R^m with pairwise coherence exactly 1/sqrt(m). The canonical
// certifiable instance family: B_2 = 1/sqrt(m) on the nose.
inline ripcert::SensingMatrix unbiased_dictionary(Index m, std::uint64_t seed) {
  Eigen::MatrixXd h(1, 1);
  h(0, 0) = 1.0;
  while (h.rows() < m) {
    Eigen::MatrixXd next(2 * h.rows(), 2 * h.cols());
    next << h, h, h, -h;
    h = next;
  }
  ripcert::rng::Stream stream(seed);
  ripcert::SensingMatrix x;
  x.data = Eigen::MatrixXd::Zero(m, 2 * m);
  x.scale = ripcert::Scale::inv_sqrt_m;  // columns are exactly unit already
  x.seed = seed;
  x.model = "dictionary";
  const double inv = 1.0 / std::sqrt(static_cast<double>(m));
  for (Index j = 0; j < m; ++j) x.data(j, j) = 1.0;
  for (Index j = 0; j < m; ++j) {
    const double sign = (stream.next_u64() & 1ull) ? 1.0 : -1.0;
    x.data.col(m + j) = h.col(j) * (sign * inv);
  }
  return x;
}

inline double log_binom(std::int64_t n, std::int64_t k) {
  return std::lgamma(static_cast<double>(n) + 1.0) -
         std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

// P(Binomial(n, p) > k), exact up to lgamma rounding.
inline double binom_tail_above(std::int64_t n, double p, std::int64_t k) {
  double total = 0.0;
  for (std::int64_t j = k + 1; j <= n; ++j)
    total += std::exp(log_binom(n, j) + j * std::log(p) + (n - j) * std::log1p(-p));
  return total;
}

}  // namespace oracles
