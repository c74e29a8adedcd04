#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ripcert/common.hpp"

namespace ripcert {

/// Saturation value for binomial coefficients that do not fit comfortably.
inline constexpr std::uint64_t kBinomSaturated = UINT64_MAX;

/// C(n, k), saturating at kBinomSaturated instead of overflowing.
inline std::uint64_t binom_capped(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  unsigned __int128 v = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    v = v * (n - k + i) / i;  // exact: each prefix is C(n-k+i, i)
    // prefixes are nondecreasing (n >= k), so saturating here is final
    if (v > static_cast<unsigned __int128>(UINT64_MAX)) return kBinomSaturated;
  }
  return static_cast<std::uint64_t>(v);
}

/// Colex rank of a sorted index tuple: sum over positions p of C(c[p], p+1).
inline std::uint64_t colex_rank(std::span<const Index> c) {
  std::uint64_t r = 0;
  for (std::size_t p = 0; p < c.size(); ++p)
    r += binom_capped(static_cast<std::uint64_t>(c[p]), p + 1);
  return r;
}

/// Inverse of colex_rank: fills `out` (size r) with the subset of that rank.
inline void colex_unrank(std::uint64_t rank, int r, Index n, std::vector<Index>& out) {
  out.assign(static_cast<std::size_t>(r), 0);
  Index hi = n - 1;
  for (int p = r - 1; p >= 0; --p) {
    Index c = hi;
    while (c >= p && binom_capped(static_cast<std::uint64_t>(c),
                                  static_cast<std::uint64_t>(p) + 1) > rank)
      --c;
    out[static_cast<std::size_t>(p)] = c;
    rank -= binom_capped(static_cast<std::uint64_t>(c), static_cast<std::uint64_t>(p) + 1);
    hi = c - 1;
  }
}

/// Advances `c` to its colex successor among size-r subsets of [0, n).
/// Returns the smallest changed position (positions below it reset to
/// 0..i-1), or -1 when `c` was the last subset.
inline int colex_next(std::vector<Index>& c, Index n) {
  const int r = static_cast<int>(c.size());
  for (int i = 0; i < r; ++i) {
    const Index limit = (i + 1 < r) ? c[static_cast<std::size_t>(i) + 1] : n;
    if (c[static_cast<std::size_t>(i)] + 1 < limit) {
      ++c[static_cast<std::size_t>(i)];
      for (int j = 0; j < i; ++j) c[static_cast<std::size_t>(j)] = j;
      return i;
    }
  }
  return -1;
}

/// True when a precedes b in colex order (largest differing element decides).
inline bool colex_less(std::span<const Index> a, std::span<const Index> b) {
  for (std::size_t p = a.size(); p-- > 0;) {
    if (a[p] != b[p]) return a[p] < b[p];
  }
  return false;
}

}  // namespace ripcert
