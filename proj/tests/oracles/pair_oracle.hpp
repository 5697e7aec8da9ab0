#pragma once

// Direct counting on explicit pair lists, site by site. Slow on purpose.

#include <cstddef>
#include <utility>
#include <vector>

namespace oracle {

using Pairs = std::vector<std::pair<std::size_t, std::size_t>>;

// Rainbow matching of consecutive fragments written out by hand.
inline Pairs rainbow_pairs(const std::vector<std::size_t>& half_lengths) {
  Pairs out;
  std::size_t offset = 0;
  for (std::size_t k : half_lengths) {
    for (std::size_t n = 1; n <= k; ++n) out.emplace_back(offset + n, offset + 2 * k + 1 - n);
    offset += 2 * k;
  }
  return out;
}

inline bool in_range(std::size_t site, std::size_t first, std::size_t last) {
  return site >= first && site <= last;
}

inline std::size_t crossing(const Pairs& pairs, std::size_t first, std::size_t last) {
  std::size_t n = 0;
  for (auto [i, j] : pairs)
    if (in_range(i, first, last) != in_range(j, first, last)) ++n;
  return n;
}

inline std::size_t bridging(const Pairs& pairs, std::size_t a0, std::size_t a1, std::size_t b0,
                            std::size_t b1) {
  std::size_t n = 0;
  for (auto [i, j] : pairs)
    if ((in_range(i, a0, a1) && in_range(j, b0, b1)) || (in_range(j, a0, a1) && in_range(i, b0, b1)))
      ++n;
  return n;
}

// Total crossing count over every placement of a window of `length` sites.
inline std::size_t crossing_over_placements(const Pairs& pairs, std::size_t num_sites,
                                            std::size_t length) {
  std::size_t total = 0;
  for (std::size_t s = 1; s + length - 1 <= num_sites; ++s) total += crossing(pairs, s, s + length - 1);
  return total;
}

}  // namespace oracle
