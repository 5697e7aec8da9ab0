#pragma once

// Partial sums of k^-s, accumulated smallest term first in long double so that the
// reference shares neither summation order nor precision with the library.

#include <cmath>
#include <cstddef>

namespace oracle {

inline long double partial_zeta(long double s, std::size_t k_max) {
  long double sum = 0.0L;
  for (std::size_t k = k_max; k >= 1; --k) sum += std::pow(static_cast<long double>(k), -s);
  return sum;
}

// sum_{k=m}^{k_max} k^-s
inline long double partial_zeta_tail(long double s, std::size_t m, std::size_t k_max) {
  long double sum = 0.0L;
  for (std::size_t k = k_max; k >= m; --k) sum += std::pow(static_cast<long double>(k), -s);
  return sum;
}

}  // namespace oracle
