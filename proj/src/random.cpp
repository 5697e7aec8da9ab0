#include "lrent/random.hpp"

#include <stdexcept>

namespace lrent {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index, std::uint64_t tag) {
  return splitmix64(splitmix64(master_seed ^ splitmix64(tag)) + index);
}

std::string_view seed_derivation_description() {
  return "stream seed = splitmix64(splitmix64(master_seed ^ splitmix64(tag)) + index); "
         "engine = std::mt19937_64(stream seed); uniform(0,1] = ((word >> 11) + 1) * 2^-53; "
         "tags: disorder=0, bootstrap=0xb0075, scan=0x5ca9";
}

std::uint64_t RandomStream::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("RandomStream::below: empty range");
  // Rejection on the top of the range keeps every residue equally likely.
  const std::uint64_t limit = max() - (max() % n + 1) % n;
  std::uint64_t x = engine_();
  while (x > limit) x = engine_();
  return x % n;
}

}  // namespace lrent
