#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace lrent {

/// SplitMix64 finalizer. Used to turn (master seed, index) into well-separated engine seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed for the stream with the given index under a master seed.
///
/// seed = splitmix64(splitmix64(master ^ splitmix64(tag)) + index). Distinct tags give
/// unrelated families of streams (disorder draws, bootstrap resamples, ...).
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index, std::uint64_t tag = 0);

/// Human-readable description of derive_seed, written into run manifests.
std::string_view seed_derivation_description();

/// Stream tags used by the experiment drivers.
inline constexpr std::uint64_t kDisorderTag = 0;
inline constexpr std::uint64_t kBootstrapTag = 0xb0075;
inline constexpr std::uint64_t kScanTag = 0x5ca9;

/// Deterministic random stream.
///
/// Wraps std::mt19937_64 (whose output sequence is fixed by the standard) and maps raw
/// 64-bit words to floating point by hand, so a seed reproduces bit-identical draws with any
/// standard library. Satisfies UniformRandomBitGenerator.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform on (0, 1], multiples of 2^-53.
  double uniform_open_closed() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }

  /// Uniform on [0, 1), multiples of 2^-53.
  double uniform_closed_open() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Unbiased integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace lrent
