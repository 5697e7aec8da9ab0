#pragma once

// Coherent-information pair censuses over disorder ensembles, power-law fits of the distance
// histogram, and entropy scaling scans.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "lrent/disorder.hpp"
#include "lrent/fermion.hpp"
#include "lrent/random.hpp"

namespace lrent::census {

inline constexpr double kDefaultThreshold = fermion::kLn2 / 2.0;
inline constexpr std::size_t kDefaultBootstrapResamples = 200;

/// Closed distance window [r_min, r_max].
struct FitWindow {
  std::size_t r_min = 3;
  std::size_t r_max = 101;

  friend bool operator==(const FitWindow&, const FitWindow&) = default;
};

struct ExperimentConfig {
  std::size_t chain_length = 200;
  std::size_t num_samples = 1000;
  double delta = 3.0;
  double threshold_nats = kDefaultThreshold;
  /// Unset means [3, min(101, L / 5)].
  std::optional<FitWindow> fit_window;
  std::uint64_t master_seed = 1;
  std::size_t worker_count = 1;
  std::string output_path;

  FitWindow resolved_window() const;
  /// Throws std::invalid_argument with a message naming the offending field.
  void validate() const;
  nlohmann::json to_json() const;
};

/// Distance -> count pairs of one disorder sample, ascending in distance, zero counts omitted.
struct CensusShard {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> entries;
};

struct PairCensus {
  std::vector<std::uint64_t> counts;  ///< indexed by distance r, size chain_length; slot 0 unused
  std::uint64_t num_samples = 0;
  std::size_t chain_length = 0;
  double threshold_nats = kDefaultThreshold;
  std::uint64_t pairs_examined = 0;
  std::uint64_t degenerate_discards = 0;
  /// One shard per sample in sample order; empty when the census was read back from a CSV.
  std::vector<CensusShard> shards;

  std::uint64_t count(std::size_t r) const { return r < counts.size() ? counts[r] : 0; }
  std::uint64_t total() const;

  /// Appends another census of the same chain length and threshold. Counts add; shards of
  /// `other` follow those of *this.
  void merge(const PairCensus& other);
};

/// Counts of site pairs j < k with pair_coherent_info(C, j, k) > threshold, indexed by k - j.
std::vector<std::uint64_t> census_one_sample(const fermion::CorrelationMatrix& c,
                                             double threshold_nats);

/// A census sample failed for a reason other than a degenerate Fermi level.
class SampleFailure : public fermion::NumericalError {
 public:
  SampleFailure(std::uint64_t sample_index, std::uint64_t seed, const std::string& what);
  std::uint64_t sample_index() const { return sample_index_; }
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t sample_index_;
  std::uint64_t seed_;
};

/// Redraws allowed per sample before a run of degenerate realizations counts as a failure.
inline constexpr std::size_t kMaxRedraws = 1000;

/// Census over config.num_samples random-singlet chains.
///
/// Sample s in [1, N] draws from RandomStream(derive_seed(master_seed, s, kDisorderTag)).
/// Realizations with a degenerate Fermi level are redrawn from the same stream and counted in
/// degenerate_discards. Samples are spread over worker_count threads and folded in sample
/// order, so the result does not depend on the number of workers. Throws SampleFailure for the
/// lowest failing sample index.
PairCensus run_census(const ExperimentConfig& config);

/// Qualifying pairs per site-pair slot: total() / (num_samples * L / 2).
///
/// This is the fraction of sites that sit in a qualifying pair whenever no site qualifies with
/// two partners, which is what the threshold ln 2 / 2 enforces in practice. Unlike the fraction
/// of all L (L - 1) / 2 pairs it does not shrink as 1/L. Throws on an empty census.
double qualifying_fraction(const PairCensus& census);

/// total() / pairs_examined.
double fraction_of_pairs_examined(const PairCensus& census);

struct PowerLawFit {
  double exponent = 0.0;       ///< minus the log-log slope
  double log_amplitude = 0.0;  ///< intercept of ln count vs ln r
  FitWindow window;
  double r_squared = 0.0;
  double exponent_stderr = 0.0;  ///< half the 16-84 percentile spread of bootstrap exponents
  std::size_t bins_used = 0;
  std::size_t bootstrap_resamples = 0;  ///< resamples that had enough bins to fit
};

struct FitOptions {
  /// Weight each point by its count (inverse Poisson variance of ln count).
  bool weight_by_counts = false;
  std::size_t bootstrap_resamples = kDefaultBootstrapResamples;
  std::uint64_t bootstrap_seed = 1;
};

/// Least squares on (ln r, ln count[r]) for nonzero bins inside the window.
///
/// The bootstrap resamples whole samples (shards) with replacement. A census without shards
/// is resampled parametrically, each bin drawn as Poisson(count). Throws std::invalid_argument
/// when fewer than 3 bins are nonzero.
PowerLawFit power_law_fit(const PairCensus& census, const FitWindow& window,
                          const FitOptions& options = {});

/// Fit on a bare histogram (index r), without bootstrap.
PowerLawFit power_law_fit(std::span<const std::uint64_t> counts, const FitWindow& window,
                          bool weight_by_counts = false);

struct ScalingRow {
  std::size_t length = 0;
  double mean_entropy = 0.0;
  double stderr_entropy = 0.0;
};

using ChainGenerator = std::function<fermion::CouplingChain(RandomStream&)>;

/// Mean entropy of the centered interval of each length over num_samples chains from the
/// generator, sample s using derive_seed(master_seed, s, kDisorderTag).
std::vector<ScalingRow> entropy_scaling_scan(const ChainGenerator& generator,
                                             std::size_t num_samples, std::uint64_t master_seed,
                                             std::span<const std::size_t> lengths,
                                             std::size_t worker_count = 1);

/// Same over the random-singlet chains of config.
std::vector<ScalingRow> entropy_scaling_scan(const ExperimentConfig& config,
                                             std::span<const std::size_t> lengths);

/// pair_coherent_info between sites i and 2N + 1 - i (1-based) for i = 1 .. N.
std::vector<double> mirror_pair_profile(const fermion::CouplingChain& chain,
                                        const disorder::RainbowSpec& spec);

/// "r,count" header and one row per r = 1 .. L - 1, LF line endings.
void write_census_csv(std::ostream& out, const PairCensus& census);
/// Inverse of write_census_csv. num_samples and pairs_examined are unknown and left at 0.
PairCensus read_census_csv(std::istream& in);

/// {exponent, stderr, window: [min, max], r_squared, bins_used, log_amplitude}.
nlohmann::json to_json(const PowerLawFit& fit);

}  // namespace lrent::census
