#pragma once

// Bell-pair states on a one-dimensional lattice.
//
// A pair state is a partial matching of lattice sites; every matched pair is a maximally
// entangled pair of d-level systems. For such states the entropy of a region and the
// distillable (and squashed) entanglement between two regions reduce to counting the pairs
// that cross the region boundaries, times ln d. Sites are labelled 1..L throughout this module.

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "json.hpp"
#include "lrent/random.hpp"

namespace lrent::pairstate {

inline constexpr std::size_t kDefaultKMax = 1'000'000;

/// P(r) = C r^-alpha in D spatial dimensions. alpha > 1 is required for normalizability.
class PowerLawModel {
 public:
  explicit PowerLawModel(double exponent_alpha, double amplitude_C = 1.0, int dimension_D = 1);

  double alpha() const { return alpha_; }
  double amplitude() const { return amplitude_; }
  int dimension() const { return dimension_; }

 private:
  double alpha_;
  double amplitude_;
  int dimension_;
};

/// Half lengths k_i of consecutive rainbow fragments; fragment i occupies 2 k_i sites.
class FragmentSequence {
 public:
  explicit FragmentSequence(std::vector<std::size_t> half_lengths);

  std::span<const std::size_t> half_lengths() const { return half_lengths_; }
  std::size_t total_sites() const { return total_sites_; }
  std::size_t size() const { return half_lengths_.size(); }

 private:
  std::vector<std::size_t> half_lengths_;
  std::size_t total_sites_ = 0;
};

/// Closed range of sites [start, start + length - 1].
struct Interval {
  std::size_t start = 1;
  std::size_t length = 1;

  std::size_t last() const { return start + length - 1; }
  bool contains(std::size_t site) const { return site >= start && site <= last(); }
  bool overlaps(const Interval& other) const {
    return start <= other.last() && other.start <= last();
  }
};

/// Lattice distance from the end of `a` to the start of `b` (first site of b minus last site of a).
/// Requires b to lie entirely to the right of a.
std::size_t separation(const Interval& a, const Interval& b);

struct SitePair {
  std::size_t first;
  std::size_t second;

  friend bool operator==(const SitePair&, const SitePair&) = default;
};

class PairConfiguration {
 public:
  /// Throws std::invalid_argument unless every pair satisfies 1 <= i < j <= num_sites, no site
  /// is used twice, and qudit_dim >= 2.
  PairConfiguration(std::size_t num_sites, std::vector<SitePair> pairs, int qudit_dim = 2);

  std::size_t num_sites() const { return num_sites_; }
  int qudit_dim() const { return qudit_dim_; }
  double log_qudit_dim() const;
  std::span<const SitePair> pairs() const { return pairs_; }

  /// Partner of `site`, or 0 when the site is unpaired.
  std::size_t partner(std::size_t site) const { return partner_.at(site); }
  bool is_perfect_matching() const { return 2 * pairs_.size() == num_sites_; }

  void require_inside(const Interval& interval) const;

 private:
  std::size_t num_sites_;
  int qudit_dim_;
  std::vector<SitePair> pairs_;
  std::vector<std::size_t> partner_;  // indexed by site, slot 0 unused
};

nlohmann::json to_json_record(const PairConfiguration& config);
PairConfiguration pair_configuration_from_json(const nlohmann::json& record);

/// Z = sum_{k=1}^{k_max} k^-(1+alpha).
double truncated_normalization(const PowerLawModel& model, std::size_t k_max);

/// Large-distance amplitude C of the pair-length law produced by the fragment construction.
///
/// A fragment of half length k contains one pair of each odd length 2m-1 with m <= k, so a
/// site's partner sits at odd distance l with probability Pr(k >= (l+1)/2) / E[k]. For
/// p(k) ~ k^-(1+alpha) this behaves as 2^alpha l^-alpha / (alpha sum_k k^-alpha) on odd l and
/// vanishes on even l; C is the parity average, 2^(alpha-1) / (alpha sum_{k<=k_max} k^-alpha).
double fragment_construction_amplitude(double alpha, std::size_t k_max = kDefaultKMax);

/// Inverse-CDF sampler for fragment half lengths with Pr(k) = k^-(1+alpha) / Z on [1, k_max].
class FragmentSampler {
 public:
  explicit FragmentSampler(const PowerLawModel& model, std::size_t k_max = kDefaultKMax);

  std::size_t draw(RandomStream& rng) const;

  /// `count` draws from one systematic sample of the CDF (u_i = (i + U) / count with a single
  /// uniform offset U), returned in random order. Each draw is marginally distributed like
  /// draw(); the histogram of the batch deviates from count * Pr(k) by less than one per
  /// stratum, which removes most of the sampling noise of the heavy tail.
  std::vector<std::size_t> draw_stratified(std::size_t count, RandomStream& rng) const;

  /// Smallest k with Pr(half length <= k) > u, for u in [0, 1).
  std::size_t quantile(double u) const;

  double probability(std::size_t k) const;
  double normalization() const { return normalization_; }
  double mean_half_length() const { return mean_half_length_; }
  std::size_t k_max() const { return cdf_.size(); }
  double alpha() const { return alpha_; }

 private:
  double alpha_;
  double normalization_;
  double mean_half_length_;
  std::vector<double> cdf_;  // cdf_[k-1] = Pr(half length <= k), last entry exactly 1
};

/// One draw from the truncated k^-(1+alpha) law. Builds an O(k_max) table; reuse a
/// FragmentSampler for repeated draws.
std::size_t sample_fragment_half_length(const PowerLawModel& model, RandomStream& rng,
                                        std::size_t k_max = kDefaultKMax);

/// Independent fragments until the chain holds at least min_sites sites. The final fragment is
/// kept whole, so total_sites() may exceed min_sites.
FragmentSequence sample_fragments(const FragmentSampler& sampler, std::size_t min_sites,
                                  RandomStream& rng);

/// Rainbow matching: inside each fragment of 2k sites, local site n is paired with 2k + 1 - n.
PairConfiguration build_chain_state(const FragmentSequence& fragments, int qudit_dim = 2);

/// Entropy of A in nats: pairs with exactly one endpoint in A, times ln d.
double entropy_of_interval(const PairConfiguration& config, const Interval& a);

/// Distillable entanglement between disjoint A and B in nats: pairs joining A to B, times ln d.
double distillable_between(const PairConfiguration& config, const Interval& a, const Interval& b);

/// Number of pairs joining A to the union of pairwise-disjoint intervals b_parts.
std::size_t bridging_pair_count(const PairConfiguration& config, const Interval& a,
                                std::span<const Interval> b_parts);

/// Same, with B the union of pairwise-disjoint intervals.
double distillable_between(const PairConfiguration& config, const Interval& a,
                           std::span<const Interval> b_parts);

struct MonogamyResult {
  double lhs = 0.0;  ///< sum_i E(A, B_i)
  double rhs = 0.0;  ///< E(A, union of B_i)
  bool holds = true;
};

MonogamyResult monogamy_check(const PairConfiguration& config, const Interval& a,
                              std::span<const Interval> bs);

/// Accumulator for an average over placements of a window; totals from several configurations
/// can be added before dividing.
struct PlacementAverage {
  double total = 0.0;
  std::uint64_t placements = 0;

  double mean() const { return placements ? total / static_cast<double>(placements) : 0.0; }
  PlacementAverage& operator+=(const PlacementAverage& other) {
    total += other.total;
    placements += other.placements;
    return *this;
  }
};

/// entropy_of_interval summed over every placement of a length-N interval inside the chain,
/// computed pair by pair in O(#pairs).
PlacementAverage interval_entropy_over_placements(const PairConfiguration& config,
                                                  std::size_t length);

/// Same for several lengths in one pass over the pairs.
std::vector<PlacementAverage> interval_entropy_over_placements(const PairConfiguration& config,
                                                               std::span<const std::size_t> lengths);

/// distillable_between({j}, {j + r}) summed over j = 1 .. L - r.
PlacementAverage unit_block_distillable_over_placements(const PairConfiguration& config,
                                                        std::size_t r);

/// Number of pairs of each length; index is the length j - i, entry 0 unused.
std::vector<std::uint64_t> pair_length_histogram(const PairConfiguration& config);

/// Ensemble-averaged entropy of N_A consecutive sites (D = 1), three-case closed form:
/// C ln d N^(2-a) / (3a - a^2 - 2) for 1 < a < 2, C ln d ln N for a = 2, C ln d / (a^2 - 3a + 2)
/// for a > 2.
double analytic_entropy(const PowerLawModel& model, double n_a, double qudit_dim);

/// (C ln d / 2) N_A N_B r^-alpha, the large-separation ensemble average in one dimension.
double analytic_ed(const PowerLawModel& model, double n_a, double n_b, double r,
                   double qudit_dim);

/// Area of the unit (D-1)-sphere, 2 pi^(D/2) / Gamma(D/2).
double unit_sphere_area(int dimension);

/// C N_A N_B ln d / Area(S^(D-1)) r^(1-D-alpha).
double analytic_ed_ddim(const PowerLawModel& model, double n_a, double n_b, double r,
                        double qudit_dim);

}  // namespace lrent::pairstate
