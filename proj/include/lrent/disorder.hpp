#pragma once

// Coupling ensembles for hopping chains: strong-disorder random chains, rainbow chains and
// concatenations of rainbow fragments.

#include <cstddef>
#include <span>
#include <vector>

#include "json.hpp"
#include "lrent/fermion.hpp"
#include "lrent/pairstate.hpp"
#include "lrent/random.hpp"

namespace lrent::disorder {

/// Largest accepted disorder strength; keeps U^delta a normal double for every U in (0, 1].
inline constexpr double kMaxDelta = 16.0;
/// Smallest coupling a rainbow chain may contain.
inline constexpr double kPrecisionFloor = 1e-280;
/// Largest ratio inter_coupling / min intra-fragment coupling accepted by concatenate_fragments.
inline constexpr double kMaxInterCouplingRatio = 1e-6;

/// Couplings J = U^delta, U uniform on (0, 1], with density (1/delta) J^(1/delta - 1).
struct DisorderSpec {
  double delta = 1.0;

  void validate() const;
};

/// Rainbow chain of 2N sites with couplings decaying as lambda^(2|N - j| - 1) away from the
/// central bond.
struct RainbowSpec {
  std::size_t half_length = 1;
  double decay_lambda = 0.5;

  void validate() const;
};

/// Largest N with lambda^(2N - 3) above kPrecisionFloor.
std::size_t max_rainbow_half_length(double decay_lambda);

double coupling_from_uniform(const DisorderSpec& spec, double u);
double sample_coupling(const DisorderSpec& spec, RandomStream& rng);

/// L - 1 independent couplings. L must be even and at least 2.
fermion::CouplingChain rsp_chain(std::size_t num_sites, const DisorderSpec& spec, RandomStream& rng);

fermion::CouplingChain rainbow_chain(const RainbowSpec& spec);

/// Bonds of the chains in order with inter_coupling between consecutive fragments.
///
/// inter_coupling = 0 yields a block-decomposable chain whose ground state is the product of
/// the fragment ground states. A nonzero value must not exceed kMaxInterCouplingRatio times the
/// smallest coupling of any fragment.
fermion::CouplingChain concatenate_fragments(std::span<const fermion::CouplingChain> chains,
                                             double inter_coupling = 0.0);

/// num_fragments rainbow fragments with half lengths drawn from the k^-(1+alpha) law,
/// concatenated with zero inter-coupling. k_max is lowered to
/// max_rainbow_half_length(decay_lambda) when the precision floor demands it.
fermion::CouplingChain rainbow_fragment_sequence(const pairstate::PowerLawModel& model,
                                                 std::size_t num_fragments, double decay_lambda,
                                                 RandomStream& rng,
                                                 std::size_t k_max = pairstate::kDefaultKMax);

nlohmann::json to_json_record(const fermion::CouplingChain& chain);
fermion::CouplingChain coupling_chain_from_json(const nlohmann::json& record);

}  // namespace lrent::disorder
