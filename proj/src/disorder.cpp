#include "lrent/disorder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace lrent::disorder {

namespace {

bool above_floor(std::size_t half_length, double lambda) {
  if (half_length <= 1) return true;
  return std::pow(lambda, static_cast<double>(2 * half_length - 3)) > kPrecisionFloor;
}

}  // namespace

void DisorderSpec::validate() const {
  if (!(delta > 0.0 && delta <= kMaxDelta))
    throw std::invalid_argument("disorder strength delta must lie in (0, " +
                                std::to_string(kMaxDelta) + "], got " + std::to_string(delta));
}

void RainbowSpec::validate() const {
  if (!(decay_lambda > 0.0 && decay_lambda < 1.0))
    throw std::invalid_argument("rainbow decay_lambda must lie in (0, 1), got " +
                                std::to_string(decay_lambda));
  if (half_length < 1) throw std::invalid_argument("rainbow half length must be >= 1");
  if (!above_floor(half_length, decay_lambda))
    throw std::invalid_argument("rainbow N = " + std::to_string(half_length) + " with lambda = " +
                                std::to_string(decay_lambda) +
                                " puts the smallest coupling below 1e-280; largest allowed N is " +
                                std::to_string(max_rainbow_half_length(decay_lambda)));
}

std::size_t max_rainbow_half_length(double decay_lambda) {
  if (!(decay_lambda > 0.0 && decay_lambda < 1.0))
    throw std::invalid_argument("max_rainbow_half_length: decay_lambda must lie in (0, 1)");
  const double exponent = std::log(kPrecisionFloor) / std::log(decay_lambda);
  if (exponent > 1e15) return std::numeric_limits<std::size_t>::max() / 4;
  auto n = static_cast<std::size_t>((exponent + 3.0) / 2.0) + 2;
  while (n > 1 && !above_floor(n, decay_lambda)) --n;
  return n;
}

double coupling_from_uniform(const DisorderSpec& spec, double u) {
  if (!(u > 0.0 && u <= 1.0)) throw std::invalid_argument("coupling_from_uniform: u must lie in (0, 1]");
  return std::pow(u, spec.delta);
}

double sample_coupling(const DisorderSpec& spec, RandomStream& rng) {
  return coupling_from_uniform(spec, rng.uniform_open_closed());
}

fermion::CouplingChain rsp_chain(std::size_t num_sites, const DisorderSpec& spec,
                                 RandomStream& rng) {
  spec.validate();
  if (num_sites < 2 || num_sites % 2 != 0)
    throw std::invalid_argument("rsp_chain: need an even number of sites >= 2, got " +
                                std::to_string(num_sites));
  std::vector<double> couplings(num_sites - 1);
  for (double& j : couplings) j = sample_coupling(spec, rng);
  return fermion::CouplingChain(std::move(couplings));
}

fermion::CouplingChain rainbow_chain(const RainbowSpec& spec) {
  spec.validate();
  const std::size_t n = spec.half_length;
  std::vector<double> couplings(2 * n - 1);
  for (std::size_t j = 1; j <= 2 * n - 1; ++j) {
    const std::size_t distance = j > n ? j - n : n - j;
    couplings[j - 1] =
        distance == 0 ? 1.0 : std::pow(spec.decay_lambda, static_cast<double>(2 * distance - 1));
  }
  return fermion::CouplingChain(std::move(couplings));
}

fermion::CouplingChain concatenate_fragments(std::span<const fermion::CouplingChain> chains,
                                             double inter_coupling) {
  if (chains.empty()) throw std::invalid_argument("concatenate_fragments: no fragments");
  if (chains.size() == 1) return chains.front();
  if (!(inter_coupling >= 0.0) || !std::isfinite(inter_coupling))
    throw std::invalid_argument("concatenate_fragments: inter_coupling must be finite and >= 0");

  double min_coupling = std::numeric_limits<double>::infinity();
  std::size_t bonds = chains.size() - 1;
  for (const auto& c : chains) {
    for (double j : c.couplings())
      if (j > 0.0) min_coupling = std::min(min_coupling, j);
    bonds += c.couplings().size();
  }
  if (inter_coupling > 0.0 && inter_coupling > kMaxInterCouplingRatio * min_coupling)
    throw std::invalid_argument("concatenate_fragments: inter_coupling " +
                                std::to_string(inter_coupling) + " exceeds 1e-6 times the smallest "
                                "fragment coupling " + std::to_string(min_coupling));

  std::vector<double> couplings;
  couplings.reserve(bonds);
  for (std::size_t i = 0; i < chains.size(); ++i) {
    if (i > 0) couplings.push_back(inter_coupling);
    couplings.insert(couplings.end(), chains[i].couplings().begin(), chains[i].couplings().end());
  }
  const bool has_zero = std::find(couplings.begin(), couplings.end(), 0.0) != couplings.end();
  if (has_zero) return fermion::CouplingChain::block_decomposable(std::move(couplings));
  return fermion::CouplingChain(std::move(couplings));
}

fermion::CouplingChain rainbow_fragment_sequence(const pairstate::PowerLawModel& model,
                                                 std::size_t num_fragments, double decay_lambda,
                                                 RandomStream& rng, std::size_t k_max) {
  if (num_fragments == 0) throw std::invalid_argument("rainbow_fragment_sequence: no fragments");
  const std::size_t limit = std::min(k_max, max_rainbow_half_length(decay_lambda));
  const pairstate::FragmentSampler sampler(model, limit);
  std::vector<fermion::CouplingChain> chains;
  chains.reserve(num_fragments);
  for (std::size_t i = 0; i < num_fragments; ++i)
    chains.push_back(rainbow_chain({sampler.draw(rng), decay_lambda}));
  return concatenate_fragments(chains, 0.0);
}

nlohmann::json to_json_record(const fermion::CouplingChain& chain) {
  return {{"num_sites", chain.num_sites()},
          {"couplings", std::vector<double>(chain.couplings().begin(), chain.couplings().end())}};
}

fermion::CouplingChain coupling_chain_from_json(const nlohmann::json& record) {
  auto couplings = record.at("couplings").get<std::vector<double>>();
  if (record.at("num_sites").get<std::size_t>() != couplings.size() + 1)
    throw std::invalid_argument("chain record: num_sites does not match the number of couplings");
  const bool has_zero = std::find(couplings.begin(), couplings.end(), 0.0) != couplings.end();
  if (has_zero) return fermion::CouplingChain::block_decomposable(std::move(couplings));
  return fermion::CouplingChain(std::move(couplings));
}

}  // namespace lrent::disorder
