#include "lrent/pairstate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace lrent::pairstate {

namespace {

void require_disjoint(const Interval& a, const Interval& b, const char* what) {
  if (a.overlaps(b)) throw std::invalid_argument(std::string(what) + ": intervals overlap");
}

// Number of integers in [lo, hi], zero when empty.
std::uint64_t span_count(std::int64_t lo, std::int64_t hi) {
  return hi >= lo ? static_cast<std::uint64_t>(hi - lo + 1) : 0;
}

}  // namespace

PowerLawModel::PowerLawModel(double exponent_alpha, double amplitude_C, int dimension_D)
    : alpha_(exponent_alpha), amplitude_(amplitude_C), dimension_(dimension_D) {
  if (!(std::isfinite(alpha_) && alpha_ > 1.0))
    throw std::invalid_argument("PowerLawModel: exponent must be > 1 for a normalizable law");
  if (!(std::isfinite(amplitude_) && amplitude_ > 0.0))
    throw std::invalid_argument("PowerLawModel: amplitude must be positive");
  if (dimension_ < 1) throw std::invalid_argument("PowerLawModel: dimension must be >= 1");
}

FragmentSequence::FragmentSequence(std::vector<std::size_t> half_lengths)
    : half_lengths_(std::move(half_lengths)) {
  for (std::size_t k : half_lengths_) {
    if (k == 0) throw std::invalid_argument("FragmentSequence: half lengths must be >= 1");
    total_sites_ += 2 * k;
  }
}

std::size_t separation(const Interval& a, const Interval& b) {
  if (b.start <= a.last())
    throw std::invalid_argument("separation: second interval must lie right of the first");
  return b.start - a.last();
}

PairConfiguration::PairConfiguration(std::size_t num_sites, std::vector<SitePair> pairs,
                                     int qudit_dim)
    : num_sites_(num_sites), qudit_dim_(qudit_dim), pairs_(std::move(pairs)),
      partner_(num_sites + 1, 0) {
  if (num_sites_ == 0) throw std::invalid_argument("PairConfiguration: no sites");
  if (qudit_dim_ < 2) throw std::invalid_argument("PairConfiguration: qudit dimension must be >= 2");
  for (const auto& p : pairs_) {
    if (p.first < 1 || p.first >= p.second || p.second > num_sites_)
      throw std::invalid_argument("PairConfiguration: pair (" + std::to_string(p.first) + ", " +
                                  std::to_string(p.second) + ") is not 1 <= i < j <= L");
    if (partner_[p.first] != 0 || partner_[p.second] != 0)
      throw std::invalid_argument("PairConfiguration: site used by two pairs");
    partner_[p.first] = p.second;
    partner_[p.second] = p.first;
  }
}

double PairConfiguration::log_qudit_dim() const { return std::log(static_cast<double>(qudit_dim_)); }

void PairConfiguration::require_inside(const Interval& interval) const {
  if (interval.length == 0 || interval.start < 1 || interval.last() > num_sites_)
    throw std::out_of_range("interval [" + std::to_string(interval.start) + ", " +
                            std::to_string(interval.last()) + "] outside chain of " +
                            std::to_string(num_sites_) + " sites");
}

nlohmann::json to_json_record(const PairConfiguration& config) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : config.pairs()) pairs.push_back({p.first, p.second});
  return {{"num_sites", config.num_sites()}, {"qudit_dim", config.qudit_dim()}, {"pairs", pairs}};
}

PairConfiguration pair_configuration_from_json(const nlohmann::json& record) {
  std::vector<SitePair> pairs;
  for (const auto& p : record.at("pairs")) {
    if (!p.is_array() || p.size() != 2)
      throw std::invalid_argument("pair record must be a two-element array");
    pairs.push_back({p[0].get<std::size_t>(), p[1].get<std::size_t>()});
  }
  return PairConfiguration(record.at("num_sites").get<std::size_t>(), std::move(pairs),
                           record.at("qudit_dim").get<int>());
}

double truncated_normalization(const PowerLawModel& model, std::size_t k_max) {
  if (k_max == 0) throw std::invalid_argument("truncated_normalization: k_max must be >= 1");
  // Summed from the small tail terms upwards to limit rounding.
  double z = 0.0;
  for (std::size_t k = k_max; k >= 1; --k) z += std::pow(static_cast<double>(k), -1.0 - model.alpha());
  return z;
}

double fragment_construction_amplitude(double alpha, std::size_t k_max) {
  double s = 0.0;
  for (std::size_t k = k_max; k >= 1; --k) s += std::pow(static_cast<double>(k), -alpha);
  return std::pow(2.0, alpha - 1.0) / (alpha * s);
}

FragmentSampler::FragmentSampler(const PowerLawModel& model, std::size_t k_max)
    : alpha_(model.alpha()), cdf_(k_max) {
  if (k_max == 0) throw std::invalid_argument("FragmentSampler: k_max must be >= 1");
  double running = 0.0, first_moment = 0.0;
  for (std::size_t k = 1; k <= k_max; ++k) {
    const double w = std::pow(static_cast<double>(k), -1.0 - alpha_);
    running += w;
    first_moment += w * static_cast<double>(k);
    cdf_[k - 1] = running;
  }
  normalization_ = truncated_normalization(model, k_max);
  mean_half_length_ = first_moment / running;
  for (double& c : cdf_) c /= running;
  cdf_.back() = 1.0;
}

double FragmentSampler::probability(std::size_t k) const {
  if (k == 0 || k > cdf_.size()) return 0.0;
  return std::pow(static_cast<double>(k), -1.0 - alpha_) / normalization_;
}

std::size_t FragmentSampler::quantile(double u) const {
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  return std::min(static_cast<std::size_t>(it - cdf_.begin()) + 1, cdf_.size());
}

std::size_t FragmentSampler::draw(RandomStream& rng) const { return quantile(rng.uniform_closed_open()); }

std::vector<std::size_t> FragmentSampler::draw_stratified(std::size_t count, RandomStream& rng) const {
  std::vector<std::size_t> out(count);
  if (count == 0) return out;
  const double offset = rng.uniform_closed_open();
  const double n = static_cast<double>(count);
  // The u_i increase with i, so the CDF is walked once.
  std::size_t k_index = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const double u = (static_cast<double>(i) + offset) / n;
    while (cdf_[k_index] <= u) ++k_index;
    out[i] = k_index + 1;
  }
  for (std::size_t i = count - 1; i > 0; --i) std::swap(out[i], out[rng.below(i + 1)]);
  return out;
}

std::size_t sample_fragment_half_length(const PowerLawModel& model, RandomStream& rng,
                                        std::size_t k_max) {
  return FragmentSampler(model, k_max).draw(rng);
}

FragmentSequence sample_fragments(const FragmentSampler& sampler, std::size_t min_sites,
                                  RandomStream& rng) {
  std::vector<std::size_t> ks;
  std::size_t sites = 0;
  do {
    ks.push_back(sampler.draw(rng));
    sites += 2 * ks.back();
  } while (sites < min_sites);
  return FragmentSequence(std::move(ks));
}

PairConfiguration build_chain_state(const FragmentSequence& fragments, int qudit_dim) {
  if (fragments.size() == 0) throw std::invalid_argument("build_chain_state: no fragments");
  std::vector<SitePair> pairs;
  pairs.reserve(fragments.total_sites() / 2);
  std::size_t offset = 0;
  for (std::size_t k : fragments.half_lengths()) {
    for (std::size_t n = 1; n <= k; ++n) pairs.push_back({offset + n, offset + 2 * k + 1 - n});
    offset += 2 * k;
  }
  return PairConfiguration(fragments.total_sites(), std::move(pairs), qudit_dim);
}

double entropy_of_interval(const PairConfiguration& config, const Interval& a) {
  config.require_inside(a);
  std::size_t crossing = 0;
  for (std::size_t site = a.start; site <= a.last(); ++site) {
    const std::size_t p = config.partner(site);
    if (p != 0 && !a.contains(p)) ++crossing;
  }
  return static_cast<double>(crossing) * config.log_qudit_dim();
}

double distillable_between(const PairConfiguration& config, const Interval& a, const Interval& b) {
  return distillable_between(config, a, std::span<const Interval>(&b, 1));
}

std::size_t bridging_pair_count(const PairConfiguration& config, const Interval& a,
                                std::span<const Interval> b_parts) {
  config.require_inside(a);
  for (std::size_t i = 0; i < b_parts.size(); ++i) {
    config.require_inside(b_parts[i]);
    require_disjoint(a, b_parts[i], "distillable_between");
    for (std::size_t j = 0; j < i; ++j) require_disjoint(b_parts[i], b_parts[j], "distillable_between");
  }
  std::size_t bridging = 0;
  for (std::size_t site = a.start; site <= a.last(); ++site) {
    const std::size_t p = config.partner(site);
    if (p == 0) continue;
    for (const auto& b : b_parts) {
      if (b.contains(p)) {
        ++bridging;
        break;
      }
    }
  }
  return bridging;
}

double distillable_between(const PairConfiguration& config, const Interval& a,
                           std::span<const Interval> b_parts) {
  return static_cast<double>(bridging_pair_count(config, a, b_parts)) * config.log_qudit_dim();
}

MonogamyResult monogamy_check(const PairConfiguration& config, const Interval& a,
                              std::span<const Interval> bs) {
  // Counted in integers so that equality is exact.
  std::size_t lhs = 0;
  for (const auto& b : bs) lhs += bridging_pair_count(config, a, std::span<const Interval>(&b, 1));
  const std::size_t rhs = bridging_pair_count(config, a, bs);
  MonogamyResult result;
  result.lhs = static_cast<double>(lhs) * config.log_qudit_dim();
  result.rhs = static_cast<double>(rhs) * config.log_qudit_dim();
  result.holds = lhs <= rhs;
  return result;
}

PlacementAverage interval_entropy_over_placements(const PairConfiguration& config,
                                                  std::size_t length) {
  return interval_entropy_over_placements(config, std::span<const std::size_t>(&length, 1)).front();
}

std::vector<PlacementAverage> interval_entropy_over_placements(const PairConfiguration& config,
                                                               std::span<const std::size_t> lengths) {
  const std::size_t count = lengths.size();
  std::vector<std::int64_t> n(count), last_start(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (lengths[i] == 0 || lengths[i] > config.num_sites())
      throw std::out_of_range("interval_entropy_over_placements: bad interval length");
    n[i] = static_cast<std::int64_t>(lengths[i]);
    last_start[i] = static_cast<std::int64_t>(config.num_sites()) - n[i] + 1;
  }
  // A window [s, s + n - 1] contains site x iff s lies in [x - n + 1, x]. A pair is cut when
  // exactly one endpoint is inside: covering(lo) + covering(hi) - 2 * covering(both).
  std::vector<std::uint64_t> crossings(count, 0);
  for (const auto& p : config.pairs()) {
    const auto lo = static_cast<std::int64_t>(p.first), hi = static_cast<std::int64_t>(p.second);
    for (std::size_t i = 0; i < count; ++i) {
      const std::int64_t ni = n[i], ls = last_start[i];
      const std::uint64_t cover_lo = span_count(std::max<std::int64_t>(1, lo - ni + 1), std::min(lo, ls));
      const std::uint64_t cover_hi = span_count(std::max<std::int64_t>(1, hi - ni + 1), std::min(hi, ls));
      const std::uint64_t both = span_count(std::max<std::int64_t>(1, hi - ni + 1), std::min(lo, ls));
      crossings[i] += cover_lo + cover_hi - 2 * both;
    }
  }
  std::vector<PlacementAverage> out(count);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = {static_cast<double>(crossings[i]) * config.log_qudit_dim(),
              static_cast<std::uint64_t>(last_start[i])};
  return out;
}

PlacementAverage unit_block_distillable_over_placements(const PairConfiguration& config,
                                                        std::size_t r) {
  if (r == 0 || r >= config.num_sites())
    throw std::out_of_range("unit_block_distillable_over_placements: bad distance");
  std::uint64_t matches = 0;
  for (const auto& p : config.pairs())
    if (p.second - p.first == r) ++matches;
  return {static_cast<double>(matches) * config.log_qudit_dim(),
          static_cast<std::uint64_t>(config.num_sites() - r)};
}

std::vector<std::uint64_t> pair_length_histogram(const PairConfiguration& config) {
  std::vector<std::uint64_t> hist(config.num_sites(), 0);
  for (const auto& p : config.pairs()) ++hist[p.second - p.first];
  return hist;
}

double analytic_entropy(const PowerLawModel& model, double n_a, double qudit_dim) {
  if (model.dimension() != 1) throw std::invalid_argument("analytic_entropy: one dimension only");
  const double a = model.alpha();
  const double scale = model.amplitude() * std::log(qudit_dim);
  if (std::abs(a - 2.0) < 1e-12) return scale * std::log(n_a);
  if (a < 2.0) return scale * std::pow(n_a, 2.0 - a) / (3.0 * a - a * a - 2.0);
  return scale / (a * a - 3.0 * a + 2.0);
}

double analytic_ed(const PowerLawModel& model, double n_a, double n_b, double r, double qudit_dim) {
  if (model.dimension() != 1) throw std::invalid_argument("analytic_ed: one dimension only");
  return 0.5 * model.amplitude() * std::log(qudit_dim) * n_a * n_b * std::pow(r, -model.alpha());
}

double unit_sphere_area(int dimension) {
  if (dimension < 1) throw std::invalid_argument("unit_sphere_area: dimension must be >= 1");
  const double half = 0.5 * dimension;
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

double analytic_ed_ddim(const PowerLawModel& model, double n_a, double n_b, double r,
                        double qudit_dim) {
  const int d = model.dimension();
  return model.amplitude() * n_a * n_b * std::log(qudit_dim) / unit_sphere_area(d) *
         std::pow(r, 1.0 - d - model.alpha());
}

}  // namespace lrent::pairstate
