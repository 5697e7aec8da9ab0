#include "lrent/census.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "lrent/regression.hpp"
#include "parallel.hpp"

namespace lrent::census {

namespace {

fermion::CorrelationMatrix ground_state_with_redraws(const ChainGenerator& generator,
                                                     RandomStream& rng, std::uint64_t sample,
                                                     std::uint64_t seed,
                                                     std::uint64_t& discards) {
  for (;;) {
    try {
      return fermion::half_filled_ground_state(generator(rng));
    } catch (const fermion::DegenerateFermiLevel& e) {
      if (++discards > kMaxRedraws)
        throw SampleFailure(sample, seed,
                            "too many degenerate realizations in a row; last: " + std::string(e.what()));
    } catch (const SampleFailure&) {
      throw;
    } catch (const std::exception& e) {
      throw SampleFailure(sample, seed, e.what());
    }
  }
}

std::uint64_t poisson_draw(double mean, RandomStream& rng) {
  if (mean <= 0.0) return 0;
  if (mean < 30.0) {
    const double limit = std::exp(-mean);
    std::uint64_t k = 0;
    double p = rng.uniform_open_closed();
    while (p > limit) {
      ++k;
      p *= rng.uniform_open_closed();
    }
    return k;
  }
  // Normal approximation; only the spread of the bootstrap exponents is used.
  const double u1 = rng.uniform_open_closed();
  const double u2 = rng.uniform_closed_open();
  const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  const double x = std::round(mean + std::sqrt(mean) * z);
  return x > 0.0 ? static_cast<std::uint64_t>(x) : 0;
}

double percentile(std::vector<double> sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

void validate_window(const FitWindow& w) {
  if (w.r_min < 1 || w.r_min >= w.r_max)
    throw std::invalid_argument("fit window [" + std::to_string(w.r_min) + ", " +
                                std::to_string(w.r_max) + "] must satisfy 1 <= r_min < r_max");
}

}  // namespace

FitWindow ExperimentConfig::resolved_window() const {
  if (fit_window) return *fit_window;
  const std::size_t r_max = std::min<std::size_t>(101, chain_length / 5);
  if (r_max <= 3) return {1, chain_length > 2 ? chain_length - 1 : 2};
  return {3, r_max};
}

void ExperimentConfig::validate() const {
  if (chain_length < 4 || chain_length % 2 != 0)
    throw std::invalid_argument("chain length must be even and >= 4, got " +
                                std::to_string(chain_length));
  if (num_samples < 1) throw std::invalid_argument("number of samples must be >= 1");
  disorder::DisorderSpec{delta}.validate();
  if (!(threshold_nats > 0.0 && threshold_nats < fermion::kLn2))
    throw std::invalid_argument("threshold must lie in (0, ln 2) nats, got " +
                                std::to_string(threshold_nats));
  const FitWindow w = resolved_window();
  validate_window(w);
  if (w.r_max > chain_length - 1)
    throw std::invalid_argument("fit window maximum " + std::to_string(w.r_max) +
                                " exceeds the largest distance " + std::to_string(chain_length - 1));
  if (worker_count < 1) throw std::invalid_argument("worker count must be >= 1");
}

nlohmann::json ExperimentConfig::to_json() const {
  const FitWindow w = resolved_window();
  return {{"chain_length", chain_length},   {"num_samples", num_samples},
          {"delta", delta},                 {"threshold_nats", threshold_nats},
          {"fit_window", {w.r_min, w.r_max}}, {"master_seed", master_seed},
          {"worker_count", worker_count},   {"output_path", output_path}};
}

std::uint64_t PairCensus::total() const {
  std::uint64_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

void PairCensus::merge(const PairCensus& other) {
  if (counts.empty() && num_samples == 0) {
    *this = other;
    return;
  }
  if (other.chain_length != chain_length || other.threshold_nats != threshold_nats)
    throw std::invalid_argument("PairCensus::merge: chain length or threshold differ");
  for (std::size_t r = 0; r < counts.size(); ++r) counts[r] += other.counts[r];
  num_samples += other.num_samples;
  pairs_examined += other.pairs_examined;
  degenerate_discards += other.degenerate_discards;
  shards.insert(shards.end(), other.shards.begin(), other.shards.end());
}

std::vector<std::uint64_t> census_one_sample(const fermion::CorrelationMatrix& c,
                                             double threshold_nats) {
  const std::size_t n = c.num_sites();
  std::vector<std::uint64_t> counts(n, 0);
  std::vector<double> diag(n), single(n);
  for (std::size_t j = 0; j < n; ++j) {
    diag[j] = c(j, j);
    single[j] = fermion::binary_entropy(diag[j]);
  }
  const Eigen::MatrixXd& m = c.entries();
  for (std::size_t j = 0; j < n; ++j) {
    const double* column = m.col(static_cast<Eigen::Index>(j)).data();
    for (std::size_t k = j + 1; k < n; ++k) {
      const double i_c =
          fermion::pair_coherent_info(diag[j], diag[k], column[k], single[j], single[k]);
      if (i_c > threshold_nats) ++counts[k - j];
    }
  }
  return counts;
}

SampleFailure::SampleFailure(std::uint64_t sample_index, std::uint64_t seed, const std::string& what)
    : fermion::NumericalError("sample " + std::to_string(sample_index) + " (seed " +
                              std::to_string(seed) + "): " + what),
      sample_index_(sample_index),
      seed_(seed) {}

PairCensus run_census(const ExperimentConfig& config) {
  config.validate();
  const std::size_t length = config.chain_length;
  const disorder::DisorderSpec spec{config.delta};
  const ChainGenerator generator = [&](RandomStream& rng) {
    return disorder::rsp_chain(length, spec, rng);
  };

  struct SampleResult {
    CensusShard shard;
    std::uint64_t discards = 0;
  };
  auto results = detail::run_indexed<SampleResult>(
      config.num_samples, config.worker_count, [&](std::size_t i) {
        const std::uint64_t sample = i + 1;
        const std::uint64_t seed = derive_seed(config.master_seed, sample, kDisorderTag);
        RandomStream rng(seed);
        SampleResult out;
        const auto c = ground_state_with_redraws(generator, rng, sample, seed, out.discards);
        const auto counts = census_one_sample(c, config.threshold_nats);
        for (std::size_t r = 1; r < counts.size(); ++r)
          if (counts[r] > 0)
            out.shard.entries.emplace_back(static_cast<std::uint32_t>(r),
                                           static_cast<std::uint32_t>(counts[r]));
        return out;
      });

  PairCensus census;
  census.chain_length = length;
  census.threshold_nats = config.threshold_nats;
  census.counts.assign(length, 0);
  census.num_samples = config.num_samples;
  census.pairs_examined =
      static_cast<std::uint64_t>(config.num_samples) * (length * (length - 1) / 2);
  census.shards.reserve(results.size());
  for (auto& result : results) {
    for (auto [r, n] : result.shard.entries) census.counts[r] += n;
    census.degenerate_discards += result.discards;
    census.shards.push_back(std::move(result.shard));
  }
  return census;
}

double qualifying_fraction(const PairCensus& census) {
  if (census.num_samples == 0 || census.chain_length < 2)
    throw std::invalid_argument("qualifying_fraction: empty census");
  const double slots =
      static_cast<double>(census.num_samples) * static_cast<double>(census.chain_length / 2);
  return static_cast<double>(census.total()) / slots;
}

double fraction_of_pairs_examined(const PairCensus& census) {
  if (census.pairs_examined == 0)
    throw std::invalid_argument("fraction_of_pairs_examined: no pairs examined");
  return static_cast<double>(census.total()) / static_cast<double>(census.pairs_examined);
}

PowerLawFit power_law_fit(std::span<const std::uint64_t> counts, const FitWindow& window,
                          bool weight_by_counts) {
  validate_window(window);
  std::vector<double> x, y, w;
  for (std::size_t r = window.r_min; r <= window.r_max && r < counts.size(); ++r) {
    if (counts[r] == 0) continue;
    x.push_back(std::log(static_cast<double>(r)));
    y.push_back(std::log(static_cast<double>(counts[r])));
    w.push_back(static_cast<double>(counts[r]));
  }
  if (x.size() < 3)
    throw std::invalid_argument("power_law_fit: only " + std::to_string(x.size()) +
                                " nonzero bins in window [" + std::to_string(window.r_min) + ", " +
                                std::to_string(window.r_max) + "], need 3");
  const LinearFit line =
      linear_regression(x, y, weight_by_counts ? std::span<const double>(w) : std::span<const double>());
  PowerLawFit fit;
  fit.exponent = -line.slope;
  fit.log_amplitude = line.intercept;
  fit.window = window;
  fit.r_squared = line.r_squared;
  fit.bins_used = x.size();
  return fit;
}

PowerLawFit power_law_fit(const PairCensus& census, const FitWindow& window,
                          const FitOptions& options) {
  PowerLawFit fit = power_law_fit(census.counts, window, options.weight_by_counts);

  const std::size_t span_len = window.r_max - window.r_min + 1;
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> in_window;
  in_window.reserve(census.shards.size());
  for (const auto& shard : census.shards) {
    auto& v = in_window.emplace_back();
    for (auto e : shard.entries)
      if (e.first >= window.r_min && e.first <= window.r_max) v.push_back(e);
  }

  std::vector<double> exponents;
  exponents.reserve(options.bootstrap_resamples);
  std::vector<std::uint64_t> hist(window.r_max + 1);
  for (std::size_t b = 0; b < options.bootstrap_resamples; ++b) {
    RandomStream rng(derive_seed(options.bootstrap_seed, b, kBootstrapTag));
    std::fill(hist.begin(), hist.end(), 0);
    if (!in_window.empty()) {
      for (std::size_t i = 0; i < in_window.size(); ++i)
        for (auto [r, n] : in_window[rng.below(in_window.size())]) hist[r] += n;
    } else {
      for (std::size_t k = 0; k < span_len; ++k) {
        const std::size_t r = window.r_min + k;
        hist[r] = poisson_draw(static_cast<double>(census.count(r)), rng);
      }
    }
    try {
      exponents.push_back(power_law_fit(hist, window, options.weight_by_counts).exponent);
    } catch (const std::invalid_argument&) {
      // Resample with fewer than three nonzero bins: no exponent.
    }
  }
  fit.bootstrap_resamples = exponents.size();
  if (exponents.size() >= 2) {
    std::sort(exponents.begin(), exponents.end());
    fit.exponent_stderr = 0.5 * (percentile(exponents, 0.84) - percentile(exponents, 0.16));
  }
  return fit;
}

std::vector<ScalingRow> entropy_scaling_scan(const ChainGenerator& generator,
                                             std::size_t num_samples, std::uint64_t master_seed,
                                             std::span<const std::size_t> lengths,
                                             std::size_t worker_count) {
  if (num_samples < 1) throw std::invalid_argument("entropy_scaling_scan: need at least one sample");
  auto per_sample = detail::run_indexed<std::vector<double>>(num_samples, worker_count, [&](std::size_t i) {
    const std::uint64_t sample = i + 1;
    const std::uint64_t seed = derive_seed(master_seed, sample, kDisorderTag);
    RandomStream rng(seed);
    std::uint64_t discards = 0;
    const auto c = ground_state_with_redraws(generator, rng, sample, seed, discards);
    const std::size_t n = c.num_sites();
    std::vector<double> out;
    out.reserve(lengths.size());
    std::vector<std::size_t> sites;
    for (std::size_t len : lengths) {
      if (len < 1 || len > n)
        throw std::invalid_argument("entropy_scaling_scan: interval length " + std::to_string(len) +
                                    " outside [1, " + std::to_string(n) + "]");
      sites.resize(len);
      const std::size_t start = (n - len) / 2;
      for (std::size_t k = 0; k < len; ++k) sites[k] = start + k;
      out.push_back(fermion::subsystem_entropy(c, sites));
    }
    return out;
  });

  std::vector<ScalingRow> rows(lengths.size());
  const auto count = static_cast<double>(num_samples);
  for (std::size_t l = 0; l < lengths.size(); ++l) {
    double sum = 0.0;
    for (const auto& s : per_sample) sum += s[l];
    const double mean = sum / count;
    double sq = 0.0;
    for (const auto& s : per_sample) sq += (s[l] - mean) * (s[l] - mean);
    rows[l].length = lengths[l];
    rows[l].mean_entropy = mean;
    rows[l].stderr_entropy = num_samples > 1 ? std::sqrt(sq / (count - 1.0) / count) : 0.0;
  }
  return rows;
}

std::vector<ScalingRow> entropy_scaling_scan(const ExperimentConfig& config,
                                             std::span<const std::size_t> lengths) {
  config.validate();
  const disorder::DisorderSpec spec{config.delta};
  const std::size_t length = config.chain_length;
  return entropy_scaling_scan(
      [&](RandomStream& rng) { return disorder::rsp_chain(length, spec, rng); },
      config.num_samples, config.master_seed, lengths, config.worker_count);
}

std::vector<double> mirror_pair_profile(const fermion::CouplingChain& chain,
                                        const disorder::RainbowSpec& spec) {
  spec.validate();
  const std::size_t n = spec.half_length;
  if (chain.num_sites() != 2 * n)
    throw std::invalid_argument("mirror_pair_profile: chain has " + std::to_string(chain.num_sites()) +
                                " sites, spec expects " + std::to_string(2 * n));
  const auto c = fermion::half_filled_ground_state(chain);
  std::vector<double> profile(n);
  for (std::size_t i = 1; i <= n; ++i)
    profile[i - 1] = fermion::pair_coherent_info(c, i - 1, 2 * n - i);
  return profile;
}

void write_census_csv(std::ostream& out, const PairCensus& census) {
  out << "r,count\n";
  for (std::size_t r = 1; r + 1 <= census.chain_length; ++r)
    out << r << ',' << census.count(r) << '\n';
}

PairCensus read_census_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("census CSV: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "r,count") throw std::invalid_argument("census CSV: expected header 'r,count'");

  std::vector<std::pair<std::size_t, std::uint64_t>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    std::size_t r = 0;
    std::uint64_t n = 0;
    const char* end = line.data() + line.size();
    bool ok = comma != std::string::npos;
    if (ok) {
      auto a = std::from_chars(line.data(), line.data() + comma, r);
      auto b = std::from_chars(line.data() + comma + 1, end, n);
      ok = a.ec == std::errc{} && a.ptr == line.data() + comma && b.ec == std::errc{} &&
           b.ptr == end && r >= 1;
    }
    if (!ok) throw std::invalid_argument("census CSV: malformed row at line " + std::to_string(line_no));
    rows.emplace_back(r, n);
  }
  PairCensus census;
  std::size_t max_r = 1;
  for (auto [r, n] : rows) max_r = std::max(max_r, r);
  census.chain_length = max_r + 1;
  census.counts.assign(census.chain_length, 0);
  for (auto [r, n] : rows) census.counts[r] += n;
  return census;
}

nlohmann::json to_json(const PowerLawFit& fit) {
  return {{"exponent", fit.exponent},
          {"stderr", fit.exponent_stderr},
          {"window", {fit.window.r_min, fit.window.r_max}},
          {"r_squared", fit.r_squared},
          {"bins_used", fit.bins_used},
          {"log_amplitude", fit.log_amplitude}};
}

}  // namespace lrent::census
