#include "lrent/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "lrent/disorder.hpp"
#include "lrent/fermion.hpp"
#include "lrent/random.hpp"
#include "lrent/regression.hpp"
#include "../parallel.hpp"

#ifndef LRENT_VERSION
#define LRENT_VERSION "0.0.0"
#endif

namespace lrent::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string utc_timestamp(std::chrono::system_clock::time_point t) {
  const std::time_t seconds = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&seconds, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << contents;
  out.close();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

// Collects the run record and writes <command>_manifest.json. Result files are registered
// as they are written, so a failed run lists exactly what exists.
class Manifest {
 public:
  Manifest(std::string command, fs::path out_dir, json config, std::uint64_t seed)
      : out_dir_(std::move(out_dir)), start_(std::chrono::system_clock::now()) {
    record_ = {{"command", command},
               {"version", version()},
               {"config", std::move(config)},
               {"master_seed", seed},
               {"seed_derivation", seed_derivation_description()},
               {"started_at", utc_timestamp(start_)},
               {"outputs", json::array()},
               {"error", nullptr}};
    std::replace(command.begin(), command.end(), '-', '_');
    path_ = out_dir_ / (command + "_manifest.json");
  }

  fs::path output(const std::string& name) const { return out_dir_ / name; }

  void write_output(const std::string& name, const std::string& contents) {
    const fs::path p = output(name);
    write_file(p, contents);
    record_["outputs"].push_back(p.string());
  }

  json& operator[](const char* key) { return record_[key]; }

  void fail(const std::string& message, json details = json::object()) {
    details["message"] = message;
    record_["error"] = std::move(details);
  }

  // Writes the manifest; reports to err instead of throwing so that the exit code of the
  // command is preserved.
  void finish(std::ostream& err) {
    const auto end = std::chrono::system_clock::now();
    record_["finished_at"] = utc_timestamp(end);
    record_["wall_seconds"] = std::chrono::duration<double>(end - start_).count();
    try {
      fs::create_directories(out_dir_);
      write_file(path_, record_.dump(2) + "\n");
    } catch (const std::exception& e) {
      err << "error: could not write manifest: " << e.what() << "\n";
    }
  }

 private:
  fs::path out_dir_;
  fs::path path_;
  std::chrono::system_clock::time_point start_;
  json record_;
};

double display(double nats, bool bits) { return bits ? nats / fermion::kLn2 : nats; }
const char* unit(bool bits) { return bits ? "bits" : "nats"; }

void prepare_out_dir(const fs::path& dir) { fs::create_directories(dir); }

// Runs body with the manifest, mapping exceptions to exit codes. std::invalid_argument is a
// usage error, NumericalError a numerical failure.
template <class Body>
int guarded(Manifest& manifest, std::ostream& err, Body body) {
  int code = kExitSuccess;
  try {
    code = body();
  } catch (const census::SampleFailure& e) {
    manifest.fail(e.what(), {{"sample_index", e.sample_index()}, {"sample_seed", e.seed()}});
    err << "error: " << e.what() << "\n";
    code = kExitNumerical;
  } catch (const fermion::NumericalError& e) {
    manifest.fail(e.what());
    err << "error: " << e.what() << "\n";
    code = kExitNumerical;
  } catch (const std::invalid_argument& e) {
    manifest.fail(e.what());
    err << "error: " << e.what() << "\n";
    code = kExitUsage;
  } catch (const std::exception& e) {
    manifest.fail(e.what());
    err << "error: " << e.what() << "\n";
    code = kExitFailure;
  }
  manifest.finish(err);
  return code;
}

json fit_options_json(const census::FitOptions& fit) {
  return {{"weight_by_counts", fit.weight_by_counts},
          {"bootstrap_resamples", fit.bootstrap_resamples},
          {"bootstrap_seed", fit.bootstrap_seed}};
}

// Geometry helpers for monogamy-demo.

// Splits [first, last] into between 1 and max_blocks consecutive blocks at random cuts.
std::vector<pairstate::Interval> random_blocks(std::size_t first, std::size_t last,
                                               std::size_t max_blocks, RandomStream& rng) {
  const std::size_t length = last - first + 1;
  const std::size_t blocks = 1 + rng.below(std::min(max_blocks, length));
  std::set<std::size_t> cuts;  // a cut c starts a new block at site first + c
  while (cuts.size() + 1 < blocks) cuts.insert(1 + rng.below(length - 1));
  std::vector<pairstate::Interval> out;
  std::size_t start = first;
  for (std::size_t c : cuts) {
    out.push_back({start, first + c - start});
    start = first + c;
  }
  out.push_back({start, last - start + 1});
  return out;
}

}  // namespace

std::string_view version() { return LRENT_VERSION; }

fs::path default_out_dir() {
  const char* env = std::getenv(kOutDirEnv);
  if (env != nullptr && *env != '\0') return env;
  return ".";
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

// rsp-census

int cmd_rsp_census(const CensusOptions& options, std::ostream& out, std::ostream& err) {
  const auto& cfg = options.experiment;
  json config = cfg.to_json();
  config["fit"] = fit_options_json(options.fit);
  Manifest manifest("rsp-census", options.out_dir, config, cfg.master_seed);
  return guarded(manifest, err, [&] {
    cfg.validate();
    prepare_out_dir(options.out_dir);
    const census::PairCensus result = census::run_census(cfg);
    manifest["degenerate_discards"] = result.degenerate_discards;

    std::ostringstream csv;
    census::write_census_csv(csv, result);
    manifest.write_output("rsp_census.csv", csv.str());

    census::PowerLawFit fit;
    try {
      fit = census::power_law_fit(result, cfg.resolved_window(), options.fit);
    } catch (const std::invalid_argument& e) {
      // The census is written; too few populated bins is a property of the data, not the flags.
      throw fermion::NumericalError(e.what());
    }
    manifest.write_output("rsp_census_fit.json", census::to_json(fit).dump(2) + "\n");

    const double fraction = census::qualifying_fraction(result);
    manifest["qualifying_fraction"] = fraction;
    out << "samples " << result.num_samples << ", L = " << result.chain_length
        << ", qualifying pairs " << result.total() << " (fraction per site pair slot "
        << format_double(fraction) << "), degenerate discards " << result.degenerate_discards
        << "\n";
    out << "exponent " << format_double(fit.exponent) << " +- " << format_double(fit.exponent_stderr)
        << " over r in [" << fit.window.r_min << ", " << fit.window.r_max << "], " << fit.bins_used
        << " bins, R^2 " << format_double(fit.r_squared) << "\n";
    return kExitSuccess;
  });
}

// pairstate-scan

void ScanOptions::validate() const {
  pairstate::PowerLawModel{alpha};
  if (qudit_dim < 2) throw std::invalid_argument("qudit dimension must be >= 2");
  if (fragments < 1) throw std::invalid_argument("need at least one fragment");
  if (interval_min < 1 || interval_min > interval_max)
    throw std::invalid_argument("interval lengths must satisfy 1 <= min <= max");
  if (r_min < 1 || r_min > r_max)
    throw std::invalid_argument("distances must satisfy 1 <= r_min <= r_max");
  if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");
  if (chunk_fragments < 1) throw std::invalid_argument("chunk size must be >= 1");
  if (band_ratio < 2) throw std::invalid_argument("band ratio must be >= 2");
  if (threads < 1) throw std::invalid_argument("thread count must be >= 1");
}

json ScanOptions::to_json() const {
  return {{"alpha", alpha},
          {"qudit_dim", qudit_dim},
          {"fragments", fragments},
          {"interval_min", interval_min},
          {"interval_max", interval_max},
          {"r_min", r_min},
          {"r_max", r_max},
          {"k_max", k_max},
          {"stratified", stratified},
          {"band_ratio", band_ratio},
          {"chunk_fragments", chunk_fragments},
          {"seed", seed},
          {"threads", threads},
          {"bits", bits},
          {"out_dir", out_dir.string()}};
}

std::vector<std::size_t> scan_lengths(const ScanOptions& options) {
  std::vector<std::size_t> lengths;
  for (std::size_t n = options.interval_min; n <= options.interval_max; n *= 2) lengths.push_back(n);
  return lengths;
}

namespace {

// Half-length band [k_lo, k_hi] of the fragment law, sampled on its own.
struct ScanBand {
  std::size_t k_lo = 1, k_hi = 1;
  double mass = 0.0;          // Pr(k in band), summed directly so tiny tail bands survive
  std::uint64_t draws = 0;
  std::vector<double> cdf;    // conditional CDF inside the band, last entry exactly 1
};

std::vector<ScanBand> scan_bands(const pairstate::FragmentSampler& sampler, const ScanOptions& options) {
  std::vector<ScanBand> bands;
  for (std::size_t lo = 1; lo <= options.k_max;) {
    const std::size_t hi = lo > options.k_max / options.band_ratio ? options.k_max
                                                                   : std::min(options.k_max, lo * options.band_ratio - 1);
    ScanBand band;
    band.k_lo = lo;
    band.k_hi = hi;
    double sum = 0.0;
    for (std::size_t k = lo; k <= hi; ++k) {
      sum += sampler.probability(k);
      band.cdf.push_back(sum);
    }
    for (auto& c : band.cdf) c /= sum;
    band.cdf.back() = 1.0;
    band.mass = sum;
    bands.push_back(std::move(band));
    lo = hi + 1;
  }
  // Draws proportional to 1 / E[k | band]: every band gets about the same number of sites.
  std::vector<double> inv_mean;
  double inv_total = 0.0;
  for (const auto& band : bands) {
    double m1 = 0.0, prev = 0.0;
    for (std::size_t k = band.k_lo; k <= band.k_hi; ++k) {
      const double c = band.cdf[k - band.k_lo];
      m1 += static_cast<double>(k) * (c - prev);
      prev = c;
    }
    inv_mean.push_back(1.0 / m1);
    inv_total += 1.0 / m1;
  }
  for (std::size_t j = 0; j < bands.size(); ++j)
    bands[j].draws = std::max<std::uint64_t>(
        kMinBandDraws,
        static_cast<std::uint64_t>(std::llround(static_cast<double>(options.fragments) * inv_mean[j] / inv_total)));
  return bands;
}

// Weighted sum over placements; weights differ between bands, so placements are real.
struct WeightedSum {
  double total = 0.0;
  double placements = 0.0;

  void add(const pairstate::PlacementAverage& p, double weight) {
    total += weight * p.total;
    placements += weight * static_cast<double>(p.placements);
  }
  double mean() const { return placements > 0.0 ? total / placements : 0.0; }
};

}  // namespace

ScanResult run_pairstate_scan(const ScanOptions& options) {
  options.validate();
  const pairstate::PowerLawModel model(options.alpha);
  const pairstate::FragmentSampler sampler(model, options.k_max);
  const auto lengths = scan_lengths(options);
  const std::size_t num_r = options.r_max - options.r_min + 1;

  // A task is one chain: chunk c of band b. Without bands there is a single band holding the
  // whole law, drawn independently.
  struct Task {
    std::size_t band = 0;
    std::uint64_t chunk = 0, chunks = 1;
  };
  std::vector<ScanBand> bands;
  if (options.stratified) {
    bands = scan_bands(sampler, options);
  } else {
    ScanBand all;
    all.k_hi = options.k_max;
    all.mass = 1.0;
    all.draws = options.fragments;
    bands.push_back(std::move(all));
  }
  std::vector<Task> tasks;
  std::vector<double> offsets;
  for (std::size_t b = 0; b < bands.size(); ++b) {
    const std::uint64_t chunks = (bands[b].draws + options.chunk_fragments - 1) / options.chunk_fragments;
    for (std::uint64_t c = 0; c < chunks; ++c) tasks.push_back({b, c, chunks});
    RandomStream offset_rng(derive_seed(options.seed, b + 1, kScanTag));
    offsets.push_back(offset_rng.uniform_closed_open());
  }

  struct ChunkResult {
    std::vector<pairstate::PlacementAverage> entropy, distillable;
    std::uint64_t sites = 0;
  };
  auto results = detail::run_indexed<ChunkResult>(tasks.size(), options.threads, [&](std::size_t t) {
    const Task& task = tasks[t];
    const ScanBand& band = bands[task.band];
    RandomStream rng(derive_seed(derive_seed(options.seed, task.band + 1, kScanTag), task.chunk + 1, kScanTag));
    std::vector<std::size_t> ks;
    if (options.stratified) {
      // Systematic sample u_i = (i + U) / F of the band, chunk c taking strata c, c + chunks, ...
      const auto f = static_cast<double>(band.draws);
      for (std::uint64_t i = task.chunk; i < band.draws; i += task.chunks) {
        const double u = (static_cast<double>(i) + offsets[task.band]) / f;
        const auto it = std::upper_bound(band.cdf.begin(), band.cdf.end(), u);
        ks.push_back(band.k_lo + static_cast<std::size_t>(std::min<std::ptrdiff_t>(
                                     it - band.cdf.begin(), static_cast<std::ptrdiff_t>(band.cdf.size()) - 1)));
      }
      for (std::size_t i = ks.size() - 1; i > 0; --i) std::swap(ks[i], ks[rng.below(i + 1)]);
    } else {
      const std::uint64_t first = task.chunk * options.chunk_fragments;
      ks.resize(std::min<std::uint64_t>(options.chunk_fragments, band.draws - first));
      for (auto& k : ks) k = sampler.draw(rng);
    }
    const auto config = pairstate::build_chain_state(pairstate::FragmentSequence(std::move(ks)),
                                                     options.qudit_dim);
    ChunkResult out;
    out.sites = config.num_sites();
    out.entropy.resize(lengths.size());
    out.distillable.resize(num_r);
    std::vector<std::size_t> fitting;
    for (std::size_t len : lengths)
      if (len <= config.num_sites()) fitting.push_back(len);
    const auto averages = pairstate::interval_entropy_over_placements(config, fitting);
    std::copy(averages.begin(), averages.end(), out.entropy.begin());
    // Unit blocks {j}, {j + r} share distillable entanglement exactly when (j, j + r) is a pair.
    const auto hist = pairstate::pair_length_histogram(config);
    for (std::size_t i = 0; i < num_r; ++i) {
      const std::size_t r = options.r_min + i;
      if (r < config.num_sites())
        out.distillable[i] = {static_cast<double>(hist[r]) * config.log_qudit_dim(),
                              static_cast<std::uint64_t>(config.num_sites() - r)};
    }
    return out;
  });

  // Band b stands for mass_b of the law with draws_b fragments, so its chains carry weight
  // mass_b / draws_b in both numerator and placement count.
  std::vector<WeightedSum> entropy(lengths.size()), distillable(num_r);
  ScanResult result;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const ScanBand& band = bands[tasks[t].band];
    const double weight = band.mass / static_cast<double>(band.draws);
    for (std::size_t i = 0; i < lengths.size(); ++i) entropy[i].add(results[t].entropy[i], weight);
    for (std::size_t i = 0; i < num_r; ++i) distillable[i].add(results[t].distillable[i], weight);
    result.total_sites += results[t].sites;
  }
  result.bands = bands.size();

  result.construction_amplitude = pairstate::fragment_construction_amplitude(options.alpha, options.k_max);
  const pairstate::PowerLawModel fitted(options.alpha, result.construction_amplitude);
  const auto d = static_cast<double>(options.qudit_dim);
  for (std::size_t i = 0; i < lengths.size(); ++i)
    result.entropy.push_back({lengths[i], entropy[i].mean(),
                              pairstate::analytic_entropy(fitted, static_cast<double>(lengths[i]), d)});
  for (std::size_t i = 0; i < num_r; ++i) {
    const std::size_t r = options.r_min + i;
    result.distillable.push_back(
        {r, distillable[i].mean(), pairstate::analytic_ed(fitted, 1, 1, static_cast<double>(r), d)});
  }

  const bool logarithmic = std::abs(options.alpha - 2.0) < 1e-12;
  result.functional_form = logarithmic ? "ln N" : "N^(2-alpha)";
  std::vector<double> x, y;
  for (const auto& row : result.entropy) {
    if (entropy[x.size()].placements == 0.0) break;
    const auto n = static_cast<double>(row.length);
    x.push_back(logarithmic ? std::log(n) : std::pow(n, 2.0 - options.alpha));
    y.push_back(row.mean);
  }
  if (x.size() >= 2) {
    const LinearFit line = linear_regression(x, y);
    result.form_slope = line.slope;
    result.form_r_squared = line.r_squared;
  }
  return result;
}

int cmd_pairstate_scan(const ScanOptions& options, std::ostream& out, std::ostream& err) {
  Manifest manifest("pairstate-scan", options.out_dir, options.to_json(), options.seed);
  return guarded(manifest, err, [&] {
    options.validate();
    prepare_out_dir(options.out_dir);
    const ScanResult result = run_pairstate_scan(options);
    const bool bits = options.bits;

    std::ostringstream ent;
    ent << "length,mean_entropy_" << unit(bits) << ",analytic_entropy_" << unit(bits) << "\n";
    for (const auto& row : result.entropy)
      ent << row.length << ',' << format_double(display(row.mean, bits)) << ','
          << format_double(display(row.analytic, bits)) << "\n";
    manifest.write_output("pairstate_entropy.csv", ent.str());

    std::ostringstream ed;
    ed << "r,mean_distillable_" << unit(bits) << ",analytic_distillable_" << unit(bits) << "\n";
    for (const auto& row : result.distillable)
      ed << row.r << ',' << format_double(display(row.mean, bits)) << ','
         << format_double(display(row.analytic, bits)) << "\n";
    manifest.write_output("pairstate_distillable.csv", ed.str());

    manifest["total_sites"] = result.total_sites;
    manifest["bands"] = result.bands;
    manifest["construction_amplitude"] = result.construction_amplitude;
    manifest["functional_form"] = {{"abscissa", result.functional_form},
                                   {"slope", result.form_slope},
                                   {"r_squared", result.form_r_squared}};
    out << result.total_sites << " sites, construction amplitude C = "
        << format_double(result.construction_amplitude) << "\n";
    out << "mean entropy vs " << result.functional_form << ": slope "
        << format_double(display(result.form_slope, bits)) << ", R^2 "
        << format_double(result.form_r_squared) << "\n";
    return kExitSuccess;
  });
}

// rainbow-check

RainbowVerdict rainbow_verdict(double lambda, const std::vector<std::size_t>& sizes) {
  RainbowVerdict verdict;
  for (std::size_t n : sizes) {
    const disorder::RainbowSpec spec{n, lambda};
    const auto profile = census::mirror_pair_profile(disorder::rainbow_chain(spec), spec);
    verdict.summaries.push_back({n, *std::min_element(profile.begin(), profile.end())});
  }
  if (verdict.summaries.empty()) return verdict;
  double lo = verdict.summaries.front().min_coherent_info, hi = lo;
  for (const auto& s : verdict.summaries) {
    lo = std::min(lo, s.min_coherent_info);
    hi = std::max(hi, s.min_coherent_info);
  }
  verdict.positive = lo > 0.0;
  verdict.spread = hi > 0.0 ? (hi - lo) / hi : 0.0;
  verdict.bounded = verdict.positive && verdict.spread < 0.2;
  return verdict;
}

int cmd_rainbow_check(const RainbowOptions& options, std::ostream& out, std::ostream& err) {
  json config = {{"lambda", options.lambda}, {"sizes", options.sizes}, {"seed", options.seed},
                 {"bits", options.bits}, {"out_dir", options.out_dir.string()}};
  Manifest manifest("rainbow-check", options.out_dir, config, options.seed);
  return guarded(manifest, err, [&] {
    if (options.sizes.empty()) throw std::invalid_argument("no rainbow sizes given");
    for (std::size_t n : options.sizes) disorder::RainbowSpec{n, options.lambda}.validate();
    prepare_out_dir(options.out_dir);
    const bool bits = options.bits;

    std::ostringstream profile_csv;
    profile_csv << "half_length,site,partner,coherent_info_" << unit(bits) << "\n";
    for (std::size_t n : options.sizes) {
      const disorder::RainbowSpec spec{n, options.lambda};
      const auto profile = census::mirror_pair_profile(disorder::rainbow_chain(spec), spec);
      for (std::size_t i = 1; i <= n; ++i)
        profile_csv << n << ',' << i << ',' << 2 * n + 1 - i << ','
                    << format_double(display(profile[i - 1], bits)) << "\n";
    }
    manifest.write_output("rainbow_profile.csv", profile_csv.str());

    const RainbowVerdict verdict = rainbow_verdict(options.lambda, options.sizes);
    std::ostringstream summary_csv;
    summary_csv << "half_length,min_coherent_info_" << unit(bits) << "\n";
    for (const auto& s : verdict.summaries)
      summary_csv << s.half_length << ',' << format_double(display(s.min_coherent_info, bits)) << "\n";
    manifest.write_output("rainbow_summary.csv", summary_csv.str());

    manifest["verdict"] = {{"positive", verdict.positive}, {"spread", verdict.spread},
                           {"bounded", verdict.bounded}};
    for (const auto& s : verdict.summaries)
      out << "N = " << s.half_length << ": min mirror-pair I_c = "
          << format_double(display(s.min_coherent_info, bits)) << " " << unit(bits) << "\n";
    out << (verdict.bounded ? "bounded" : "not bounded") << ": minima "
        << (verdict.positive ? "positive" : "not all positive") << ", relative spread "
        << format_double(verdict.spread) << "\n";
    return kExitSuccess;
  });
}

// monogamy-demo

MonogamyReport run_monogamy_demo(const MonogamyOptions& options) {
  if (options.sites < 4) throw std::invalid_argument("monogamy-demo needs at least 4 sites");
  if (options.max_parts < 1) throw std::invalid_argument("max parts must be >= 1");
  if (options.max_interval < 1) throw std::invalid_argument("max interval must be >= 1");
  const pairstate::PowerLawModel model(options.alpha);
  const pairstate::FragmentSampler sampler(model, options.k_max);
  RandomStream state_rng(derive_seed(options.seed, 0, kScanTag));
  const auto config = pairstate::build_chain_state(
      pairstate::sample_fragments(sampler, options.sites, state_rng), options.qudit_dim);
  const std::size_t length = config.num_sites();

  RandomStream rng(derive_seed(options.seed, 1, kScanTag));
  MonogamyReport report;
  for (std::size_t g = 0; g < options.geometries; ++g) {
    const std::size_t len_a = 1 + rng.below(std::min(options.max_interval, length - 2));
    const std::size_t start_a = 1 + rng.below(length - len_a + 1);
    const pairstate::Interval a{start_a, len_a};

    std::vector<pairstate::Interval> blocks;
    const std::size_t parts_per_side = std::max<std::size_t>(1, options.max_parts / 2);
    if (a.start > 1) {
      auto left = random_blocks(1, a.start - 1, parts_per_side, rng);
      blocks.insert(blocks.end(), left.begin(), left.end());
    }
    if (a.last() < length) {
      auto right = random_blocks(a.last() + 1, length, parts_per_side, rng);
      blocks.insert(blocks.end(), right.begin(), right.end());
    }

    const bool partition = g % 2 == 0;
    if (!partition) {
      std::vector<pairstate::Interval> kept;
      for (const auto& b : blocks)
        if (rng.below(2) == 0) kept.push_back(b);
      if (kept.size() == blocks.size()) kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(rng.below(kept.size())));
      blocks = std::move(kept);
      ++report.strict_subfamilies;
    }

    const auto result = pairstate::monogamy_check(config, a, blocks);
    ++report.geometries;
    if (!result.holds) ++report.violations;
    report.max_lhs = std::max(report.max_lhs, result.lhs);
    if (partition) {
      ++report.partitions;
      if (result.lhs == result.rhs && result.rhs == pairstate::entropy_of_interval(config, a))
        ++report.partition_equalities;
    }
  }
  return report;
}

int cmd_monogamy_demo(const MonogamyOptions& options, std::ostream& out, std::ostream& err) {
  json config = {{"alpha", options.alpha},           {"qudit_dim", options.qudit_dim},
                 {"sites", options.sites},           {"geometries", options.geometries},
                 {"max_parts", options.max_parts},   {"max_interval", options.max_interval},
                 {"k_max", options.k_max},           {"seed", options.seed},
                 {"bits", options.bits},             {"out_dir", options.out_dir.string()}};
  Manifest manifest("monogamy-demo", options.out_dir, config, options.seed);
  return guarded(manifest, err, [&] {
    prepare_out_dir(options.out_dir);
    const MonogamyReport report = run_monogamy_demo(options);
    manifest["report"] = {{"geometries", report.geometries},
                          {"violations", report.violations},
                          {"partitions", report.partitions},
                          {"partition_equalities", report.partition_equalities},
                          {"strict_subfamilies", report.strict_subfamilies}};
    out << report.geometries << " geometries: " << report.violations << " violations of sum_i E(A,B_i) <= E(A, union B_i)\n";
    out << report.partition_equalities << " of " << report.partitions
        << " partitions of the complement give lhs = rhs = S(A)\n";
    out << report.strict_subfamilies << " strict subfamilies, largest lhs "
        << format_double(display(report.max_lhs, options.bits)) << " " << unit(options.bits) << "\n";
    const bool ok = report.violations == 0 && report.partition_equalities == report.partitions;
    out << (ok ? "equality verdict: saturated" : "equality verdict: FAILED") << "\n";
    return ok ? kExitSuccess : kExitFailure;
  });
}

// fit

int cmd_fit(const FitCommandOptions& options, std::ostream& out, std::ostream& err) {
  json config = {{"census", options.census_csv.string()},
                 {"window", {options.window.r_min, options.window.r_max}},
                 {"fit", fit_options_json(options.fit)},
                 {"out_dir", options.out_dir.string()}};
  Manifest manifest("fit", options.out_dir, config, options.fit.bootstrap_seed);
  return guarded(manifest, err, [&] {
    std::ifstream in(options.census_csv, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot read census file " + options.census_csv.string());
    const census::PairCensus data = census::read_census_csv(in);
    prepare_out_dir(options.out_dir);
    census::PowerLawFit fit;
    try {
      fit = census::power_law_fit(data, options.window, options.fit);
    } catch (const std::invalid_argument& e) {
      throw fermion::NumericalError(e.what());
    }
    manifest.write_output("fit.json", census::to_json(fit).dump(2) + "\n");
    out << "exponent " << format_double(fit.exponent) << " +- " << format_double(fit.exponent_stderr)
        << " over r in [" << fit.window.r_min << ", " << fit.window.r_max << "], " << fit.bins_used
        << " bins, R^2 " << format_double(fit.r_squared) << "\n";
    return kExitSuccess;
  });
}

// Argument parsing

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Long-range entanglement simulations: Bell-pair ensembles and disordered free-fermion chains"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);
  const fs::path out_default = default_out_dir();

  // rsp-census
  CensusOptions census_opts;
  census_opts.out_dir = out_default;
  std::optional<double> threshold_bits, threshold_nats;
  std::optional<std::size_t> fit_min, fit_max;
  auto* rsp = app.add_subcommand("rsp-census", "Coherent-information pair census of random-singlet chains");
  rsp->add_option("--length", census_opts.experiment.chain_length, "Chain length L (even)")->default_val(200);
  rsp->add_option("--samples", census_opts.experiment.num_samples, "Disorder samples")->default_val(1000);
  rsp->add_option("--delta", census_opts.experiment.delta, "Disorder strength")->default_val(3.0);
  auto* tb = rsp->add_option("--threshold-bits", threshold_bits, "I_c threshold in bits");
  auto* tn = rsp->add_option("--threshold-nats", threshold_nats, "I_c threshold in nats (default ln2/2)");
  tb->excludes(tn);
  rsp->add_option("--seed", census_opts.experiment.master_seed, "Master seed")->default_val(1);
  rsp->add_option("--threads", census_opts.experiment.worker_count, "Worker threads")->default_val(1);
  rsp->add_option("--fit-min", fit_min, "Smallest fitted distance");
  rsp->add_option("--fit-max", fit_max, "Largest fitted distance");
  rsp->add_flag("--weighted", census_opts.fit.weight_by_counts, "Weight fit points by counts");
  rsp->add_option("--bootstrap", census_opts.fit.bootstrap_resamples, "Bootstrap resamples")->default_val(200);
  rsp->add_option("--out-dir", census_opts.out_dir, "Output directory (default $LRENT_OUT_DIR or .)");

  // pairstate-scan
  ScanOptions scan_opts;
  scan_opts.out_dir = out_default;
  bool iid = false;
  auto* scan = app.add_subcommand("pairstate-scan", "Entropy and distillable-entanglement scaling of Bell-pair ensembles");
  scan->add_option("--alpha", scan_opts.alpha, "Pair-length exponent (> 1)")->default_val(2.0);
  scan->add_option("--qudit-dim", scan_opts.qudit_dim, "Local dimension d")->default_val(2);
  scan->add_option("--fragments", scan_opts.fragments, "Number of rainbow fragments")->default_val(1000000);
  scan->add_option("--interval-min", scan_opts.interval_min, "Smallest interval length")->default_val(64);
  scan->add_option("--interval-max", scan_opts.interval_max, "Largest interval length")->default_val(4096);
  scan->add_option("--r-min", scan_opts.r_min, "Smallest separation for E_D")->default_val(1);
  scan->add_option("--r-max", scan_opts.r_max, "Largest separation for E_D")->default_val(100);
  scan->add_option("--k-max", scan_opts.k_max, "Largest fragment half length")->default_val(pairstate::kDefaultKMax);
  scan->add_option("--chunk", scan_opts.chunk_fragments, "Fragments per chain chunk")->default_val(1000000);
  scan->add_option("--band-ratio", scan_opts.band_ratio, "Ratio between successive half-length band edges")->default_val(4);
  scan->add_flag("--iid", iid, "Independent draws from the whole law instead of banded systematic samples");
  scan->add_option("--seed", scan_opts.seed, "Master seed")->default_val(1);
  scan->add_option("--threads", scan_opts.threads, "Worker threads")->default_val(1);
  scan->add_flag("--bits", scan_opts.bits, "Report entropies in bits");
  scan->add_option("--out-dir", scan_opts.out_dir, "Output directory (default $LRENT_OUT_DIR or .)");

  // rainbow-check
  RainbowOptions rainbow_opts;
  rainbow_opts.out_dir = out_default;
  auto* rainbow = app.add_subcommand("rainbow-check", "Mirror-pair coherent information of rainbow chains");
  rainbow->add_option("--lambda", rainbow_opts.lambda, "Coupling decay in (0, 1)")->default_val(0.5);
  rainbow->add_option("--sizes", rainbow_opts.sizes, "Half lengths N, comma separated")->delimiter(',')->default_str("4,8,16");
  rainbow->add_option("--seed", rainbow_opts.seed, "Recorded in the manifest; the chains are deterministic");
  rainbow->add_flag("--bits", rainbow_opts.bits, "Report entropies in bits");
  rainbow->add_option("--out-dir", rainbow_opts.out_dir, "Output directory (default $LRENT_OUT_DIR or .)");

  // monogamy-demo
  MonogamyOptions mono_opts;
  mono_opts.out_dir = out_default;
  auto* mono = app.add_subcommand("monogamy-demo", "Monogamy of distillable entanglement on a sampled pair state");
  mono->add_option("--alpha", mono_opts.alpha, "Pair-length exponent (> 1)")->default_val(2.0);
  mono->add_option("--qudit-dim", mono_opts.qudit_dim, "Local dimension d")->default_val(2);
  mono->add_option("--sites", mono_opts.sites, "Minimum number of sites")->default_val(4096);
  mono->add_option("--geometries", mono_opts.geometries, "Random geometries")->default_val(1000);
  mono->add_option("--max-parts", mono_opts.max_parts, "Largest number of B blocks")->default_val(6);
  mono->add_option("--max-interval", mono_opts.max_interval, "Largest length of A")->default_val(256);
  mono->add_option("--k-max", mono_opts.k_max, "Largest fragment half length")->default_val(pairstate::kDefaultKMax);
  mono->add_option("--seed", mono_opts.seed, "Master seed")->default_val(1);
  mono->add_flag("--bits", mono_opts.bits, "Report entropies in bits");
  mono->add_option("--out-dir", mono_opts.out_dir, "Output directory (default $LRENT_OUT_DIR or .)");

  // fit
  FitCommandOptions fit_opts;
  fit_opts.out_dir = out_default;
  auto* fit = app.add_subcommand("fit", "Refit a census CSV over a new window");
  fit->add_option("census", fit_opts.census_csv, "Census CSV (r,count)")->required();
  fit->add_option("--fit-min", fit_opts.window.r_min, "Smallest fitted distance")->default_val(3);
  fit->add_option("--fit-max", fit_opts.window.r_max, "Largest fitted distance")->default_val(101);
  fit->add_flag("--weighted", fit_opts.fit.weight_by_counts, "Weight fit points by counts");
  fit->add_option("--bootstrap", fit_opts.fit.bootstrap_resamples, "Bootstrap resamples")->default_val(200);
  fit->add_option("--seed", fit_opts.fit.bootstrap_seed, "Bootstrap seed")->default_val(1);
  fit->add_option("--out-dir", fit_opts.out_dir, "Output directory (default $LRENT_OUT_DIR or .)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream cli_out, cli_err;
    const int code = app.exit(e, cli_out, cli_err);
    out << cli_out.str();
    err << cli_err.str();
    return code == 0 ? kExitSuccess : kExitUsage;
  }

  if (rsp->parsed()) {
    auto& cfg = census_opts.experiment;
    if (threshold_bits) cfg.threshold_nats = *threshold_bits * fermion::kLn2;
    if (threshold_nats) cfg.threshold_nats = *threshold_nats;
    if (fit_min || fit_max) {
      const census::FitWindow def = cfg.resolved_window();
      cfg.fit_window = census::FitWindow{fit_min.value_or(def.r_min), fit_max.value_or(def.r_max)};
    }
    cfg.output_path = census_opts.out_dir.string();
    census_opts.fit.bootstrap_seed = cfg.master_seed;
    return cmd_rsp_census(census_opts, out, err);
  }
  if (scan->parsed()) {
    scan_opts.stratified = !iid;
    return cmd_pairstate_scan(scan_opts, out, err);
  }
  if (rainbow->parsed()) return cmd_rainbow_check(rainbow_opts, out, err);
  if (mono->parsed()) return cmd_monogamy_demo(mono_opts, out, err);
  return cmd_fit(fit_opts, out, err);
}

}  // namespace lrent::cli
