#pragma once

// Command implementations behind the lrent executable. Each command resolves its options,
// runs, writes its result files and a JSON manifest into the output directory, and returns a
// process exit code.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lrent/census.hpp"
#include "lrent/pairstate.hpp"

namespace lrent::cli {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

/// Name of the environment variable holding the default output directory.
inline constexpr const char* kOutDirEnv = "LRENT_OUT_DIR";

std::string_view version();

/// $LRENT_OUT_DIR if set and nonempty, else the current directory.
std::filesystem::path default_out_dir();

/// Shortest decimal text that parses back to the same double.
std::string format_double(double x);

struct CensusOptions {
  census::ExperimentConfig experiment;
  census::FitOptions fit;
  std::filesystem::path out_dir;
};

inline constexpr std::uint64_t kMinBandDraws = 4;

struct ScanOptions {
  double alpha = 2.0;
  int qudit_dim = 2;
  std::uint64_t fragments = 1'000'000;
  std::size_t interval_min = 64;
  std::size_t interval_max = 4096;
  std::size_t r_min = 1;
  std::size_t r_max = 100;
  std::size_t k_max = pairstate::kDefaultKMax;
  /// Split the half-length law into bands [K, band_ratio K) and draw each band as its own
  /// systematic sample; otherwise draw independently from the whole law.
  bool stratified = true;
  std::size_t band_ratio = 4;
  std::uint64_t chunk_fragments = 1'000'000;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  bool bits = false;
  std::filesystem::path out_dir;

  void validate() const;
  nlohmann::json to_json() const;
};

struct ScanEntropyRow {
  std::size_t length = 0;
  double mean = 0.0;      ///< nats
  double analytic = 0.0;  ///< nats
};

struct ScanDistanceRow {
  std::size_t r = 0;
  double mean = 0.0;      ///< nats
  double analytic = 0.0;  ///< nats, parity-averaged
};

struct ScanResult {
  std::vector<ScanEntropyRow> entropy;
  std::vector<ScanDistanceRow> distillable;
  std::uint64_t total_sites = 0;
  std::size_t bands = 0;
  double construction_amplitude = 0.0;
  /// Mean entropy regressed on N^(2 - alpha), or on ln N at alpha = 2.
  std::string functional_form;
  double form_slope = 0.0;
  double form_r_squared = 0.0;
};

/// Interval lengths interval_min, 2 interval_min, ... up to interval_max.
std::vector<std::size_t> scan_lengths(const ScanOptions& options);

/// Ensemble of rainbow-fragment pair states.
///
/// In stratified mode the half-length law is cut into bands [K, band_ratio K) and the
/// `fragments` draws are shared so that each band holds about the same number of sites (at
/// least kMinBandDraws draws each). Band b is one systematic sample of its conditional law with
/// offset from stream derive_seed(seed, b + 1, kScanTag); its chains are weighted by
/// Pr(band) / draws when placement sums are combined. This keeps the rare long fragments that
/// dominate large intervals from being a handful of lucky draws. In iid mode there is one band
/// drawn independently. Each band is split into chains of at most chunk_fragments fragments;
/// chain c of band b shuffles or draws with stream derive_seed(derive_seed(seed, b + 1,
/// kScanTag), c + 1, kScanTag). The analytic columns use the amplitude of the fragment
/// construction.
ScanResult run_pairstate_scan(const ScanOptions& options);

struct RainbowOptions {
  double lambda = 0.5;
  std::vector<std::size_t> sizes{4, 8, 16};
  std::uint64_t seed = 0;  ///< recorded only; the chains are deterministic
  bool bits = false;
  std::filesystem::path out_dir;
};

struct RainbowSummary {
  std::size_t half_length = 0;
  double min_coherent_info = 0.0;  ///< nats
};

/// Minimum over the profile of each size, and whether all minima are positive and their
/// spread (max - min) / max is below 20%.
struct RainbowVerdict {
  std::vector<RainbowSummary> summaries;
  bool positive = false;
  double spread = 0.0;
  bool bounded = false;
};

RainbowVerdict rainbow_verdict(double lambda, const std::vector<std::size_t>& sizes);

struct MonogamyOptions {
  double alpha = 2.0;
  int qudit_dim = 2;
  std::size_t sites = 4096;
  std::size_t geometries = 1000;
  std::size_t max_parts = 6;
  std::size_t max_interval = 256;
  std::size_t k_max = pairstate::kDefaultKMax;
  std::uint64_t seed = 1;
  bool bits = false;
  std::filesystem::path out_dir;
};

struct MonogamyReport {
  std::size_t geometries = 0;
  std::size_t violations = 0;
  std::size_t partitions = 0;           ///< geometries whose B_i cover the complement of A
  std::size_t partition_equalities = 0; ///< of those, lhs == rhs exactly
  std::size_t strict_subfamilies = 0;
  double max_lhs = 0.0;
};

/// Randomized geometries on one sampled pair state. Even-numbered geometries partition the
/// complement of A into random blocks; odd-numbered ones drop a random nonempty set of those
/// blocks.
MonogamyReport run_monogamy_demo(const MonogamyOptions& options);

struct FitCommandOptions {
  std::filesystem::path census_csv;
  census::FitWindow window;
  census::FitOptions fit;
  std::filesystem::path out_dir;
};

int cmd_rsp_census(const CensusOptions& options, std::ostream& out, std::ostream& err);
int cmd_pairstate_scan(const ScanOptions& options, std::ostream& out, std::ostream& err);
int cmd_rainbow_check(const RainbowOptions& options, std::ostream& out, std::ostream& err);
int cmd_monogamy_demo(const MonogamyOptions& options, std::ostream& out, std::ostream& err);
int cmd_fit(const FitCommandOptions& options, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to a command.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lrent::cli
