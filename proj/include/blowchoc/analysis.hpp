// Part of the blowchoc project, under Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX short identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "blowchoc/filter.hpp"
#include "blowchoc/key_source.hpp"

namespace blowchoc {

/// W false positives among N negative queries.
struct FprEstimate {
  std::uint64_t queries = 0;          ///< N
  std::uint64_t false_positives = 0;  ///< W

  double fpr() const {
    return queries == 0 ? 0.0 : static_cast<double>(false_positives) / static_cast<double>(queries);
  }
  /// Binomial standard error sqrt(p(1-p)/N) of fpr().
  double std_error() const;
  /// log2(fpr); empty when no false positive was seen.
  std::optional<double> log2_fpr() const;
  /// Standard error of log2_fpr() by the delta method; empty when W = 0.
  std::optional<double> log2_std_error() const;
};

/// Queries negatives.negative(0 .. N-1). threads > 1 splits the range into
/// contiguous read-only chunks. Throws std::invalid_argument for N = 0.
FprEstimate estimate_fpr(const Filter& filter, const KeyGenerator& negatives, std::uint64_t queries,
                         unsigned threads = 0);

/// Queries an explicit list of keys that were never inserted.
FprEstimate estimate_fpr(const Filter& filter, std::span<const std::uint64_t> negatives,
                         unsigned threads = 0);

/// Builds a filter from config, inserts `inserted` synthetic positive keys,
/// and queries `queries` synthetic negatives, all drawn from key_seed.
FprEstimate measure_fpr(const FilterConfig& config, std::uint64_t inserted, std::uint64_t queries,
                        std::uint64_t key_seed, unsigned threads = 0);

/// counts[j] = number of blocks holding exactly j set bits, j in [0, B].
/// A standard filter is tallied over aligned block_bits-wide windows.
struct LoadHistogram {
  std::vector<std::uint64_t> counts;

  std::uint64_t num_blocks() const;
  std::uint64_t total_set_bits() const;
  double mean() const;
  double variance() const;
};

LoadHistogram block_load_histogram(const Filter& filter);

/// Largest per-block load j with (j/B)^k <= 2^-k / c, rounded to nearest:
/// (B/2) * c^(-1/k).
unsigned max_allowed_load(unsigned k, unsigned choices, std::uint32_t block_bits = 512);
/// The same bound before rounding.
double max_allowed_load_exact(unsigned k, unsigned choices, std::uint32_t block_bits = 512);

class BracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OverheadSearchOptions {
  double lower = 0.7;
  double upper = 1.6;
  double tolerance = 0.01;
  std::uint64_t queries = 10'000'000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

struct OverheadProbe {
  double relative_size;
  FprEstimate estimate;
};

struct OverheadResult {
  double relative_size;  ///< smallest probed size whose FPR met the target
  std::vector<OverheadProbe> probes;
};

/// Bisection for the relative size at which the empirical FPR of `config`
/// (holding n keys) drops to target_fpr. Every probe rebuilds the filter with
/// fresh hash and key seeds. Assumes the FPR falls as the size grows; throws
/// BracketError when the target is not crossed inside [lower, upper].
OverheadResult required_overhead(const FilterConfig& config, std::uint64_t n, double target_fpr,
                                 const OverheadSearchOptions& options = {});

/// Million keys per second for building, successful and unsuccessful lookups.
struct Throughput {
  double insert_mkeys = 0;
  double hit_lookup_mkeys = 0;
  double miss_lookup_mkeys = 0;
};

/// Sequential single-thread timing of one configuration.
Throughput measure_throughput(const FilterConfig& config, std::uint64_t n, std::uint64_t queries,
                              std::uint64_t key_seed);

}  // namespace blowchoc
