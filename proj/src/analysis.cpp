// Part of the blowchoc project, under Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX short identifier: Apache-2.0

#include "blowchoc/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <thread>

#include "blowchoc/sharded_build.hpp"

namespace blowchoc {

double FprEstimate::std_error() const {
  if (queries == 0) return 0.0;
  const double p = fpr();
  return std::sqrt(p * (1.0 - p) / static_cast<double>(queries));
}

std::optional<double> FprEstimate::log2_fpr() const {
  if (false_positives == 0) return std::nullopt;
  return std::log2(fpr());
}

std::optional<double> FprEstimate::log2_std_error() const {
  if (false_positives == 0) return std::nullopt;
  return std_error() / (fpr() * std::numbers::ln2);
}

namespace {

template <typename KeyAt>
std::uint64_t count_positives(const Filter& filter, std::uint64_t begin, std::uint64_t end,
                              const KeyAt& key_at) {
  std::uint64_t hits = 0;
  Probe probe;
  for (std::uint64_t i = begin; i < end; ++i) {
    filter.fill_probe(key_at(i), probe);
    hits += filter.contains(probe) ? 1 : 0;
  }
  return hits;
}

template <typename KeyAt>
FprEstimate parallel_count(const Filter& filter, std::uint64_t n, unsigned threads,
                           const KeyAt& key_at) {
  if (n == 0) throw std::invalid_argument("estimate_fpr needs at least one query");
  FprEstimate est{n, 0};
  if (threads <= 1) {
    est.false_positives = count_positives(filter, 0, n, key_at);
    return est;
  }
  std::vector<std::uint64_t> hits(threads, 0);
  std::vector<std::thread> pool;
  const std::uint64_t chunk = (n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::uint64_t begin = std::min<std::uint64_t>(n, t * chunk);
    const std::uint64_t end = std::min<std::uint64_t>(n, begin + chunk);
    pool.emplace_back([&, t, begin, end] { hits[t] = count_positives(filter, begin, end, key_at); });
  }
  for (auto& th : pool) th.join();
  for (std::uint64_t h : hits) est.false_positives += h;
  return est;
}

}  // namespace

FprEstimate estimate_fpr(const Filter& filter, const KeyGenerator& negatives,
                         std::uint64_t queries, unsigned threads) {
  return parallel_count(filter, queries, threads,
                        [&](std::uint64_t i) { return negatives.negative(i); });
}

FprEstimate estimate_fpr(const Filter& filter, std::span<const std::uint64_t> negatives,
                         unsigned threads) {
  return parallel_count(filter, negatives.size(), threads,
                        [&](std::uint64_t i) { return negatives[i]; });
}

FprEstimate measure_fpr(const FilterConfig& config, std::uint64_t inserted, std::uint64_t queries,
                        std::uint64_t key_seed, unsigned threads) {
  Filter filter(config);
  const KeyGenerator keys(key_seed);
  GeneratedKeySource source(keys, inserted);
  insert_all(filter, source);
  return estimate_fpr(filter, keys, queries, threads);
}

std::uint64_t LoadHistogram::num_blocks() const {
  std::uint64_t n = 0;
  for (std::uint64_t c : counts) n += c;
  return n;
}

std::uint64_t LoadHistogram::total_set_bits() const {
  std::uint64_t total = 0;
  for (std::size_t j = 0; j < counts.size(); ++j) total += j * counts[j];
  return total;
}

double LoadHistogram::mean() const {
  const std::uint64_t n = num_blocks();
  return n == 0 ? 0.0 : static_cast<double>(total_set_bits()) / static_cast<double>(n);
}

double LoadHistogram::variance() const {
  const std::uint64_t n = num_blocks();
  if (n == 0) return 0.0;
  const double mu = mean();
  double sum = 0.0;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    const double d = static_cast<double>(j) - mu;
    sum += d * d * static_cast<double>(counts[j]);
  }
  return sum / static_cast<double>(n);
}

LoadHistogram block_load_histogram(const Filter& filter) {
  const BlockArray& storage = filter.storage();
  LoadHistogram hist;
  hist.counts.assign(storage.block_bits() + 1, 0);
  for (std::size_t b = 0; b < storage.num_blocks(); ++b) ++hist.counts[storage.popcount_block(b)];
  return hist;
}

double max_allowed_load_exact(unsigned k, unsigned choices, std::uint32_t block_bits) {
  if (k == 0 || choices == 0) throw std::invalid_argument("max_allowed_load needs k, c >= 1");
  return block_bits / 2.0 * std::pow(static_cast<double>(choices), -1.0 / k);
}

unsigned max_allowed_load(unsigned k, unsigned choices, std::uint32_t block_bits) {
  return static_cast<unsigned>(std::lround(max_allowed_load_exact(k, choices, block_bits)));
}

OverheadResult required_overhead(const FilterConfig& config, std::uint64_t n, double target_fpr,
                                 const OverheadSearchOptions& options) {
  if (!(options.lower > 0.0) || !(options.upper > options.lower) || !(options.tolerance > 0.0)) {
    throw std::invalid_argument("required_overhead: bad search interval");
  }
  OverheadResult result{0.0, {}};
  std::uint64_t probe_index = 0;
  auto probe = [&](double rel) {
    FilterConfig c = config;
    c.capacity = n;
    c.size_bits = 0;
    c.relative_size = rel;
    c.seed = mix64(options.seed ^ (0x5851f42d4c957f2dULL * ++probe_index));
    const std::uint64_t key_seed = mix64(c.seed + 0x14057b7ef767814fULL);
    const FprEstimate est = measure_fpr(c, n, options.queries, key_seed, options.threads);
    result.probes.push_back({rel, est});
    return est.fpr() <= target_fpr;
  };

  double lo = options.lower;
  double hi = options.upper;
  if (!probe(hi)) {
    throw BracketError("FPR stays above the target up to relative size " + std::to_string(hi));
  }
  if (probe(lo)) {
    throw BracketError("FPR is already below the target at relative size " + std::to_string(lo));
  }
  while (hi - lo > options.tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (probe(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  result.relative_size = hi;
  return result;
}

Throughput measure_throughput(const FilterConfig& config, std::uint64_t n, std::uint64_t queries,
                              std::uint64_t key_seed) {
  using Clock = std::chrono::steady_clock;
  const KeyGenerator keys(key_seed);
  std::vector<std::uint64_t> positives(n);
  for (std::uint64_t i = 0; i < n; ++i) positives[i] = keys.positive(i);
  std::vector<std::uint64_t> negatives(queries);
  for (std::uint64_t i = 0; i < queries; ++i) negatives[i] = keys.negative(i);

  auto mkeys = [](std::uint64_t count, Clock::duration d) {
    const double secs = std::chrono::duration<double>(d).count();
    return secs > 0 ? static_cast<double>(count) / secs / 1e6 : 0.0;
  };

  Filter filter(config);
  Throughput t;
  auto start = Clock::now();
  for (std::uint64_t key : positives) filter.insert(key);
  t.insert_mkeys = mkeys(n, Clock::now() - start);

  std::uint64_t sink = 0;
  start = Clock::now();
  for (std::uint64_t key : positives) sink += filter.contains(key);
  t.hit_lookup_mkeys = mkeys(n, Clock::now() - start);

  start = Clock::now();
  for (std::uint64_t key : negatives) sink += filter.contains(key);
  t.miss_lookup_mkeys = mkeys(queries, Clock::now() - start);
  if (sink == 0 && n > 0) throw std::logic_error("inserted keys not found");
  return t;
}

}  // namespace blowchoc
