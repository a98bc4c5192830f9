// Part of the blowchoc project, under Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX short identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "blowchoc/block_array.hpp"
#include "blowchoc/cost.hpp"
#include "blowchoc/hashing.hpp"
#include "blowchoc/shard_plan.hpp"

namespace blowchoc {

enum class FilterKind : std::uint8_t { standard = 0, blocked = 1, blowchoc = 2 };

std::string_view to_string(FilterKind kind);
FilterKind parse_filter_kind(std::string_view name);
std::string_view to_string(BitStrategy strategy);
BitStrategy parse_bit_strategy(std::string_view name);

inline constexpr unsigned kMaxChoices = 8;

struct FilterConfig {
  FilterKind kind = FilterKind::blowchoc;
  std::uint64_t capacity = 0;   ///< planned number of keys n
  std::uint64_t size_bits = 0;  ///< explicit size in bits; overrides capacity sizing if nonzero
  unsigned k = 14;
  unsigned choices = 2;  ///< 1 for blocked, 2..8 for blowchoc, ignored for standard
  CostModel cost;
  BitStrategy strategy = BitStrategy::random;
  double relative_size = 1.0;
  std::uint64_t shards = 1;
  std::uint64_t seed = 0;
  std::uint32_t block_bits = 512;

  /// Throws std::invalid_argument on any inconsistent field.
  void validate() const;
};

struct FilterSize {
  std::uint64_t bits;
  std::uint64_t blocks;

  friend bool operator==(const FilterSize&, const FilterSize&) = default;
};

/// Size of a filter for n keys at k bits per key, scaled by relative_size
/// against the standard Bloom size n*k/ln 2: the block count is the bit
/// count divided by block_bits, rounded up, then rounded up to a multiple
/// of the shard count.
FilterSize size_for(std::uint64_t n, unsigned k, double relative_size = 1.0,
                    std::uint32_t block_bits = 512, std::uint64_t shards = 1);

/// Size for an explicit bit budget, rounded up the same way.
FilterSize size_for_bits(std::uint64_t bits, std::uint32_t block_bits = 512,
                         std::uint64_t shards = 1);

/// Size a config resolves to (explicit size_bits or capacity sizing).
FilterSize resolve_size(const FilterConfig& config);

/// Expected FPR (1 - 2^-gamma)^k of a standard Bloom filter holding gamma
/// times its design capacity.
double overload_fpr(double gamma, unsigned k);

/// Fixed-capacity scratch buffer that only touches the heap for large k.
template <typename T, std::size_t Inline>
class ScratchBuffer {
 public:
  void resize(std::size_t n) {
    size_ = n;
    if (n > Inline && heap_.size() < n) heap_.resize(n);
  }
  std::size_t size() const { return size_; }
  T* data() { return size_ > Inline ? heap_.data() : inline_.data(); }
  const T* data() const { return size_ > Inline ? heap_.data() : inline_.data(); }
  std::span<T> span() { return {data(), size_}; }
  std::span<const T> span() const { return {data(), size_}; }
  T& operator[](std::size_t i) { return data()[i]; }
  const T& operator[](std::size_t i) const { return data()[i]; }

 private:
  std::array<T, Inline> inline_;
  std::vector<T> heap_;
  std::size_t size_ = 0;
};

/// Every address a key touches. Blocked kinds use `blocks` (global block
/// indices of the candidates, in choice order) and `bits` (in-block
/// addresses, computed once and shared by all candidates). The standard
/// kind uses `flat` (global bit addresses) only.
struct Probe {
  std::size_t shard = 0;
  unsigned num_choices = 0;
  std::array<std::uint64_t, kMaxChoices> blocks;
  ScratchBuffer<std::uint32_t, 32> bits;
  ScratchBuffer<std::uint64_t, 32> flat;

  std::span<const std::uint64_t> candidates() const { return {blocks.data(), num_choices}; }
};

struct BlockChoice {
  std::size_t index;    ///< position in the candidate list
  bool already_present;  ///< every addressed bit is already set there; nothing to write

  friend bool operator==(const BlockChoice&, const BlockChoice&) = default;
};

/// Picks the block to insert addrs into. A single candidate is returned as
/// is. Otherwise the first candidate that already holds every address wins
/// (no write needed); failing that, the candidate with the lowest cost(j, a),
/// ties going to the lowest index.
template <typename Cost>
BlockChoice choose_block(const BlockArray& storage, std::span<const std::uint64_t> candidates,
                         std::span<const std::uint32_t> addrs, const Cost& cost) {
  if (candidates.size() == 1) return {0, false};
  std::array<InsertionPreview, kMaxChoices> previews{};
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    previews[i] = storage.simulate_insertion(candidates[i], addrs);
    if (previews[i].added == 0) return {i, true};
  }
  std::size_t best = 0;
  double best_cost = cost(previews[0].total, previews[0].added);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double c = cost(previews[i].total, previews[i].added);
    if (c < best_cost) {
      best = i;
      best_cost = c;
    }
  }
  return {best, false};
}

BlockChoice choose_block(const BlockArray& storage, std::span<const std::uint64_t> candidates,
                         std::span<const std::uint32_t> addrs, const CostModel& model, unsigned k);

/// Standard Bloom, Blocked Bloom, or Blocked Bloom with choices.
///
/// All hash functions derive from config.seed in a fixed order: the shard
/// router h0, then the block hashes h1..hc (blocked kinds), then the bit
/// address functions f1..fk. Each shard's blocks are addressed only by keys
/// routed to it.
///
/// insert and contains(key) may be mixed freely from one thread. Concurrent
/// contains calls are safe once no writer is active; concurrent writers must
/// target distinct shards (see sharded_build.hpp).
class Filter {
 public:
  explicit Filter(const FilterConfig& config);

  const FilterConfig& config() const { return config_; }
  FilterKind kind() const { return config_.kind; }
  unsigned k() const { return config_.k; }
  unsigned choices() const { return config_.choices; }
  std::uint64_t size_bits() const { return storage_.total_bits(); }
  std::uint64_t num_blocks() const { return storage_.num_blocks(); }
  std::uint32_t block_bits() const { return config_.block_bits; }
  const ShardPlan& shard_plan() const { return plan_; }
  std::span<const HashSpec> block_hashes() const { return block_hashes_; }
  const BitSelector& bit_selector() const { return selector_; }
  std::span<const HashSpec> flat_hashes() const { return flat_hashes_; }

  const BlockArray& storage() const { return storage_; }
  /// Raw access for deserialization and tests.
  BlockArray& mutable_storage() { return storage_; }

  /// Number of insert calls so far (duplicates included).
  std::uint64_t inserted() const { return inserted_; }
  void set_inserted(std::uint64_t n) { inserted_ = n; }

  std::size_t shard_of(std::uint64_t key) const { return route(plan_, key); }

  void insert(std::uint64_t key) {
    Probe p;
    fill_probe(key, p);
    insert(p);
    ++inserted_;
  }
  bool contains(std::uint64_t key) const {
    Probe p;
    fill_probe(key, p);
    return contains(p);
  }

  /// Insert for a key already routed to `shard`; touches only that shard and
  /// leaves the insert counter alone. The sharded builder's worker entry point.
  void insert_into_shard(std::size_t shard, std::uint64_t key);

  /// Computes all addresses of key and prefetches the blocks they fall in.
  void fill_probe(std::uint64_t key, Probe& probe) const;
  Probe probe(std::uint64_t key) const {
    Probe p;
    fill_probe(key, p);
    return p;
  }

  /// Insert/lookup on precomputed addresses; insert does not count.
  void insert(const Probe& probe);
  bool contains(const Probe& probe) const;
  BlockChoice choose_block(const Probe& probe) const;

  std::uint64_t popcount() const { return storage_.popcount(); }
  /// Fraction of set bits.
  double load() const;

 private:
  FilterConfig config_;
  ShardPlan plan_;
  BlockArray storage_;
  std::vector<HashSpec> block_hashes_;
  BitSelector selector_;
  std::vector<HashSpec> flat_hashes_;
  CostTable cost_table_;
  std::uint64_t inserted_ = 0;
};

}  // namespace blowchoc
