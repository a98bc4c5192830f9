// Part of the blowchoc project, under Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX short identifier: Apache-2.0

#include "blowchoc/filter.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace blowchoc {

std::string_view to_string(FilterKind kind) {
  switch (kind) {
    case FilterKind::standard:
      return "standard";
    case FilterKind::blocked:
      return "blocked";
    case FilterKind::blowchoc:
      return "blowchoc";
  }
  return "?";
}

FilterKind parse_filter_kind(std::string_view name) {
  if (name == "standard") return FilterKind::standard;
  if (name == "blocked") return FilterKind::blocked;
  if (name == "blowchoc") return FilterKind::blowchoc;
  throw std::invalid_argument("unknown filter kind '" + std::string(name) + "'");
}

std::string_view to_string(BitStrategy strategy) {
  return strategy == BitStrategy::distinct ? "distinct" : "random";
}

BitStrategy parse_bit_strategy(std::string_view name) {
  if (name == "random") return BitStrategy::random;
  if (name == "distinct") return BitStrategy::distinct;
  throw std::invalid_argument("unknown bit selection strategy '" + std::string(name) + "'");
}

void FilterConfig::validate() const {
  if (block_bits == 0 || (block_bits >= 64 && block_bits % 64 != 0)) {
    throw std::invalid_argument("block_bits must be a positive multiple of 64 (or below 64)");
  }
  if (k == 0 || k > block_bits) {
    throw std::invalid_argument("k must be in [1, " + std::to_string(block_bits) + "], got " +
                                std::to_string(k));
  }
  switch (kind) {
    case FilterKind::standard:
      if (strategy == BitStrategy::distinct) {
        throw std::invalid_argument("the distinct strategy applies to blocked kinds only");
      }
      break;
    case FilterKind::blocked:
      if (choices != 1) throw std::invalid_argument("a blocked filter has exactly one choice");
      break;
    case FilterKind::blowchoc:
      if (choices < 2 || choices > kMaxChoices) {
        throw std::invalid_argument("blowchoc choices must be in [2, " +
                                    std::to_string(kMaxChoices) + "], got " +
                                    std::to_string(choices));
      }
      break;
    default:
      throw std::invalid_argument("unknown filter kind");
  }
  if (strategy != BitStrategy::random && strategy != BitStrategy::distinct) {
    throw std::invalid_argument("unknown bit selection strategy");
  }
  cost.validate();
  if (!(relative_size > 0.0) || !std::isfinite(relative_size)) {
    throw std::invalid_argument("relative_size must be positive");
  }
  if (shards == 0) throw std::invalid_argument("shard count must be at least 1");
  if (capacity == 0 && size_bits == 0) {
    throw std::invalid_argument("either a key capacity or an explicit size is required");
  }
}

FilterSize size_for(std::uint64_t n, unsigned k, double relative_size, std::uint32_t block_bits,
                    std::uint64_t shards) {
  if (n == 0) throw std::invalid_argument("size_for: n must be at least 1");
  if (k == 0 || k > block_bits) throw std::invalid_argument("size_for: k must be in [1, B]");
  if (!(relative_size > 0.0) || !std::isfinite(relative_size)) {
    throw std::invalid_argument("size_for: relative_size must be positive");
  }
  const long double raw = static_cast<long double>(relative_size) * n * k /
                          std::numbers::ln2_v<long double>;
  const auto blocks = static_cast<std::uint64_t>(std::ceil(raw / block_bits));
  const std::uint64_t rounded = round_up_to_shards(blocks == 0 ? 1 : blocks, shards);
  return {rounded * block_bits, rounded};
}

FilterSize size_for_bits(std::uint64_t bits, std::uint32_t block_bits, std::uint64_t shards) {
  if (bits == 0) throw std::invalid_argument("size_for_bits: size must be positive");
  if (block_bits == 0) throw std::invalid_argument("size_for_bits: block_bits must be positive");
  const std::uint64_t blocks = round_up_to_shards((bits + block_bits - 1) / block_bits, shards);
  return {blocks * block_bits, blocks};
}

FilterSize resolve_size(const FilterConfig& config) {
  if (config.size_bits != 0) return size_for_bits(config.size_bits, config.block_bits, config.shards);
  return size_for(config.capacity, config.k, config.relative_size, config.block_bits,
                  config.shards);
}

double overload_fpr(double gamma, unsigned k) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("overload_fpr: gamma must be >= 0");
  if (k == 0) throw std::invalid_argument("overload_fpr: k must be at least 1");
  return std::pow(1.0 - std::exp2(-gamma), static_cast<double>(k));
}

BlockChoice choose_block(const BlockArray& storage, std::span<const std::uint64_t> candidates,
                         std::span<const std::uint32_t> addrs, const CostModel& model,
                         unsigned k) {
  const std::size_t block_bits = storage.block_bits();
  return choose_block(storage, candidates, addrs, [&](std::size_t j, std::size_t a) {
    return model(j, a, k, block_bits);
  });
}

namespace {

FilterConfig normalized(FilterConfig config) {
  config.validate();
  if (config.kind == FilterKind::standard) config.choices = 1;
  return config;
}

}  // namespace

Filter::Filter(const FilterConfig& config)
    : config_(normalized(config)),
      storage_(resolve_size(config_).blocks, config_.block_bits) {
  plan_.num_shards = config_.shards;
  plan_.blocks_per_shard = storage_.num_blocks() / config_.shards;

  HashRng rng(config_.seed);
  plan_.router = make_hash(rng, plan_.num_shards);
  if (config_.kind == FilterKind::standard) {
    const std::uint64_t shard_bits = plan_.blocks_per_shard * config_.block_bits;
    flat_hashes_.reserve(config_.k);
    for (unsigned i = 0; i < config_.k; ++i) flat_hashes_.push_back(make_hash(rng, shard_bits));
  } else {
    block_hashes_.reserve(config_.choices);
    for (unsigned i = 0; i < config_.choices; ++i) {
      block_hashes_.push_back(make_hash(rng, plan_.blocks_per_shard));
    }
    selector_ = BitSelector::make(rng, config_.strategy, config_.k, config_.block_bits);
    cost_table_ = CostTable(config_.cost, config_.k, config_.block_bits);
  }
}

void Filter::fill_probe(std::uint64_t key, Probe& probe) const {
  probe.shard = route(plan_, key);
  if (config_.kind == FilterKind::standard) {
    probe.num_choices = 0;
    probe.flat.resize(config_.k);
    const std::uint64_t base = plan_.first_block(probe.shard) * config_.block_bits;
    for (unsigned i = 0; i < config_.k; ++i) {
      const std::uint64_t bit = base + flat_hashes_[i](key);
      probe.flat[i] = bit;
      storage_.prefetch_flat(bit);
    }
    return;
  }
  const std::uint64_t base = plan_.first_block(probe.shard);
  probe.num_choices = config_.choices;
  for (unsigned i = 0; i < config_.choices; ++i) {
    probe.blocks[i] = base + block_hashes_[i](key);
    storage_.prefetch_block(probe.blocks[i]);
  }
  probe.bits.resize(config_.k);
  selector_.select(key, probe.bits.span());
}

BlockChoice Filter::choose_block(const Probe& probe) const {
  return blowchoc::choose_block(storage_, probe.candidates(), probe.bits.span(), cost_table_);
}

void Filter::insert(const Probe& probe) {
  if (config_.kind == FilterKind::standard) {
    for (std::uint64_t bit : probe.flat.span()) storage_.set_flat(bit);
    return;
  }
  const BlockChoice choice = choose_block(probe);
  if (!choice.already_present) storage_.set_bits(probe.blocks[choice.index], probe.bits.span());
}

bool Filter::contains(const Probe& probe) const {
  if (config_.kind == FilterKind::standard) {
    for (std::uint64_t bit : probe.flat.span()) {
      if (!storage_.test_flat(bit)) return false;
    }
    return true;
  }
  for (std::uint64_t block : probe.candidates()) {
    if (storage_.test_all(block, probe.bits.span())) return true;
  }
  return false;
}

void Filter::insert_into_shard(std::size_t shard, std::uint64_t key) {
  Probe p;
  fill_probe(key, p);
  assert(p.shard == shard);
  (void)shard;
  insert(p);
}

double Filter::load() const {
  return static_cast<double>(storage_.popcount()) / static_cast<double>(storage_.total_bits());
}

}  // namespace blowchoc
