// Part of the blowchoc project, under Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX short identifier: Apache-2.0

#include "blowchoc/hashing.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace blowchoc {

HashSpec::HashSpec(std::uint64_t multiplier, std::uint64_t range, unsigned key_bits)
    : multiplier_(multiplier), range_(range), key_bits_(key_bits) {
  if (range == 0) throw std::invalid_argument("hash range must be at least 1");
  if (key_bits == 0 || key_bits > 64) {
    throw std::invalid_argument("key_bits must be in [1, 64], got " + std::to_string(key_bits));
  }
  if (range == 1) {
    reduction_ = Reduction::constant;
  } else if (range % 2 == 1) {
    reduction_ = Reduction::modulo;
  } else if (std::has_single_bit(range)) {
    const auto log2_range = static_cast<unsigned>(std::countr_zero(range));
    if (log2_range > key_bits) {
      throw std::invalid_argument("power-of-two range exceeds the key width");
    }
    reduction_ = Reduction::high_bits;
    shift_ = key_bits - log2_range;
  } else {
    reduction_ = Reduction::fold_modulo;
    shift_ = key_bits / 2;
  }
}

HashSpec make_hash(HashRng& rng, std::uint64_t range, unsigned key_bits) {
  if (range == 0) throw std::invalid_argument("hash range must be at least 1");
  constexpr std::uint64_t kHighBit = std::uint64_t{1} << 63;
  std::uint64_t a = 0;
  do {
    a = rng() | kHighBit | 1;
  } while (std::gcd(a, range) != 1);
  return HashSpec(a, range, key_bits);
}

void distinct_from_raw(std::span<const std::uint32_t> raw, std::span<std::uint32_t> out) {
  assert(out.size() >= raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    std::uint32_t value = raw[i];
    std::size_t pos = 0;
    // out[0..i) is sorted; every chosen address <= value pushes value up by one.
    while (pos < i && out[pos] <= value) {
      ++value;
      ++pos;
    }
    for (std::size_t j = i; j > pos; --j) out[j] = out[j - 1];
    out[pos] = value;
  }
}

BitSelector::BitSelector(BitStrategy strategy, std::uint32_t block_bits,
                         std::vector<HashSpec> specs)
    : strategy_(strategy), block_bits_(block_bits), specs_(std::move(specs)) {
  if (specs_.empty() || specs_.size() > block_bits_) {
    throw std::invalid_argument("bit selector needs 1 <= k <= block_bits functions");
  }
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    const std::uint64_t expected =
        strategy_ == BitStrategy::distinct ? block_bits_ - i : block_bits_;
    if (specs_[i].range() != expected) {
      throw std::invalid_argument("bit address function " + std::to_string(i) +
                                  " has range " + std::to_string(specs_[i].range()) +
                                  ", expected " + std::to_string(expected));
    }
  }
}

BitSelector BitSelector::make(HashRng& rng, BitStrategy strategy, unsigned k,
                              std::uint32_t block_bits, unsigned key_bits) {
  if (k == 0 || k > block_bits) {
    throw std::invalid_argument("k must be in [1, block_bits]");
  }
  std::vector<HashSpec> specs;
  specs.reserve(k);
  for (unsigned i = 0; i < k; ++i) {
    const std::uint64_t range = strategy == BitStrategy::distinct ? block_bits - i : block_bits;
    specs.push_back(make_hash(rng, range, key_bits));
  }
  return BitSelector(strategy, block_bits, std::move(specs));
}

void BitSelector::select(std::uint64_t x, std::span<std::uint32_t> out) const {
  const std::size_t k = specs_.size();
  assert(out.size() >= k);
  if (strategy_ == BitStrategy::random) {
    raw(x, out);
    return;
  }
  // Same ascending bump-and-insert as distinct_from_raw, fused with hashing.
  for (std::size_t i = 0; i < k; ++i) {
    auto value = static_cast<std::uint32_t>(specs_[i](x));
    std::size_t pos = 0;
    while (pos < i && out[pos] <= value) {
      ++value;
      ++pos;
    }
    for (std::size_t j = i; j > pos; --j) out[j] = out[j - 1];
    out[pos] = value;
  }
}

std::vector<std::uint32_t> select_bits_random(const BitSelector& sel, std::uint64_t x) {
  if (sel.strategy() != BitStrategy::random) {
    throw std::invalid_argument("select_bits_random needs a random-strategy selector");
  }
  std::vector<std::uint32_t> bits(sel.k());
  sel.raw(x, bits);
  std::sort(bits.begin(), bits.end());
  bits.erase(std::unique(bits.begin(), bits.end()), bits.end());
  return bits;
}

std::vector<std::uint32_t> select_bits_distinct(const BitSelector& sel, std::uint64_t x) {
  if (sel.strategy() != BitStrategy::distinct) {
    throw std::invalid_argument("select_bits_distinct needs a distinct-strategy selector");
  }
  std::vector<std::uint32_t> raw(sel.k());
  sel.raw(x, raw);
  std::vector<std::uint32_t> bits(sel.k());
  distinct_from_raw(raw, bits);
  return bits;
}

double collision_probability(unsigned k, std::uint32_t block_bits) {
  if (k == 0 || k > block_bits) {
    throw std::invalid_argument("collision_probability needs 1 <= k <= block_bits");
  }
  double all_distinct = 1.0;
  for (unsigned i = 0; i < k; ++i) {
    all_distinct *= static_cast<double>(block_bits - i) / block_bits;
  }
  return 1.0 - all_distinct;
}

}  // namespace blowchoc
