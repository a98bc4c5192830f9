// Part of the blowchoc project, under Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX short identifier: Apache-2.0

#pragma once

#include <bit>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace blowchoc {

/// Random source for hash parameters. One 64-bit seed reproduces every
/// HashSpec of a filter.
using HashRng = std::mt19937_64;

/// One multiply-mod hash function x -> (a*x mod 2^64) reduced into [range).
///
/// The reduction depends on the range:
///  - odd range:        (a*x) mod range
///  - power of two 2^r: the r most significant of the key_bits low bits of a*x
///  - other even range: ((a*x) ^ ((a*x) >> key_bits/2)) mod range
class HashSpec {
 public:
  HashSpec() = default;
  /// Throws std::invalid_argument for range == 0, key_bits outside [1, 64],
  /// or a power-of-two range wider than the key.
  HashSpec(std::uint64_t multiplier, std::uint64_t range, unsigned key_bits = 64);

  std::uint64_t multiplier() const { return multiplier_; }
  std::uint64_t range() const { return range_; }
  unsigned key_bits() const { return key_bits_; }

  std::uint64_t operator()(std::uint64_t x) const {
    const std::uint64_t ax = multiplier_ * x;
    switch (reduction_) {
      case Reduction::modulo:
        return ax % range_;
      case Reduction::high_bits:
        return (ax >> shift_) & (range_ - 1);
      case Reduction::fold_modulo:
        return (ax ^ (ax >> shift_)) % range_;
      case Reduction::constant:
        break;
    }
    return 0;
  }

  friend bool operator==(const HashSpec& a, const HashSpec& b) {
    return a.multiplier_ == b.multiplier_ && a.range_ == b.range_ && a.key_bits_ == b.key_bits_;
  }

 private:
  enum class Reduction : std::uint8_t { constant, modulo, high_bits, fold_modulo };

  std::uint64_t multiplier_ = 1;
  std::uint64_t range_ = 1;
  unsigned key_bits_ = 64;
  unsigned shift_ = 0;
  Reduction reduction_ = Reduction::constant;
};

/// Draws a multiplier uniformly from the odd integers in [2^63, 2^64),
/// redrawing until it is coprime to range.
HashSpec make_hash(HashRng& rng, std::uint64_t range, unsigned key_bits = 64);

enum class BitStrategy : std::uint8_t { random = 0, distinct = 1 };

/// Maps k raw values r_i in [B - i) (0-based i) to k distinct bit addresses.
///
/// Each raw value is bumped past every already chosen address that is <= it,
/// in one ascending scan over the sorted addresses chosen so far; the result
/// is the r_i-th smallest address not yet taken. Writes the addresses to out
/// in ascending order.
void distinct_from_raw(std::span<const std::uint32_t> raw, std::span<std::uint32_t> out);

/// The k bit-address functions of a blocked filter.
class BitSelector {
 public:
  BitSelector() = default;

  /// random: k hashes into [block_bits]. distinct: k hashes into
  /// [block_bits], [block_bits - 1], ..., [block_bits - k + 1].
  static BitSelector make(HashRng& rng, BitStrategy strategy, unsigned k,
                          std::uint32_t block_bits, unsigned key_bits = 64);

  /// Builds a selector from explicit specs; checks the range pattern.
  BitSelector(BitStrategy strategy, std::uint32_t block_bits, std::vector<HashSpec> specs);

  BitStrategy strategy() const { return strategy_; }
  unsigned k() const { return static_cast<unsigned>(specs_.size()); }
  std::uint32_t block_bits() const { return block_bits_; }
  std::span<const HashSpec> specs() const { return specs_; }

  /// The raw hash values f_i(x), one per function.
  void raw(std::uint64_t x, std::span<std::uint32_t> out) const {
    assert(out.size() >= specs_.size());
    for (std::size_t i = 0; i < specs_.size(); ++i) {
      out[i] = static_cast<std::uint32_t>(specs_[i](x));
    }
  }

  /// Writes exactly k bit addresses to out. For the random strategy these are
  /// the raw values, duplicates included; for distinct they are k different
  /// addresses in ascending order.
  void select(std::uint64_t x, std::span<std::uint32_t> out) const;

 private:
  BitStrategy strategy_ = BitStrategy::random;
  std::uint32_t block_bits_ = 0;
  std::vector<HashSpec> specs_;
};

/// F(x) under the random strategy as a sorted set (1 to k elements).
std::vector<std::uint32_t> select_bits_random(const BitSelector& sel, std::uint64_t x);

/// F(x) under the distinct strategy: exactly k addresses, ascending.
std::vector<std::uint32_t> select_bits_distinct(const BitSelector& sel, std::uint64_t x);

/// Probability that k independent uniform draws from [block_bits] are not
/// all distinct. Throws std::invalid_argument unless 1 <= k <= block_bits.
double collision_probability(unsigned k, std::uint32_t block_bits = 512);

/// SplitMix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace blowchoc
