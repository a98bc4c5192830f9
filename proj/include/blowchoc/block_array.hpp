// Part of the blowchoc project, under Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX short identifier: Apache-2.0

#pragma once

#include <bit>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>

namespace blowchoc {

inline constexpr std::size_t kDefaultBlockBits = 512;
inline constexpr std::size_t kCacheLineBytes = 64;

/// Result of a dry-run insertion into one block.
struct InsertionPreview {
  std::size_t total;  ///< set bits in the block after the insertion (j)
  std::size_t added;  ///< bits the insertion would newly set (a)

  friend bool operator==(const InsertionPreview&, const InsertionPreview&) = default;
};

/// A contiguous, zero-initialized array of fixed-width bit blocks.
///
/// Blocks are stored as 64-bit words; bit i of a block lives in word i / 64
/// at position i % 64 (least significant bit first). Blocks narrower than 64
/// bits occupy the low bits of a single word; they exist for exhaustive
/// tests only. The storage is 64-byte aligned, so a 512-bit block is exactly
/// one cache line.
///
/// Not synchronized. Concurrent readers are fine; a writer needs exclusive
/// access to the blocks it touches.
class BlockArray {
 public:
  /// Throws std::invalid_argument unless num_blocks >= 1 and block_bits is
  /// either a positive multiple of 64 or in [1, 63].
  explicit BlockArray(std::size_t num_blocks, std::size_t block_bits = kDefaultBlockBits);

  BlockArray(const BlockArray& other);
  BlockArray& operator=(const BlockArray& other);
  BlockArray(BlockArray&&) noexcept = default;
  BlockArray& operator=(BlockArray&&) noexcept = default;

  std::size_t num_blocks() const { return num_blocks_; }
  std::size_t block_bits() const { return block_bits_; }
  std::size_t words_per_block() const { return words_per_block_; }
  std::size_t total_bits() const { return num_blocks_ * block_bits_; }

  std::span<std::uint64_t> words() { return {words_.get(), num_blocks_ * words_per_block_}; }
  std::span<const std::uint64_t> words() const {
    return {words_.get(), num_blocks_ * words_per_block_};
  }
  std::span<std::uint64_t> block_words(std::size_t block) {
    assert(block < num_blocks_);
    return {words_.get() + block * words_per_block_, words_per_block_};
  }
  std::span<const std::uint64_t> block_words(std::size_t block) const {
    assert(block < num_blocks_);
    return {words_.get() + block * words_per_block_, words_per_block_};
  }

  void set_bit(std::size_t block, std::uint32_t bit) {
    assert(block < num_blocks_ && bit < block_bits_);
    words_[block * words_per_block_ + (bit >> 6)] |= std::uint64_t{1} << (bit & 63);
  }
  bool test_bit(std::size_t block, std::uint32_t bit) const {
    assert(block < num_blocks_ && bit < block_bits_);
    return (words_[block * words_per_block_ + (bit >> 6)] >> (bit & 63)) & 1;
  }

  void set_bits(std::size_t block, std::span<const std::uint32_t> addrs) {
    std::uint64_t* w = words_.get() + block * words_per_block_;
    assert(block < num_blocks_);
    for (std::uint32_t bit : addrs) {
      assert(bit < block_bits_);
      w[bit >> 6] |= std::uint64_t{1} << (bit & 63);
    }
  }

  /// True iff every addressed bit is set; stops at the first unset bit.
  bool test_all(std::size_t block, std::span<const std::uint32_t> addrs) const {
    const std::uint64_t* w = words_.get() + block * words_per_block_;
    assert(block < num_blocks_);
    for (std::uint32_t bit : addrs) {
      assert(bit < block_bits_);
      if (((w[bit >> 6] >> (bit & 63)) & 1) == 0) return false;
    }
    return true;
  }

  std::size_t popcount_block(std::size_t block) const {
    const std::uint64_t* w = words_.get() + block * words_per_block_;
    assert(block < num_blocks_);
    std::size_t count = 0;
    for (std::size_t i = 0; i < words_per_block_; ++i) count += std::popcount(w[i]);
    return count;
  }

  /// (j, a) for inserting addrs into the block: j = |block ∪ addrs|,
  /// a = |addrs \ block|. Leaves the block untouched.
  InsertionPreview simulate_insertion(std::size_t block,
                                      std::span<const std::uint32_t> addrs) const;

  // Addressing of the whole array as one flat bit vector, used by the
  // standard (unblocked) Bloom filter. Flat bit g is bit g % B of block g / B.
  void set_flat(std::uint64_t bit) {
    if (word_aligned_) {
      assert(bit < total_bits());
      words_[bit >> 6] |= std::uint64_t{1} << (bit & 63);
    } else {
      set_bit(bit / block_bits_, static_cast<std::uint32_t>(bit % block_bits_));
    }
  }
  bool test_flat(std::uint64_t bit) const {
    if (word_aligned_) {
      assert(bit < total_bits());
      return (words_[bit >> 6] >> (bit & 63)) & 1;
    }
    return test_bit(bit / block_bits_, static_cast<std::uint32_t>(bit % block_bits_));
  }

  void prefetch_block(std::size_t block) const {
#if defined(__GNUC__) || defined(__clang__)
    __builtin_prefetch(words_.get() + block * words_per_block_);
#else
    (void)block;
#endif
  }
  void prefetch_flat(std::uint64_t bit) const {
#if defined(__GNUC__) || defined(__clang__)
    if (word_aligned_) __builtin_prefetch(words_.get() + (bit >> 6));
#else
    (void)bit;
#endif
  }

  /// Total number of set bits.
  std::uint64_t popcount() const;

  void clear();

  friend bool operator==(const BlockArray& a, const BlockArray& b);

 private:
  struct FreeDeleter {
    void operator()(std::uint64_t* p) const noexcept;
  };

  std::size_t num_blocks_;
  std::size_t block_bits_;
  std::size_t words_per_block_;
  bool word_aligned_;
  std::unique_ptr<std::uint64_t[], FreeDeleter> words_;
};

}  // namespace blowchoc
