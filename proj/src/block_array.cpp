// Part of the blowchoc project, under Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX short identifier: Apache-2.0

#include "blowchoc/block_array.hpp"

#include <array>
#include <cstdlib>
#include <cstring>
#include <new>
#include <stdexcept>
#include <string>
#include <vector>

namespace blowchoc {

namespace {

std::uint64_t* allocate_words(std::size_t count) {
  std::size_t bytes = count * sizeof(std::uint64_t);
  bytes = (bytes + kCacheLineBytes - 1) / kCacheLineBytes * kCacheLineBytes;
  void* p = std::aligned_alloc(kCacheLineBytes, bytes);
  if (p == nullptr) throw std::bad_alloc();
  std::memset(p, 0, bytes);
  return static_cast<std::uint64_t*>(p);
}

std::size_t checked_block_bits(std::size_t block_bits) {
  if (block_bits == 0 || (block_bits >= 64 && block_bits % 64 != 0)) {
    throw std::invalid_argument("block_bits must be a positive multiple of 64 (or below 64), got " +
                                std::to_string(block_bits));
  }
  return block_bits;
}

}  // namespace

void BlockArray::FreeDeleter::operator()(std::uint64_t* p) const noexcept { std::free(p); }

BlockArray::BlockArray(std::size_t num_blocks, std::size_t block_bits)
    : num_blocks_(num_blocks),
      block_bits_(checked_block_bits(block_bits)),
      words_per_block_(block_bits_ < 64 ? 1 : block_bits_ / 64),
      word_aligned_(block_bits_ % 64 == 0) {
  if (num_blocks == 0) throw std::invalid_argument("num_blocks must be at least 1");
  words_.reset(allocate_words(num_blocks_ * words_per_block_));
}

BlockArray::BlockArray(const BlockArray& other)
    : num_blocks_(other.num_blocks_),
      block_bits_(other.block_bits_),
      words_per_block_(other.words_per_block_),
      word_aligned_(other.word_aligned_),
      words_(allocate_words(other.num_blocks_ * other.words_per_block_)) {
  std::memcpy(words_.get(), other.words_.get(), words().size_bytes());
}

BlockArray& BlockArray::operator=(const BlockArray& other) {
  if (this != &other) *this = BlockArray(other);
  return *this;
}

InsertionPreview BlockArray::simulate_insertion(std::size_t block,
                                                std::span<const std::uint32_t> addrs) const {
  assert(block < num_blocks_);
  const std::uint64_t* w = words_.get() + block * words_per_block_;

  auto preview = [&](std::span<std::uint64_t> mask) {
    for (std::uint32_t bit : addrs) {
      assert(bit < block_bits_);
      mask[bit >> 6] |= std::uint64_t{1} << (bit & 63);
    }
    std::size_t before = 0;
    std::size_t after = 0;
    for (std::size_t i = 0; i < words_per_block_; ++i) {
      before += std::popcount(w[i]);
      after += std::popcount(w[i] | mask[i]);
    }
    return InsertionPreview{after, after - before};
  };

  if (words_per_block_ <= 8) {
    std::array<std::uint64_t, 8> mask{};
    return preview(std::span(mask).first(words_per_block_));
  }
  std::vector<std::uint64_t> mask(words_per_block_, 0);
  return preview(mask);
}

std::uint64_t BlockArray::popcount() const {
  std::uint64_t count = 0;
  for (std::uint64_t w : words()) count += std::popcount(w);
  return count;
}

void BlockArray::clear() { std::memset(words_.get(), 0, words().size_bytes()); }

bool operator==(const BlockArray& a, const BlockArray& b) {
  return a.num_blocks_ == b.num_blocks_ && a.block_bits_ == b.block_bits_ &&
         std::memcmp(a.words_.get(), b.words_.get(), a.words().size_bytes()) == 0;
}

}  // namespace blowchoc
