// Part of the blowchoc project, under Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX short identifier: Apache-2.0

#include "blowchoc/block_array.hpp"

#include <gtest/gtest.h>

#include <cstdint>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

namespace blowchoc {
namespace {

using Addrs = std::vector<std::uint32_t>;

TEST(BlockArray, FreshArrayIsZero) {
  BlockArray one(1, 512);
  EXPECT_EQ(one.total_bits(), 512u);
  EXPECT_EQ(one.popcount_block(0), 0u);

  BlockArray three(3, 512);
  EXPECT_EQ(three.total_bits(), 1536u);
  EXPECT_EQ(three.popcount(), 0u);
  EXPECT_EQ(three.words().size(), 24u);
}

TEST(BlockArray, RejectsBadGeometry) {
  EXPECT_THROW(BlockArray(2, 0), std::invalid_argument);
  EXPECT_THROW(BlockArray(0, 512), std::invalid_argument);
  EXPECT_THROW(BlockArray(2, 100), std::invalid_argument);
}

TEST(BlockArray, StorageIsCacheLineAligned) {
  BlockArray a(5, 512);
  EXPECT_EQ(reinterpret_cast<std::uintptr_t>(a.words().data()) % kCacheLineBytes, 0u);
}

TEST(BlockArray, SetBitsCountsDistinctAddresses) {
  BlockArray a(2, 512);
  a.set_bits(0, Addrs{3, 7});
  EXPECT_EQ(a.popcount_block(0), 2u);
  a.set_bits(0, Addrs{3, 7});
  EXPECT_EQ(a.popcount_block(0), 2u);
  a.set_bits(0, Addrs{});
  EXPECT_EQ(a.popcount_block(0), 2u);
  EXPECT_EQ(a.popcount_block(1), 0u);
}

TEST(BlockArray, TestAll) {
  BlockArray a(1, 512);
  EXPECT_TRUE(a.test_all(0, Addrs{}));
  a.set_bits(0, Addrs{3, 7});
  EXPECT_TRUE(a.test_all(0, Addrs{3, 7}));
  EXPECT_FALSE(a.test_all(0, Addrs{3, 8}));
}

TEST(BlockArray, PopcountBlock) {
  BlockArray a(2, 512);
  a.set_bits(1, Addrs{5});
  EXPECT_EQ(a.popcount_block(1), 1u);
  Addrs all(512);
  for (std::uint32_t i = 0; i < 512; ++i) all[i] = i;
  a.set_bits(0, all);
  EXPECT_EQ(a.popcount_block(0), 512u);
  EXPECT_EQ(a.popcount(), 513u);
}

TEST(BlockArray, SimulateInsertionExamples) {
  BlockArray a(2, 512);
  EXPECT_EQ(a.simulate_insertion(0, Addrs{1, 2, 3, 4, 5}), (InsertionPreview{5, 5}));
  a.set_bits(1, Addrs{9, 40, 300});
  EXPECT_EQ(a.simulate_insertion(1, Addrs{9, 40, 300}), (InsertionPreview{3, 0}));

  BlockArray b(1, 512);
  b.set_bits(0, Addrs{0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
  EXPECT_EQ(b.simulate_insertion(0, Addrs{8, 9, 10}), (InsertionPreview{11, 1}));
  EXPECT_EQ(b.popcount_block(0), 10u) << "simulation must not write";
}

// (total, added) against a std::set union over random states and address
// multisets, for word-sized and sub-word blocks.
TEST(BlockArray, SimulateInsertionMatchesSetUnion) {
  std::mt19937_64 rng(7);
  for (std::uint32_t bits : {8u, 16u, 64u, 512u, 1024u}) {
    BlockArray a(3, bits);
    std::vector<std::set<std::uint32_t>> ref(3);
    for (int round = 0; round < 300; ++round) {
      const std::size_t block = rng() % 3;
      Addrs addrs(1 + rng() % 12);
      for (auto& v : addrs) v = static_cast<std::uint32_t>(rng() % bits);
      std::set<std::uint32_t> after = ref[block];
      after.insert(addrs.begin(), addrs.end());
      const InsertionPreview got = a.simulate_insertion(block, addrs);
      ASSERT_EQ(got.total, after.size());
      ASSERT_EQ(got.added, after.size() - ref[block].size());
      if (rng() % 2) {
        a.set_bits(block, addrs);
        ref[block] = after;
      }
      ASSERT_EQ(a.popcount_block(block), ref[block].size());
    }
  }
}

TEST(BlockArray, FlatAddressingMatchesBlockAddressing) {
  for (std::uint32_t bits : {16u, 512u}) {
    BlockArray a(4, bits);
    a.set_flat(bits + 3);
    EXPECT_TRUE(a.test_bit(1, 3));
    EXPECT_TRUE(a.test_flat(bits + 3));
    EXPECT_FALSE(a.test_flat(3));
    EXPECT_EQ(a.popcount(), 1u);
  }
}

TEST(BlockArray, SmallBlocksUseOneWordEach) {
  BlockArray a(3, 16);
  EXPECT_EQ(a.words_per_block(), 1u);
  a.set_bit(2, 15);
  EXPECT_EQ(a.words()[2], std::uint64_t{1} << 15);
}

TEST(BlockArray, CopyClearAndEquality) {
  BlockArray a(2, 512);
  a.set_bits(1, Addrs{100, 200});
  BlockArray b = a;
  EXPECT_TRUE(a == b);
  b.set_bit(0, 1);
  EXPECT_FALSE(a == b);
  b.clear();
  EXPECT_EQ(b.popcount(), 0u);
  EXPECT_FALSE(b == BlockArray(3, 512));
}

}  // namespace
}  // namespace blowchoc
