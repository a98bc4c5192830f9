// Part of the blowchoc project, under Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX short identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>

#include "blowchoc/hashing.hpp"

namespace blowchoc {

/// Partition of a filter's blocks into T contiguous single-writer shards.
/// Shard s owns blocks [s * blocks_per_shard, (s + 1) * blocks_per_shard).
struct ShardPlan {
  std::uint64_t num_shards = 1;
  std::uint64_t blocks_per_shard = 1;
  HashSpec router;  ///< h0, range num_shards

  std::uint64_t num_blocks() const { return num_shards * blocks_per_shard; }
  std::uint64_t first_block(std::size_t shard) const { return shard * blocks_per_shard; }
};

/// Shard that owns key x.
inline std::size_t route(const ShardPlan& plan, std::uint64_t x) {
  return static_cast<std::size_t>(plan.router(x));
}

/// Rounds num_blocks up to a multiple of num_shards (both >= 1).
std::uint64_t round_up_to_shards(std::uint64_t num_blocks, std::uint64_t num_shards);

}  // namespace blowchoc
