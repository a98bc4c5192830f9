// Part of the blowchoc project, under Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX short identifier: Apache-2.0

#include "blowchoc/shard_plan.hpp"

#include <stdexcept>

namespace blowchoc {

std::uint64_t round_up_to_shards(std::uint64_t num_blocks, std::uint64_t num_shards) {
  if (num_shards == 0) throw std::invalid_argument("shard count must be at least 1");
  return (num_blocks + num_shards - 1) / num_shards * num_shards;
}

}  // namespace blowchoc
