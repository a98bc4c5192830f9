// Part of the blowchoc project, under Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX short identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>

#include "blowchoc/filter.hpp"

namespace blowchoc {

// Filter file layout, all integers little-endian:
//
//   offset size  field
//        0    4  magic "BWCH"
//        4    4  format version (u32, currently 1)
//        8    1  kind (0 standard, 1 blocked, 2 blowchoc)
//        9    1  bit strategy (0 random, 1 distinct)
//       10    1  cost kind (0 exp, 1 mix, 2 lookahead)
//       11    1  choices c
//       12    4  k (u32)
//       16    8  cost parameter (IEEE-754 binary64)
//       24    8  block bits B
//       32    8  block count M
//       40    8  shard count T
//       48    8  seed
//       56    8  inserted key count
//       64       bit array: M blocks in index order, each as ceil(B/64) u64 words,
//                bit i of a block = bit i % 64 of word i / 64
//
// The file must end exactly after the bit array.

inline constexpr std::array<char, 4> kFilterMagic = {'B', 'W', 'C', 'H'};
inline constexpr std::uint32_t kFilterFormatVersion = 1;
inline constexpr std::size_t kFilterHeaderBytes = 64;

void write_filter(const Filter& filter, std::ostream& out);
/// Throws CorruptFilterError on any malformed input, including truncation.
Filter read_filter(std::istream& in);

/// Throws InputError if the file cannot be created or written.
void save_filter(const Filter& filter, const std::string& path);
/// Throws InputError if the file cannot be opened, CorruptFilterError if it
/// is malformed.
Filter load_filter(const std::string& path);

}  // namespace blowchoc
