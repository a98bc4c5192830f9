// Part of the blowchoc project, under Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX short identifier: Apache-2.0

#include "blowchoc/serialize.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <optional>
#include <vector>

#include "blowchoc/errors.hpp"

namespace blowchoc {

namespace {

void put_u64(char* p, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) p[i] = static_cast<char>((v >> (8 * i)) & 0xff);
}
void put_u32(char* p, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) p[i] = static_cast<char>((v >> (8 * i)) & 0xff);
}
std::uint64_t get_u64(const char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(p[i]);
  return v;
}
std::uint32_t get_u32(const char* p) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(p[i]);
  return v;
}

constexpr std::size_t kChunkWords = 1 << 13;

}  // namespace

void write_filter(const Filter& filter, std::ostream& out) {
  const FilterConfig& cfg = filter.config();
  std::array<char, kFilterHeaderBytes> header{};
  std::memcpy(header.data(), kFilterMagic.data(), 4);
  put_u32(header.data() + 4, kFilterFormatVersion);
  header[8] = static_cast<char>(cfg.kind);
  header[9] = static_cast<char>(cfg.strategy);
  header[10] = static_cast<char>(cfg.cost.kind);
  header[11] = static_cast<char>(cfg.choices);
  put_u32(header.data() + 12, cfg.k);
  put_u64(header.data() + 16, std::bit_cast<std::uint64_t>(cfg.cost.param));
  put_u64(header.data() + 24, cfg.block_bits);
  put_u64(header.data() + 32, filter.num_blocks());
  put_u64(header.data() + 40, filter.shard_plan().num_shards);
  put_u64(header.data() + 48, cfg.seed);
  put_u64(header.data() + 56, filter.inserted());
  out.write(header.data(), header.size());

  const auto words = filter.storage().words();
  std::vector<char> buf;
  for (std::size_t begin = 0; begin < words.size(); begin += kChunkWords) {
    const std::size_t n = std::min(kChunkWords, words.size() - begin);
    buf.resize(n * 8);
    for (std::size_t i = 0; i < n; ++i) put_u64(buf.data() + 8 * i, words[begin + i]);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  }
}

Filter read_filter(std::istream& in) {
  std::array<char, kFilterHeaderBytes> header{};
  in.read(header.data(), header.size());
  if (in.gcount() != static_cast<std::streamsize>(header.size())) {
    throw CorruptFilterError("truncated filter header");
  }
  if (std::memcmp(header.data(), kFilterMagic.data(), 4) != 0) {
    throw CorruptFilterError("not a filter file (bad magic)");
  }
  const std::uint32_t version = get_u32(header.data() + 4);
  if (version != kFilterFormatVersion) {
    throw CorruptFilterError("unsupported filter format version " + std::to_string(version));
  }
  const auto kind = static_cast<unsigned char>(header[8]);
  const auto strategy = static_cast<unsigned char>(header[9]);
  const auto cost_kind = static_cast<unsigned char>(header[10]);
  if (kind > 2 || strategy > 1 || cost_kind > 2) {
    throw CorruptFilterError("invalid enum field in filter header");
  }
  const std::uint64_t block_bits = get_u64(header.data() + 24);
  const std::uint64_t num_blocks = get_u64(header.data() + 32);
  const std::uint64_t shards = get_u64(header.data() + 40);
  if (block_bits == 0 || block_bits > (1u << 20) || num_blocks == 0 || shards == 0 ||
      num_blocks % shards != 0) {
    throw CorruptFilterError("inconsistent geometry in filter header");
  }

  FilterConfig cfg;
  cfg.kind = static_cast<FilterKind>(kind);
  cfg.strategy = static_cast<BitStrategy>(strategy);
  cfg.cost.kind = static_cast<CostKind>(cost_kind);
  cfg.choices = static_cast<unsigned char>(header[11]);
  cfg.k = get_u32(header.data() + 12);
  cfg.cost.param = std::bit_cast<double>(get_u64(header.data() + 16));
  cfg.block_bits = static_cast<std::uint32_t>(block_bits);
  cfg.shards = shards;
  cfg.seed = get_u64(header.data() + 48);
  cfg.size_bits = num_blocks * block_bits;
  if (cfg.size_bits / block_bits != num_blocks) throw CorruptFilterError("filter size overflows");

  // Check the payload length up front when the stream is seekable, so a
  // damaged header cannot trigger a huge allocation.
  const std::uint64_t words_per_block = block_bits < 64 ? 1 : block_bits / 64;
  const std::uint64_t payload_bytes = num_blocks * words_per_block * 8;
  if (const auto here = in.tellg(); here != std::streampos(-1)) {
    in.seekg(0, std::ios::end);
    const auto end = in.tellg();
    in.seekg(here);
    if (end != std::streampos(-1) &&
        static_cast<std::uint64_t>(end - here) != payload_bytes) {
      throw CorruptFilterError("filter file size does not match its header");
    }
  }

  std::optional<Filter> filter;
  try {
    filter.emplace(cfg);
  } catch (const std::invalid_argument& e) {
    throw CorruptFilterError(std::string("invalid filter header: ") + e.what());
  }
  if (filter->num_blocks() != num_blocks) throw CorruptFilterError("block count mismatch");
  filter->set_inserted(get_u64(header.data() + 56));

  auto words = filter->mutable_storage().words();
  std::vector<char> buf;
  for (std::size_t begin = 0; begin < words.size(); begin += kChunkWords) {
    const std::size_t n = std::min(kChunkWords, words.size() - begin);
    buf.resize(n * 8);
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() != static_cast<std::streamsize>(buf.size())) {
      throw CorruptFilterError("truncated filter bit array");
    }
    for (std::size_t i = 0; i < n; ++i) words[begin + i] = get_u64(buf.data() + 8 * i);
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw CorruptFilterError("trailing bytes after filter bit array");
  }
  // Bits beyond B in sub-64-bit blocks must be clear.
  if (block_bits < 64) {
    const std::uint64_t mask = ~((std::uint64_t{1} << block_bits) - 1);
    for (std::uint64_t w : words) {
      if (w & mask) throw CorruptFilterError("bits set outside of block width");
    }
  }
  return std::move(*filter);
}

void save_filter(const Filter& filter, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot create filter file '" + path + "'");
  write_filter(filter, out);
  out.flush();
  if (!out) throw InputError("write error on filter file '" + path + "'");
}

Filter load_filter(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open filter file '" + path + "'");
  return read_filter(in);
}

}  // namespace blowchoc
