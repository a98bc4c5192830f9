// Part of the blowchoc project, under Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX short identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "blowchoc/hashing.hpp"

namespace blowchoc {

/// A stream of 64-bit keys read in batches.
class KeySource {
 public:
  virtual ~KeySource() = default;
  /// Fills a prefix of out and returns its length; 0 means end of stream.
  /// Throws InputError on unreadable or malformed input.
  virtual std::size_t read(std::span<std::uint64_t> out) = 0;
};

class SpanKeySource final : public KeySource {
 public:
  explicit SpanKeySource(std::span<const std::uint64_t> keys) : keys_(keys) {}
  std::size_t read(std::span<std::uint64_t> out) override;

 private:
  std::span<const std::uint64_t> keys_;
  std::size_t pos_ = 0;
};

/// Synthetic keys for experiments. Positive keys are even and negative keys
/// odd, so the two streams never overlap; within a stream, distinct indices
/// give distinct keys up to a 2^-63 collision chance.
class KeyGenerator {
 public:
  explicit KeyGenerator(std::uint64_t seed) : seed_(mix64(seed ^ 0x6a09e667f3bcc909ULL)) {}

  std::uint64_t positive(std::uint64_t i) const { return raw(i) & ~std::uint64_t{1}; }
  std::uint64_t negative(std::uint64_t i) const { return raw(i ^ kNegativeStream) | 1; }

 private:
  static constexpr std::uint64_t kNegativeStream = 0x8000000000000000ULL;
  std::uint64_t raw(std::uint64_t i) const { return mix64(seed_ + i * 0x9e3779b97f4a7c15ULL); }

  std::uint64_t seed_;
};

/// The first `count` positive (or negative) keys of a KeyGenerator.
class GeneratedKeySource final : public KeySource {
 public:
  GeneratedKeySource(KeyGenerator gen, std::uint64_t count, bool negative = false)
      : gen_(gen), count_(count), negative_(negative) {}
  std::size_t read(std::span<std::uint64_t> out) override;

 private:
  KeyGenerator gen_;
  std::uint64_t count_;
  bool negative_;
  std::uint64_t next_ = 0;
};

/// Raw 8-byte little-endian records.
class U64leKeySource final : public KeySource {
 public:
  /// "-" reads standard input.
  explicit U64leKeySource(const std::string& path);
  explicit U64leKeySource(std::istream& in) : in_(&in) {}
  std::size_t read(std::span<std::uint64_t> out) override;

 private:
  std::unique_ptr<std::ifstream> file_;
  std::istream* in_;
  std::vector<char> buffer_;
};

/// One unsigned decimal per line; blank lines are skipped.
class TextKeySource final : public KeySource {
 public:
  explicit TextKeySource(const std::string& path);
  explicit TextKeySource(std::istream& in) : in_(&in) {}
  std::size_t read(std::span<std::uint64_t> out) override;

 private:
  std::unique_ptr<std::ifstream> file_;
  std::istream* in_;
  std::string line_;
  std::uint64_t line_no_ = 0;
};

/// 2-bit DNA q-gram codes: A=0 C=1 G=2 T=3, first base most significant.
/// Lower-case bases count as their upper-case equivalents; a window with any
/// other character yields no code. With canonical set, each window yields
/// min(code, code of its reverse complement).
///
/// Feed sequence text piecewise; the window state carries across pieces
/// until reset() (call it between FASTA records).
class QGramEncoder {
 public:
  explicit QGramEncoder(unsigned q, bool canonical = true);

  unsigned q() const { return q_; }
  bool canonical() const { return canonical_; }

  void reset() {
    valid_ = 0;
    forward_ = 0;
    reverse_ = 0;
  }

  /// Appends the code of every complete valid window ending in `text`.
  void feed(std::string_view text, std::vector<std::uint64_t>& out);

  /// All codes of one standalone sequence.
  std::vector<std::uint64_t> encode(std::string_view sequence);

  /// Code of a q-length string of ACGT (no canonicalization).
  static std::uint64_t code_of(std::string_view qgram);

 private:
  unsigned q_;
  bool canonical_;
  std::uint64_t mask_;
  unsigned valid_ = 0;
  std::uint64_t forward_ = 0;
  std::uint64_t reverse_ = 0;
};

/// q-gram codes of every record of a FASTA file, in file order. Line breaks
/// inside a record do not affect the output; windows never span records.
class FastaKeySource final : public KeySource {
 public:
  FastaKeySource(const std::string& path, QGramEncoder encoder);
  FastaKeySource(std::istream& in, QGramEncoder encoder) : in_(&in), encoder_(encoder) {}
  std::size_t read(std::span<std::uint64_t> out) override;

 private:
  std::unique_ptr<std::ifstream> file_;
  std::istream* in_;
  QGramEncoder encoder_;
  std::string line_;
  std::vector<std::uint64_t> pending_;
  std::size_t pending_pos_ = 0;
  bool done_ = false;
};

enum class KeyFormat { u64le, text, fasta };
KeyFormat parse_key_format(std::string_view name);

/// Opens a key file in the given format; q and canonical apply to FASTA.
std::unique_ptr<KeySource> open_key_source(const std::string& path, KeyFormat format,
                                           unsigned q = 31, bool canonical = true);

/// Drains a source into memory.
std::vector<std::uint64_t> read_all(KeySource& source);

}  // namespace blowchoc
