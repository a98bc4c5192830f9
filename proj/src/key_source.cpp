// Part of the blowchoc project, under Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX short identifier: Apache-2.0

#include "blowchoc/key_source.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <iostream>
#include <stdexcept>

#include "blowchoc/errors.hpp"

namespace blowchoc {

namespace {

std::unique_ptr<std::ifstream> open_file(const std::string& path, bool binary) {
  auto mode = binary ? std::ios::in | std::ios::binary : std::ios::in;
  auto file = std::make_unique<std::ifstream>(path, mode);
  if (!*file) throw InputError("cannot open key file '" + path + "'");
  return file;
}

constexpr std::array<std::int8_t, 256> make_base_codes() {
  std::array<std::int8_t, 256> codes{};
  for (auto& c : codes) c = -1;
  codes['A'] = codes['a'] = 0;
  codes['C'] = codes['c'] = 1;
  codes['G'] = codes['g'] = 2;
  codes['T'] = codes['t'] = 3;
  return codes;
}

constexpr auto kBaseCodes = make_base_codes();

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

}  // namespace

std::size_t SpanKeySource::read(std::span<std::uint64_t> out) {
  const std::size_t n = std::min(out.size(), keys_.size() - pos_);
  std::copy_n(keys_.begin() + static_cast<std::ptrdiff_t>(pos_), n, out.begin());
  pos_ += n;
  return n;
}

std::size_t GeneratedKeySource::read(std::span<std::uint64_t> out) {
  const std::uint64_t n = std::min<std::uint64_t>(out.size(), count_ - next_);
  for (std::uint64_t i = 0; i < n; ++i) {
    out[i] = negative_ ? gen_.negative(next_ + i) : gen_.positive(next_ + i);
  }
  next_ += n;
  return static_cast<std::size_t>(n);
}

U64leKeySource::U64leKeySource(const std::string& path) {
  if (path == "-") {
    in_ = &std::cin;
  } else {
    file_ = open_file(path, true);
    in_ = file_.get();
  }
}

std::size_t U64leKeySource::read(std::span<std::uint64_t> out) {
  buffer_.resize(out.size() * 8);
  in_->read(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
  const auto got = static_cast<std::size_t>(in_->gcount());
  if (in_->bad()) throw InputError("read error in u64le key stream");
  if (got % 8 != 0) throw InputError("u64le key stream ends inside a record");
  const std::size_t n = got / 8;
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t v = 0;
    for (int b = 7; b >= 0; --b) {
      v = (v << 8) | static_cast<unsigned char>(buffer_[i * 8 + static_cast<std::size_t>(b)]);
    }
    out[i] = v;
  }
  return n;
}

TextKeySource::TextKeySource(const std::string& path) {
  if (path == "-") {
    in_ = &std::cin;
  } else {
    file_ = open_file(path, false);
    in_ = file_.get();
  }
}

std::size_t TextKeySource::read(std::span<std::uint64_t> out) {
  std::size_t n = 0;
  while (n < out.size() && std::getline(*in_, line_)) {
    ++line_no_;
    const std::string_view s = trim(line_);
    if (s.empty()) continue;
    std::uint64_t v = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size()) {
      throw InputError("line " + std::to_string(line_no_) + ": not an unsigned 64-bit integer: '" +
                       std::string(s) + "'");
    }
    out[n++] = v;
  }
  if (in_->bad()) throw InputError("read error in text key stream");
  return n;
}

QGramEncoder::QGramEncoder(unsigned q, bool canonical)
    : q_(q), canonical_(canonical), mask_(q >= 32 ? ~std::uint64_t{0} : (std::uint64_t{1} << (2 * q)) - 1) {
  if (q == 0 || q > 32) throw std::invalid_argument("q must be in [1, 32]");
}

void QGramEncoder::feed(std::string_view text, std::vector<std::uint64_t>& out) {
  const unsigned top_shift = 2 * (q_ - 1);
  for (char ch : text) {
    const int base = kBaseCodes[static_cast<unsigned char>(ch)];
    if (base < 0) {
      reset();
      continue;
    }
    const auto b = static_cast<std::uint64_t>(base);
    forward_ = ((forward_ << 2) | b) & mask_;
    reverse_ = (reverse_ >> 2) | ((3 - b) << top_shift);
    if (valid_ < q_) ++valid_;
    if (valid_ == q_) out.push_back(canonical_ ? std::min(forward_, reverse_) : forward_);
  }
}

std::vector<std::uint64_t> QGramEncoder::encode(std::string_view sequence) {
  std::vector<std::uint64_t> out;
  reset();
  feed(sequence, out);
  reset();
  return out;
}

std::uint64_t QGramEncoder::code_of(std::string_view qgram) {
  if (qgram.empty() || qgram.size() > 32) throw std::invalid_argument("q-gram length must be in [1, 32]");
  std::uint64_t code = 0;
  for (char ch : qgram) {
    const int base = kBaseCodes[static_cast<unsigned char>(ch)];
    if (base < 0) throw std::invalid_argument("q-gram contains a non-ACGT character");
    code = (code << 2) | static_cast<std::uint64_t>(base);
  }
  return code;
}

FastaKeySource::FastaKeySource(const std::string& path, QGramEncoder encoder)
    : encoder_(encoder) {
  if (path == "-") {
    in_ = &std::cin;
  } else {
    file_ = open_file(path, false);
    in_ = file_.get();
  }
}

std::size_t FastaKeySource::read(std::span<std::uint64_t> out) {
  std::size_t n = 0;
  while (n < out.size()) {
    if (pending_pos_ < pending_.size()) {
      const std::size_t take = std::min(out.size() - n, pending_.size() - pending_pos_);
      std::copy_n(pending_.begin() + static_cast<std::ptrdiff_t>(pending_pos_), take,
                  out.begin() + static_cast<std::ptrdiff_t>(n));
      pending_pos_ += take;
      n += take;
      continue;
    }
    if (done_) break;
    pending_.clear();
    pending_pos_ = 0;
    if (!std::getline(*in_, line_)) {
      if (in_->bad()) throw InputError("read error in FASTA stream");
      done_ = true;
      break;
    }
    if (!line_.empty() && line_.front() == '>') {
      encoder_.reset();
      continue;
    }
    encoder_.feed(trim(line_), pending_);
  }
  return n;
}

KeyFormat parse_key_format(std::string_view name) {
  if (name == "u64le") return KeyFormat::u64le;
  if (name == "text") return KeyFormat::text;
  if (name == "fasta") return KeyFormat::fasta;
  throw std::invalid_argument("unknown key format '" + std::string(name) + "'");
}

std::unique_ptr<KeySource> open_key_source(const std::string& path, KeyFormat format, unsigned q,
                                           bool canonical) {
  switch (format) {
    case KeyFormat::u64le:
      return std::make_unique<U64leKeySource>(path);
    case KeyFormat::text:
      return std::make_unique<TextKeySource>(path);
    case KeyFormat::fasta:
      return std::make_unique<FastaKeySource>(path, QGramEncoder(q, canonical));
  }
  throw std::invalid_argument("unknown key format");
}

std::vector<std::uint64_t> read_all(KeySource& source) {
  std::vector<std::uint64_t> keys;
  std::array<std::uint64_t, 4096> batch;
  while (const std::size_t n = source.read(batch)) keys.insert(keys.end(), batch.begin(), batch.begin() + static_cast<std::ptrdiff_t>(n));
  return keys;
}

}  // namespace blowchoc
