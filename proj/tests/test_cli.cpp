// Part of the blowchoc project, under Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX short identifier: Apache-2.0

#include "cli.hpp"

#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "blowchoc/errors.hpp"
#include "blowchoc/key_source.hpp"
#include "blowchoc/serialize.hpp"
#include "blowchoc/sharded_build.hpp"

namespace blowchoc {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("blowchoc_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_u64le(const std::string& path, const std::vector<std::uint64_t>& keys) {
  std::ofstream out(path, std::ios::binary);
  for (std::uint64_t k : keys) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(k >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
  }
}

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> v;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) v.push_back(line);
  return v;
}

// ---------------------------------------------------------------- serialization

FilterConfig random_config(std::mt19937_64& rng) {
  FilterConfig cfg;
  cfg.kind = static_cast<FilterKind>(rng() % 3);
  cfg.block_bits = std::array<std::uint32_t, 4>{16, 64, 512, 1024}[rng() % 4];
  cfg.k = 1 + rng() % std::min<std::uint32_t>(cfg.block_bits, 20);
  cfg.choices = cfg.kind == FilterKind::blowchoc ? 2 + rng() % 7 : 1;
  cfg.strategy = cfg.kind == FilterKind::standard ? BitStrategy::random
                                                  : static_cast<BitStrategy>(rng() % 2);
  cfg.cost = std::array<CostModel, 3>{CostModel::exponential(1.5), CostModel::mixed(0.75),
                                      CostModel::lookahead(2.0)}[rng() % 3];
  cfg.capacity = 1 + rng() % 5000;
  cfg.relative_size = 0.6 + (rng() % 100) / 100.0;
  cfg.shards = 1 + rng() % 4;
  cfg.seed = rng();
  return cfg;
}

TEST(Serialization, RoundTripOverRandomConfigs) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 100; ++i) {
    const FilterConfig cfg = random_config(rng);
    Filter f(cfg);
    const KeyGenerator gen(i);
    for (std::uint64_t j = 0; j < cfg.capacity; ++j) f.insert(gen.positive(j));

    std::ostringstream a;
    write_filter(f, a);
    ASSERT_EQ(a.str().size(), kFilterHeaderBytes + f.storage().words().size() * 8);
    std::istringstream in(a.str());
    const Filter back = read_filter(in);
    std::ostringstream b;
    write_filter(back, b);
    ASSERT_EQ(a.str(), b.str()) << "config " << i;
    ASSERT_TRUE(back.storage() == f.storage());
    EXPECT_EQ(back.inserted(), f.inserted());
    for (std::uint64_t j = 0; j < 500; ++j) {
      ASSERT_EQ(back.contains(gen.negative(j)), f.contains(gen.negative(j)));
      if (j < cfg.capacity) {
        ASSERT_TRUE(back.contains(gen.positive(j)));
      }
    }
  }
}

template <typename T>
T field(const std::string& bytes, std::size_t offset) {
  T v{};
  std::memcpy(&v, bytes.data() + offset, sizeof v);
  return v;
}

TEST(Serialization, HeaderLayout) {
  FilterConfig cfg;
  cfg.kind = FilterKind::blowchoc;
  cfg.k = 14;
  cfg.choices = 3;
  cfg.strategy = BitStrategy::distinct;
  cfg.cost = CostModel::lookahead(3.5);
  cfg.capacity = 1000;
  cfg.shards = 2;
  cfg.seed = 0x1122334455667788ULL;
  Filter f(cfg);
  f.insert(5);
  std::ostringstream out;
  write_filter(f, out);
  const std::string s = out.str();
  EXPECT_EQ(s.substr(0, 4), "BWCH");
  EXPECT_EQ(field<std::uint32_t>(s, 4), 1u);
  EXPECT_EQ(field<std::uint8_t>(s, 8), 2);
  EXPECT_EQ(field<std::uint8_t>(s, 9), 1);
  EXPECT_EQ(field<std::uint8_t>(s, 10), 2);
  EXPECT_EQ(field<std::uint8_t>(s, 11), 3);
  EXPECT_EQ(field<std::uint32_t>(s, 12), 14u);
  EXPECT_EQ(field<double>(s, 16), 3.5);
  EXPECT_EQ(field<std::uint64_t>(s, 24), 512u);
  EXPECT_EQ(field<std::uint64_t>(s, 32), f.num_blocks());
  EXPECT_EQ(field<std::uint64_t>(s, 40), 2u);
  EXPECT_EQ(field<std::uint64_t>(s, 48), 0x1122334455667788ULL);
  EXPECT_EQ(field<std::uint64_t>(s, 56), 1u);
  EXPECT_EQ(s.size(), 64 + f.num_blocks() * 64);
}

std::string serialized_filter() {
  FilterConfig cfg;
  cfg.kind = FilterKind::blocked;
  cfg.k = 10;
  cfg.choices = 1;
  cfg.capacity = 500;
  Filter f(cfg);
  f.insert(1);
  std::ostringstream out;
  write_filter(f, out);
  return out.str();
}

Filter read_bytes(const std::string& bytes) {
  std::istringstream in(bytes);
  return read_filter(in);
}

TEST(Serialization, RejectsCorruptFiles) {
  const std::string good = serialized_filter();
  EXPECT_NO_THROW(read_bytes(good));

  std::string bad = good;
  bad[0] = 'X';
  EXPECT_THROW(read_bytes(bad), CorruptFilterError);
  bad = good;
  bad[4] = 2;
  EXPECT_THROW(read_bytes(bad), CorruptFilterError);
  bad = good;
  bad[8] = 7;
  EXPECT_THROW(read_bytes(bad), CorruptFilterError);
  bad = good;
  bad[12] = 0;  // k = 0
  EXPECT_THROW(read_bytes(bad), CorruptFilterError);
  EXPECT_THROW(read_bytes(good.substr(0, 30)), CorruptFilterError);
  EXPECT_THROW(read_bytes(good.substr(0, good.size() - 1)), CorruptFilterError);
  EXPECT_THROW(read_bytes(good + "x"), CorruptFilterError);
  EXPECT_THROW(read_bytes(""), CorruptFilterError);
  bad = good;
  bad[32] = 0x7f;  // absurd block count
  bad[39] = 0x7f;
  EXPECT_THROW(read_bytes(bad), CorruptFilterError);
}

// ---------------------------------------------------------------- key input

TEST(QGram, EncodingExamples) {
  QGramEncoder forward(2, false);
  EXPECT_EQ(forward.encode("AC"), std::vector<std::uint64_t>{1});
  QGramEncoder canonical(2, true);
  EXPECT_EQ(canonical.encode("AC"), std::vector<std::uint64_t>{1});
  EXPECT_EQ(QGramEncoder::code_of("GT"), 11u);
  EXPECT_EQ(canonical.encode("GT"), std::vector<std::uint64_t>{1});
  QGramEncoder three(3, true);
  EXPECT_TRUE(three.encode("ACNGT").empty());
  EXPECT_EQ(QGramEncoder(3, false).encode("acgT"), (std::vector<std::uint64_t>{6, 27}));
  EXPECT_THROW(QGramEncoder(0), std::invalid_argument);
  EXPECT_THROW(QGramEncoder(33), std::invalid_argument);
}

// Codes agree with a direct per-window computation, canonical or not.
TEST(QGram, RollingMatchesWindowedReference) {
  std::mt19937_64 rng(3);
  const std::string alphabet = "ACGTACGTACGTN";
  for (unsigned q : {1u, 5u, 31u, 32u}) {
    std::string seq;
    for (int i = 0; i < 400; ++i) seq += alphabet[rng() % alphabet.size()];
    for (bool canon : {false, true}) {
      std::vector<std::uint64_t> expected;
      for (std::size_t i = 0; i + q <= seq.size(); ++i) {
        const std::string w = seq.substr(i, q);
        if (w.find('N') != std::string::npos) continue;
        std::uint64_t code = QGramEncoder::code_of(w);
        if (canon) {
          std::string rc(w.rbegin(), w.rend());
          for (char& c : rc) c = c == 'A' ? 'T' : c == 'C' ? 'G' : c == 'G' ? 'C' : 'A';
          code = std::min(code, QGramEncoder::code_of(rc));
        }
        if (q < 32) {
          ASSERT_LT(code, std::uint64_t{1} << (2 * q));
        }
        expected.push_back(code);
      }
      QGramEncoder enc(q, canon);
      ASSERT_EQ(enc.encode(seq), expected) << "q " << q;
    }
  }
}

TEST(Fasta, LineWrappingDoesNotChangeKeys) {
  std::mt19937_64 rng(4);
  std::string seq;
  for (int i = 0; i < 3000; ++i) seq += "ACGT"[rng() % 4];
  auto fasta = [&](std::size_t width) {
    std::string text = ">chr1 test\n";
    for (std::size_t i = 0; i < 1500; i += width) text += seq.substr(i, std::min(width, 1500 - i)) + "\n";
    text += ">chr2\n";
    for (std::size_t i = 1500; i < seq.size(); i += width) {
      text += seq.substr(i, std::min(width, seq.size() - i)) + "\r\n";
    }
    return text;
  };
  auto keys = [&](const std::string& text) {
    std::istringstream in(text);
    FastaKeySource src(in, QGramEncoder(21));
    return read_all(src);
  };
  const auto reference = keys(fasta(3000));
  EXPECT_EQ(reference.size(), 2u * (1500 - 21 + 1));
  for (std::size_t width : {1u, 7u, 60u, 80u}) EXPECT_EQ(keys(fasta(width)), reference);
}

TEST(KeySources, TextAndU64le) {
  std::istringstream text("1\n 2 \n\n18446744073709551615\n");
  TextKeySource t(text);
  EXPECT_EQ(read_all(t), (std::vector<std::uint64_t>{1, 2, 18446744073709551615ull}));
  std::istringstream bad("12\nabc\n");
  TextKeySource tb(bad);
  EXPECT_THROW(read_all(tb), InputError);

  std::string raw(16, '\0');
  raw[0] = 1;
  raw[15] = static_cast<char>(0x80);
  std::istringstream bin(raw);
  U64leKeySource u(bin);
  EXPECT_EQ(read_all(u), (std::vector<std::uint64_t>{1, std::uint64_t{1} << 63}));
  std::istringstream partial(std::string(12, '\0'));
  U64leKeySource up(partial);
  EXPECT_THROW(read_all(up), InputError);
  EXPECT_THROW(open_key_source("/nonexistent/keys", KeyFormat::u64le), InputError);
}

// ---------------------------------------------------------------- commands

TEST(Cli, BuildThenQueryFindsAllKeys) {
  TempDir dir;
  std::vector<std::uint64_t> keys;
  for (std::uint64_t i = 0; i < 1000; ++i) keys.push_back(mix64(i));
  write_u64le(dir.file("keys.bin"), keys);
  for (const char* kind : {"standard", "blocked", "blowchoc"}) {
    const RunResult b = run({"build", "--kind", kind, "--k", "14", "--n", "1000", "--keys",
                             dir.file("keys.bin"), "--out", dir.file("f.bwch")});
    ASSERT_EQ(b.code, 0) << b.err;
    EXPECT_NE(b.err.find("keys_inserted"), std::string::npos);
    const RunResult q = run({"query", "--filter", dir.file("f.bwch"), "--keys", dir.file("keys.bin")});
    ASSERT_EQ(q.code, 0) << q.err;
    const auto out = lines(q.out);
    ASSERT_EQ(out.size(), 1000u);
    for (std::size_t i = 0; i < out.size(); ++i) {
      ASSERT_EQ(out[i], std::to_string(keys[i]) + "\t1");
    }
  }
}

TEST(Cli, SameInputSameBytes) {
  TempDir dir;
  std::ofstream(dir.file("keys.txt")) << "1\n2\n3\n99\n";
  for (const char* threads : {"0", "3"}) {
    for (const char* out : {"a.bwch", "b.bwch"}) {
      ASSERT_EQ(run({"build", "--n", "100", "--keys", dir.file("keys.txt"), "--format", "text",
                     "--threads", threads, "--shards", "2", "--out", dir.file(out)})
                    .code,
                0);
    }
    EXPECT_EQ(slurp(dir.file("a.bwch")), slurp(dir.file("b.bwch")));
  }
}

TEST(Cli, FastaBuildIsWrapInvariant) {
  TempDir dir;
  std::ofstream(dir.file("a.fa")) << ">s\nACGTTGCAACGGTACCATGACTGA\n";
  std::ofstream(dir.file("b.fa")) << ">s\nACGTTGCA\nACGGTACC\nATGACTGA\n";
  for (const char* name : {"a", "b"}) {
    ASSERT_EQ(run({"build", "--n", "100", "--keys", dir.file(std::string(name) + ".fa"), "--format",
                   "fasta", "--q", "5", "--out", dir.file(std::string(name) + ".bwch")})
                  .code,
              0);
  }
  EXPECT_EQ(slurp(dir.file("a.bwch")), slurp(dir.file("b.bwch")));
}

TEST(Cli, UsageErrors) {
  TempDir dir;
  std::ofstream(dir.file("keys.txt")) << "1\n";
  EXPECT_EQ(run({}).code, cli::kUsage);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kUsage);
  EXPECT_EQ(run({"build", "--k", "600", "--n", "10", "--keys", dir.file("keys.txt"), "--format",
                 "text", "--out", dir.file("f")})
                .code,
            cli::kUsage);
  EXPECT_EQ(run({"build", "--kind", "standard", "--strategy", "distinct", "--n", "10", "--keys",
                 dir.file("keys.txt"), "--format", "text", "--out", dir.file("f")})
                .code,
            cli::kUsage);
  EXPECT_EQ(run({"build", "--keys", dir.file("keys.txt"), "--out", dir.file("f")}).code,
            cli::kUsage);
  EXPECT_EQ(run({"sweep", "--variants", "blow", "--n", "10"}).code, cli::kUsage);
  EXPECT_EQ(run({"--help"}).code, cli::kOk);
}

TEST(Cli, IoAndCorruptionErrors) {
  TempDir dir;
  EXPECT_EQ(run({"build", "--n", "10", "--keys", dir.file("missing"), "--out", dir.file("f")}).code,
            cli::kIo);
  std::ofstream(dir.file("keys.txt")) << "1\nx\n";
  EXPECT_EQ(run({"build", "--n", "10", "--keys", dir.file("keys.txt"), "--format", "text", "--out",
                 dir.file("f")})
                .code,
            cli::kIo);
  EXPECT_EQ(run({"query", "--filter", dir.file("missing"), "--keys", dir.file("keys.txt")}).code,
            cli::kIo);

  std::ofstream(dir.file("ok.txt")) << "1\n2\n";
  ASSERT_EQ(run({"build", "--n", "100", "--keys", dir.file("ok.txt"), "--format", "text", "--out",
                 dir.file("f.bwch")})
                .code,
            0);
  const std::string bytes = slurp(dir.file("f.bwch"));
  std::ofstream(dir.file("cut.bwch"), std::ios::binary) << bytes.substr(0, bytes.size() - 9);
  const RunResult r = run({"query", "--filter", dir.file("cut.bwch"), "--keys", dir.file("ok.txt"),
                           "--format", "text"});
  EXPECT_EQ(r.code, cli::kCorrupt);
  EXPECT_TRUE(r.out.empty());
}

TEST(Cli, FprColumnsAndEmptyFilter) {
  TempDir dir;
  std::ofstream(dir.file("none.txt"));
  ASSERT_EQ(run({"build", "--n", "1000", "--keys", dir.file("none.txt"), "--format", "text",
                 "--out", dir.file("e.bwch")})
                .code,
            0);
  const RunResult r = run({"fpr", "--filter", dir.file("e.bwch"), "--queries", "10000"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto out = lines(r.out);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0], "kind\tk\tc\tstrategy\trel_size\tN\tW\tfpr\tlog2_fpr\tstderr");
  EXPECT_EQ(out[1], "blowchoc\t14\t2\trandom\tNA\t10000\t0\t0\tNA\t0");

  const RunResult synth = run({"fpr", "--kind", "blocked", "--k", "6", "--n", "20000",
                               "--queries", "100000", "--seed", "3"});
  ASSERT_EQ(synth.code, 0) << synth.err;
  EXPECT_EQ(lines(synth.out)[1].rfind("blocked\t6\t1\trandom\t1\t100000\t", 0), 0u);
}

TEST(Cli, HistRowsCoverEveryLoad) {
  const RunResult r = run({"hist", "--kind", "blocked", "--k", "8", "--n", "5000"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto out = lines(r.out);
  ASSERT_EQ(out.size(), 514u);
  EXPECT_EQ(out[0], "j\tcount");
  std::uint64_t blocks = 0;
  for (std::size_t i = 1; i < out.size(); ++i) blocks += std::stoull(out[i].substr(out[i].find('\t') + 1));
  EXPECT_EQ(blocks, size_for(5000, 8).blocks);
}

TEST(Cli, SweepIsReproducible) {
  const std::vector<std::string> args = {"sweep", "--n", "20000", "--k", "8", "--queries",
                                         "50000", "--rel-min", "0.9", "--rel-max", "1.1",
                                         "--rel-step", "0.1", "--seed", "5"};
  const RunResult a = run(args);
  const RunResult b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  // 3 sizes x (standard + 3 blocked variants x 2 strategies)
  EXPECT_EQ(lines(a.out).size(), 1u + 3 * 7);
}

TEST(Cli, BoundsExamples) {
  RunResult r = run({"bounds", "--max-load", "--k", "7", "--choices", "2"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(lines(r.out)[1], "7\t2\t232\t231.865");
  r = run({"bounds", "--overload", "--gamma", "1.1", "--k", "10"});
  EXPECT_EQ(lines(r.out)[1], "1.1\t10\t0.001867\t1.912");
  r = run({"bounds", "--size", "--n", "1000000", "--k", "10"});
  EXPECT_EQ(lines(r.out)[1], "1000000\t10\t1\t1\t14427136\t28178");
  r = run({"bounds"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("collision_probability"), std::string::npos);
}

TEST(Cli, BenchPrintsOneRowPerVariant) {
  const RunResult r = run({"bench", "--n", "20000", "--queries", "20000", "--variants", "blocked,blow2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines(r.out).size(), 3u);
}

}  // namespace
}  // namespace blowchoc
