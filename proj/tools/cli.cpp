// Part of the blowchoc project, under Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX short identifier: Apache-2.0

#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "blowchoc/analysis.hpp"
#include "blowchoc/errors.hpp"
#include "blowchoc/filter.hpp"
#include "blowchoc/key_source.hpp"
#include "blowchoc/serialize.hpp"
#include "blowchoc/sharded_build.hpp"

namespace blowchoc::cli {

namespace {

std::string num(double v, int precision = 6) {
  if (std::isnan(v)) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> items;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

/// Flags shared by every command that creates a filter.
struct FilterFlags {
  std::string kind = "blowchoc";
  unsigned k = 14;
  unsigned choices = 0;  // 0: 1 for blocked, 2 for blowchoc
  std::uint64_t n = 0;
  std::uint64_t size_bits = 0;
  double relative_size = 1.0;
  std::string cost = "exp";
  std::optional<double> cost_param;
  std::string strategy = "random";
  unsigned threads = 0;
  std::uint64_t shards = 0;  // 0: max(1, threads)
  std::uint64_t seed = 1;

  void add_to(CLI::App& app, bool with_size) {
    app.add_option("--kind", kind, "standard | blocked | blowchoc")
        ->check(CLI::IsMember({"standard", "blocked", "blowchoc"}))
        ->capture_default_str();
    app.add_option("--k", k, "bit address functions per key")->capture_default_str();
    app.add_option("--choices", choices, "candidate blocks per key (blowchoc: 2..8)");
    if (with_size) {
      app.add_option("--n", n, "planned number of keys");
      app.add_option("--size-bits", size_bits, "explicit filter size in bits");
    }
    app.add_option("--relative-size", relative_size, "size relative to a standard Bloom filter")
        ->capture_default_str();
    app.add_option("--cost", cost, "exp | mix | la")
        ->check(CLI::IsMember({"exp", "mix", "la"}))
        ->capture_default_str();
    app.add_option("--cost-param", cost_param, "beta (exp), sigma (mix) or mu (la)");
    app.add_option("--strategy", strategy, "random | distinct")
        ->check(CLI::IsMember({"random", "distinct"}))
        ->capture_default_str();
    app.add_option("--threads", threads, "worker threads; 0 runs in the calling thread")
        ->capture_default_str();
    app.add_option("--shards", shards, "single-writer shards (default: max(1, threads))");
    app.add_option("--seed", seed, "seed for hash functions and synthetic keys")
        ->capture_default_str();
  }

  FilterConfig config() const {
    FilterConfig cfg;
    cfg.kind = parse_filter_kind(kind);
    cfg.k = k;
    if (choices != 0) {
      cfg.choices = choices;
    } else {
      cfg.choices = cfg.kind == FilterKind::blowchoc ? 2 : 1;
    }
    if (cfg.kind == FilterKind::standard) cfg.choices = 1;
    cfg.capacity = n;
    cfg.size_bits = size_bits;
    cfg.relative_size = relative_size;
    cfg.cost.kind = parse_cost_kind(cost);
    cfg.cost.param = cost_param.value_or(CostModel::default_param(cfg.cost.kind));
    cfg.strategy = parse_bit_strategy(strategy);
    cfg.shards = shards != 0 ? shards : std::max(1u, threads);
    cfg.seed = seed;
    cfg.validate();
    return cfg;
  }
};

struct KeyFlags {
  std::string path;
  std::string format = "u64le";
  unsigned q = 31;
  bool no_canonical = false;

  void add_to(CLI::App& app, const std::string& flag, bool required) {
    auto* opt = app.add_option(flag, path, "key file ('-' for standard input)");
    if (required) opt->required();
    app.add_option("--format", format, "u64le | text | fasta")
        ->check(CLI::IsMember({"u64le", "text", "fasta"}))
        ->capture_default_str();
    app.add_option("--q", q, "q-gram length for FASTA input")->check(CLI::Range(1, 32))
        ->capture_default_str();
    app.add_flag("--no-canonical", no_canonical, "do not canonicalize FASTA q-grams");
  }

  std::unique_ptr<KeySource> open() const {
    return open_key_source(path, parse_key_format(format), q, !no_canonical);
  }
};

void write_fpr_header(std::ostream& out) {
  out << "kind\tk\tc\tstrategy\trel_size\tN\tW\tfpr\tlog2_fpr\tstderr\n";
}

void write_fpr_row(std::ostream& out, const FilterConfig& cfg, double rel_size,
                   const FprEstimate& est) {
  out << to_string(cfg.kind) << '\t' << cfg.k << '\t' << cfg.choices << '\t'
      << to_string(cfg.strategy) << '\t' << num(rel_size, 4) << '\t' << est.queries << '\t'
      << est.false_positives << '\t' << num(est.fpr()) << '\t'
      << (est.log2_fpr() ? num(*est.log2_fpr(), 5) : std::string("NA")) << '\t'
      << num(est.std_error()) << '\n';
}

/// Relative size of a loaded filter against a standard Bloom filter for the
/// keys it holds.
double implied_relative_size(const Filter& f) {
  if (f.inserted() == 0) return std::nan("");
  return static_cast<double>(f.size_bits()) /
         (static_cast<double>(f.inserted()) * f.k() / std::log(2.0));
}

Filter synthetic_filter(const FilterConfig& cfg, std::uint64_t n, std::uint64_t key_seed,
                        unsigned threads) {
  Filter filter(cfg);
  GeneratedKeySource source(KeyGenerator(key_seed), n);
  BuildOptions opts;
  opts.threads = threads;
  insert_all(filter, source, opts);
  return filter;
}

// ---------------------------------------------------------------- build

struct BuildCommand {
  FilterFlags filter;
  KeyFlags keys;
  std::string out_path;
  bool reader_thread = false;

  void add_to(CLI::App& app) {
    filter.add_to(app, true);
    keys.add_to(app, "--keys", true);
    app.add_option("--out", out_path, "output filter file")->required();
    app.add_flag("--reader-thread", reader_thread, "read keys on a separate thread");
  }

  int run(std::ostream&, std::ostream& err) const {
    if (filter.n == 0 && filter.size_bits == 0) {
      throw std::invalid_argument("build needs --n or --size-bits");
    }
    const FilterConfig cfg = filter.config();
    const auto start = std::chrono::steady_clock::now();
    auto source = keys.open();
    Filter f(cfg);
    BuildOptions opts;
    opts.threads = filter.threads;
    opts.reader_thread = reader_thread;
    insert_all(f, *source, opts);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    save_filter(f, out_path);
    err << "keys_inserted\tload\twall_seconds\n"
        << f.inserted() << '\t' << num(f.load()) << '\t' << num(secs, 4) << '\n';
    return kOk;
  }
};

// ---------------------------------------------------------------- query

struct QueryCommand {
  std::string filter_path;
  KeyFlags keys;
  unsigned threads = 0;

  void add_to(CLI::App& app) {
    app.add_option("--filter", filter_path, "filter file")->required();
    keys.add_to(app, "--keys", true);
    app.add_option("--threads", threads, "query threads")->capture_default_str();
  }

  int run(std::ostream& out, std::ostream&) const {
    const Filter f = load_filter(filter_path);
    auto source = keys.open();
    std::vector<std::uint64_t> batch(1 << 16);
    std::vector<char> answers(batch.size());
    while (const std::size_t n = source->read(batch)) {
      auto answer_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) answers[i] = f.contains(batch[i]) ? '1' : '0';
      };
      if (threads <= 1) {
        answer_range(0, n);
      } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (n + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
          const std::size_t begin = std::min(n, t * chunk);
          pool.emplace_back(answer_range, begin, std::min(n, begin + chunk));
        }
        for (auto& th : pool) th.join();
      }
      for (std::size_t i = 0; i < n; ++i) out << batch[i] << '\t' << answers[i] << '\n';
    }
    return kOk;
  }
};

// ---------------------------------------------------------------- fpr / hist

struct FprCommand {
  FilterFlags filter;
  std::string filter_path;
  KeyFlags negatives;
  std::uint64_t queries = 1'000'000;

  void add_to(CLI::App& app) {
    filter.add_to(app, true);
    app.add_option("--filter", filter_path, "evaluate a saved filter instead of a synthetic one");
    negatives.add_to(app, "--negatives", false);
    app.add_option("--queries", queries, "number of synthetic negative queries (odd keys)")
        ->capture_default_str();
  }

  int run(std::ostream& out, std::ostream&) const {
    write_fpr_header(out);
    if (!filter_path.empty()) {
      const Filter f = load_filter(filter_path);
      FprEstimate est;
      if (!negatives.path.empty()) {
        auto source = negatives.open();
        const std::vector<std::uint64_t> keys = read_all(*source);
        if (keys.empty()) throw InputError("no negative keys in '" + negatives.path + "'");
        est = estimate_fpr(f, keys, filter.threads);
      } else {
        est = estimate_fpr(f, KeyGenerator(filter.seed), queries, filter.threads);
      }
      write_fpr_row(out, f.config(), implied_relative_size(f), est);
      return kOk;
    }
    if (filter.n == 0) throw std::invalid_argument("fpr needs --filter or --n");
    const FilterConfig cfg = filter.config();
    const Filter f = synthetic_filter(cfg, filter.n, filter.seed, filter.threads);
    const FprEstimate est = estimate_fpr(f, KeyGenerator(filter.seed), queries, filter.threads);
    write_fpr_row(out, cfg, cfg.size_bits ? implied_relative_size(f) : cfg.relative_size, est);
    return kOk;
  }
};

struct HistCommand {
  FilterFlags filter;
  std::string filter_path;

  void add_to(CLI::App& app) {
    filter.add_to(app, true);
    app.add_option("--filter", filter_path, "histogram of a saved filter");
  }

  int run(std::ostream& out, std::ostream& err) const {
    std::optional<Filter> f;
    if (!filter_path.empty()) {
      f.emplace(load_filter(filter_path));
    } else {
      if (filter.n == 0) throw std::invalid_argument("hist needs --filter or --n");
      f.emplace(synthetic_filter(filter.config(), filter.n, filter.seed, filter.threads));
    }
    const LoadHistogram hist = block_load_histogram(*f);
    out << "j\tcount\n";
    for (std::size_t j = 0; j < hist.counts.size(); ++j) out << j << '\t' << hist.counts[j] << '\n';
    err << "blocks\tmean_load\tvariance\n"
        << hist.num_blocks() << '\t' << num(hist.mean()) << '\t' << num(hist.variance()) << '\n';
    return kOk;
  }
};

// ---------------------------------------------------------------- sweep

struct Variant {
  FilterKind kind;
  unsigned choices;
};

Variant parse_variant(const std::string& name) {
  if (name == "standard") return {FilterKind::standard, 1};
  if (name == "blocked") return {FilterKind::blocked, 1};
  if (name.rfind("blow", 0) == 0 && name.size() > 4) {
    unsigned c = 0;
    const auto [end, ec] = std::from_chars(name.data() + 4, name.data() + name.size(), c);
    if (ec == std::errc() && end == name.data() + name.size()) return {FilterKind::blowchoc, c};
  }
  throw std::invalid_argument("unknown variant '" + name + "' (standard, blocked, blowN)");
}

struct SweepCommand {
  FilterFlags filter;
  std::string variants = "standard,blocked,blow2,blow3";
  std::string strategies = "random,distinct";
  double rel_min = 0.8;
  double rel_max = 1.2;
  double rel_step = 0.05;
  std::uint64_t queries = 1'000'000;

  void add_to(CLI::App& app) {
    filter.add_to(app, true);
    app.add_option("--variants", variants, "comma list of standard, blocked, blowN")
        ->capture_default_str();
    app.add_option("--strategies", strategies, "comma list of random, distinct")
        ->capture_default_str();
    app.add_option("--rel-min", rel_min)->capture_default_str();
    app.add_option("--rel-max", rel_max)->capture_default_str();
    app.add_option("--rel-step", rel_step)->capture_default_str();
    app.add_option("--queries", queries)->capture_default_str();
  }

  int run(std::ostream& out, std::ostream&) const {
    if (filter.n == 0) throw std::invalid_argument("sweep needs --n");
    if (!(rel_step > 0.0) || !(rel_max >= rel_min) || !(rel_min > 0.0)) {
      throw std::invalid_argument("sweep needs 0 < rel-min <= rel-max and rel-step > 0");
    }
    FilterFlags base = filter;
    base.choices = 0;
    base.kind = "blowchoc";
    const FilterConfig base_cfg = base.config();

    std::vector<Variant> parsed;
    for (const auto& v : split_list(variants)) parsed.push_back(parse_variant(v));
    std::vector<BitStrategy> strats;
    for (const auto& s : split_list(strategies)) strats.push_back(parse_bit_strategy(s));

    const auto steps = static_cast<std::uint64_t>(std::floor((rel_max - rel_min) / rel_step + 1e-9));
    write_fpr_header(out);
    std::uint64_t row = 0;
    for (std::uint64_t i = 0; i <= steps; ++i) {
      const double rel = rel_min + static_cast<double>(i) * rel_step;
      for (const Variant& v : parsed) {
        for (BitStrategy s : strats) {
          if (v.kind == FilterKind::standard && s == BitStrategy::distinct) continue;
          FilterConfig cfg = base_cfg;
          cfg.kind = v.kind;
          cfg.choices = v.choices;
          cfg.strategy = s;
          cfg.capacity = filter.n;
          cfg.size_bits = 0;
          cfg.relative_size = rel;
          cfg.seed = mix64(filter.seed + 0x9e3779b97f4a7c15ULL * ++row);
          const FprEstimate est =
              measure_fpr(cfg, filter.n, queries, mix64(cfg.seed ^ 0xd1b54a32d192ed03ULL),
                          filter.threads);
          write_fpr_row(out, cfg, rel, est);
        }
      }
    }
    return kOk;
  }
};

// ---------------------------------------------------------------- bounds

struct BoundsCommand {
  bool max_load = false;
  bool collision = false;
  bool overload = false;
  bool size = false;
  std::optional<unsigned> k;
  std::optional<unsigned> choices;
  std::optional<double> gamma;
  std::uint32_t block_bits = 512;
  std::uint64_t n = 1'000'000;
  double relative_size = 1.0;
  std::uint64_t shards = 1;

  void add_to(CLI::App& app) {
    app.add_flag("--max-load", max_load, "max set bits per block for FPR 2^-k / c");
    app.add_flag("--collision", collision, "probability of a bit address collision");
    app.add_flag("--overload", overload, "FPR (1 - 2^-gamma)^k of an overloaded Bloom filter");
    app.add_flag("--size", size, "filter size for n keys");
    app.add_option("--k", k);
    app.add_option("--choices", choices);
    app.add_option("--gamma", gamma);
    app.add_option("--block-bits", block_bits)->capture_default_str();
    app.add_option("--n", n)->capture_default_str();
    app.add_option("--relative-size", relative_size)->capture_default_str();
    app.add_option("--shards", shards)->capture_default_str();
  }

  int run(std::ostream& out, std::ostream&) const {
    const bool all = !max_load && !collision && !overload && !size;
    bool first = true;
    auto section = [&] {
      if (!first) out << '\n';
      first = false;
    };
    if (max_load || all) {
      section();
      out << "k\tc\tmax_load\tbound\n";
      const std::vector<unsigned> ks = k ? std::vector<unsigned>{*k} : range(3, 20);
      const std::vector<unsigned> cs = choices ? std::vector<unsigned>{*choices} : range(1, 4);
      for (unsigned kk : ks) {
        for (unsigned c : cs) {
          out << kk << '\t' << c << '\t' << max_allowed_load(kk, c, block_bits) << '\t'
              << num(max_allowed_load_exact(kk, c, block_bits)) << '\n';
        }
      }
    }
    if (collision || all) {
      section();
      out << "k\tB\tcollision_probability\n";
      for (unsigned kk : k ? std::vector<unsigned>{*k} : range(1, 20)) {
        out << kk << '\t' << block_bits << '\t' << num(collision_probability(kk, block_bits))
            << '\n';
      }
    }
    if (overload || all) {
      section();
      out << "gamma\tk\tfpr\tfpr_over_target\n";
      const unsigned kk = k.value_or(10);
      std::vector<double> gammas;
      if (gamma) {
        gammas.push_back(*gamma);
      } else {
        for (int i = 5; i <= 20; ++i) gammas.push_back(i / 10.0);
      }
      for (double g : gammas) {
        const double fpr = overload_fpr(g, kk);
        out << num(g, 4) << '\t' << kk << '\t' << num(fpr, 4) << '\t'
            << num(fpr / std::exp2(-static_cast<double>(kk)), 4) << '\n';
      }
    }
    if (size || all) {
      section();
      const unsigned kk = k.value_or(14);
      const FilterSize s = size_for(n, kk, relative_size, block_bits, shards);
      out << "n\tk\trel_size\tshards\tm\tM\n"
          << n << '\t' << kk << '\t' << num(relative_size, 4) << '\t' << shards << '\t' << s.bits
          << '\t' << s.blocks << '\n';
    }
    return kOk;
  }

  static std::vector<unsigned> range(unsigned lo, unsigned hi) {
    std::vector<unsigned> v;
    for (unsigned i = lo; i <= hi; ++i) v.push_back(i);
    return v;
  }
};

// ---------------------------------------------------------------- bench

struct BenchCommand {
  unsigned k = 14;
  std::uint64_t n = 1'000'000;
  std::uint64_t queries = 1'000'000;
  std::string variants = "standard,blocked,blow2,blow3";
  std::string strategy = "random";
  std::uint64_t seed = 1;

  void add_to(CLI::App& app) {
    app.add_option("--k", k)->capture_default_str();
    app.add_option("--n", n)->capture_default_str();
    app.add_option("--queries", queries)->capture_default_str();
    app.add_option("--variants", variants)->capture_default_str();
    app.add_option("--strategy", strategy)
        ->check(CLI::IsMember({"random", "distinct"}))
        ->capture_default_str();
    app.add_option("--seed", seed)->capture_default_str();
  }

  int run(std::ostream& out, std::ostream&) const {
    out << "variant\tstrategy\tk\tinsert_mkeys\thit_lookup_mkeys\tmiss_lookup_mkeys\n";
    for (const auto& name : split_list(variants)) {
      const Variant v = parse_variant(name);
      FilterConfig cfg;
      cfg.kind = v.kind;
      cfg.choices = v.choices;
      cfg.k = k;
      cfg.capacity = n;
      cfg.seed = seed;
      cfg.strategy = v.kind == FilterKind::standard ? BitStrategy::random
                                                    : parse_bit_strategy(strategy);
      const Throughput t = measure_throughput(cfg, n, queries, seed);
      out << name << '\t' << to_string(cfg.strategy) << '\t' << k << '\t' << num(t.insert_mkeys, 4)
          << '\t' << num(t.hit_lookup_mkeys, 4) << '\t' << num(t.miss_lookup_mkeys, 4) << '\n';
    }
    return kOk;
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bloom, Blocked Bloom and BlowChoc filters"};
  app.name("blowchoc");
  app.require_subcommand(1);

  BuildCommand build;
  QueryCommand query;
  FprCommand fpr;
  HistCommand hist;
  SweepCommand sweep;
  BoundsCommand bounds;
  BenchCommand bench;
  auto* build_app = app.add_subcommand("build", "build a filter from a key file");
  auto* query_app = app.add_subcommand("query", "look up keys in a filter file");
  auto* fpr_app = app.add_subcommand("fpr", "empirical false positive rate");
  auto* hist_app = app.add_subcommand("hist", "histogram of set bits per block");
  auto* sweep_app = app.add_subcommand("sweep", "FPR over a grid of relative sizes");
  auto* bounds_app = app.add_subcommand("bounds", "analytic tables");
  auto* bench_app = app.add_subcommand("bench", "single-thread throughput");
  build.add_to(*build_app);
  query.add_to(*query_app);
  fpr.add_to(*fpr_app);
  hist.add_to(*hist_app);
  sweep.add_to(*sweep_app);
  bounds.add_to(*bounds_app);
  bench.add_to(*bench_app);

  std::vector<const char*> argv{"blowchoc"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (build_app->parsed()) return build.run(out, err);
    if (query_app->parsed()) return query.run(out, err);
    if (fpr_app->parsed()) return fpr.run(out, err);
    if (hist_app->parsed()) return hist.run(out, err);
    if (sweep_app->parsed()) return sweep.run(out, err);
    if (bounds_app->parsed()) return bounds.run(out, err);
    if (bench_app->parsed()) return bench.run(out, err);
  } catch (const CorruptFilterError& e) {
    err << "error: corrupt filter: " << e.what() << '\n';
    return kCorrupt;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace blowchoc::cli
