// densedex: dense first-stage retrieval at desk scale.
//
// Pipeline subcommands: synth -> train-toy -> encode -> index -> search ->
// eval, plus fuse / consistency diagnostics and a search benchmark.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "densedex/binio.hpp"
#include "densedex/corpus_io.hpp"
#include "densedex/embedding_store.hpp"
#include "densedex/error.hpp"
#include "densedex/eval.hpp"
#include "densedex/fusion.hpp"
#include "densedex/mips.hpp"
#include "densedex/parallel.hpp"
#include "densedex/pipeline.hpp"
#include "densedex/rng.hpp"
#include "densedex/synth.hpp"
#include "densedex/toy_encoder.hpp"
#include "densedex/trainer.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace densedex;

struct GlobalOpts {
  uint64_t seed = 1;
  size_t threads = 0;  // 0 = all cores
  bool verbose = false;

  size_t resolved_threads() const {
    return threads == 0 ? default_thread_count() : threads;
  }
};

void log_verbose(const GlobalOpts& g, const std::string& msg) {
  if (g.verbose) std::cerr << "[densedex] " << msg << "\n";
}

json latency_json(const LatencyStats& lat, size_t k, size_t shards, size_t threads) {
  json j;
  j["queries"] = lat.queries;
  j["k"] = k;
  j["shards"] = shards;
  j["threads"] = threads;
  j["mean_ms"] = lat.mean_ms;
  j["p50_ms"] = lat.p50_ms;
  j["p99_ms"] = lat.p99_ms;
  return j;
}

// `id<TAB>v1 v2 ...` rows, one vector per line.
std::vector<QueryVec> read_vector_tsv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(ErrKind::Io, "cannot open " + path.string());
  const std::string label = path.filename().string();
  std::vector<QueryVec> out;
  std::unordered_set<std::string> seen;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto err = [&](const std::string& what) {
      return DataError(ErrKind::Parse, label + ":" + std::to_string(line_no) + ": " + what);
    };
    const size_t tab = line.find('\t');
    if (tab == std::string::npos) throw err("expected id<TAB>values");
    std::string id = line.substr(0, tab);
    if (id.empty()) throw err("empty id");
    if (!seen.insert(id).second) {
      throw DataError(ErrKind::DuplicateId,
                      label + ":" + std::to_string(line_no) + ": duplicate id '" + id + "'");
    }
    std::vector<float> values;
    size_t i = tab + 1;
    while (i < line.size()) {
      while (i < line.size() && line[i] == ' ') ++i;
      if (i >= line.size()) break;
      size_t end = i;
      while (end < line.size() && line[end] != ' ') ++end;
      float v = 0.0f;
      const auto [ptr, ec] = std::from_chars(line.data() + i, line.data() + end, v);
      if (ec != std::errc() || ptr != line.data() + end) {
        throw err("invalid float '" + line.substr(i, end - i) + "'");
      }
      values.push_back(v);
      i = end;
    }
    if (values.empty()) throw err("no vector values");
    out.emplace_back(std::move(id), std::move(values));
  }
  return out;
}

bool has_store_magic(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(ErrKind::Io, "cannot open " + path.string());
  char magic[4] = {};
  in.read(magic, 4);
  return in.gcount() == 4 && magic[0] == 'D' && magic[1] == 'D' && magic[2] == 'E' &&
         magic[3] == 'X';
}

std::vector<QueryVec> load_queries(const std::filesystem::path& path) {
  if (has_store_magic(path)) {
    const EmbeddingStore store = EmbeddingStore::open(path);
    std::vector<QueryVec> out;
    out.reserve(store.count());
    for (uint64_t i = 0; i < store.count(); ++i) {
      const auto row = store.row(i);
      out.emplace_back(store.id(i), std::vector<float>(row.begin(), row.end()));
    }
    return out;
  }
  return read_vector_tsv(path);
}

Role parse_role(const std::string& role) {
  if (role == "query") return Role::Query;
  if (role == "doc" || role == "document") return Role::Document;
  throw DataError(ErrKind::BadArgument, "role must be 'query' or 'doc', got '" + role + "'");
}

std::vector<size_t> parse_size_list(const std::string& csv, const char* what) {
  std::vector<size_t> out;
  size_t start = 0;
  while (start <= csv.size()) {
    const size_t comma = csv.find(',', start);
    const std::string item =
        csv.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!item.empty()) {
      size_t v = 0;
      const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
      if (ec != std::errc() || ptr != item.data() + item.size() || v == 0) {
        throw DataError(ErrKind::BadArgument,
                        std::string("invalid ") + what + " '" + item + "'");
      }
      out.push_back(v);
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw DataError(ErrKind::BadArgument, std::string("empty ") + what);
  return out;
}

struct MetricSpec {
  std::string name;  // mrr | recall
  size_t cutoff;
};

std::vector<MetricSpec> parse_metric_specs(const std::string& csv) {
  std::vector<MetricSpec> out;
  size_t start = 0;
  while (start <= csv.size()) {
    const size_t comma = csv.find(',', start);
    const std::string item =
        csv.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!item.empty()) {
      const size_t at = item.find('@');
      if (at == std::string::npos) {
        throw DataError(ErrKind::BadArgument, "metric must look like name@k: '" + item + "'");
      }
      MetricSpec spec;
      spec.name = item.substr(0, at);
      if (spec.name != "mrr" && spec.name != "recall") {
        throw DataError(ErrKind::BadArgument, "unknown metric '" + spec.name + "'");
      }
      const std::string k = item.substr(at + 1);
      const auto [ptr, ec] = std::from_chars(k.data(), k.data() + k.size(), spec.cutoff);
      if (ec != std::errc() || ptr != k.data() + k.size() || spec.cutoff == 0) {
        throw DataError(ErrKind::BadArgument, "invalid cutoff in '" + item + "'");
      }
      out.push_back(spec);
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw DataError(ErrKind::BadArgument, "no metrics requested");
  return out;
}

// ---- subcommand handlers ----

struct SynthOpts {
  size_t queries = 50;
  size_t docs = 500;
  uint32_t dim = 64;
  std::string out_dir;
};

int run_synth(const GlobalOpts& g, const SynthOpts& o) {
  SynthConfig cfg{o.queries, o.docs, o.dim, g.seed};
  const SynthFiles files = generate_corpus(cfg, o.out_dir);
  json j;
  j["collection"] = files.collection.string();
  j["queries_file"] = files.queries.string();
  j["qrels"] = files.qrels.string();
  j["pairs"] = files.pairs.string();
  j["num_queries"] = o.queries;
  j["num_docs"] = o.docs;
  j["dim"] = o.dim;
  j["seed"] = g.seed;
  std::cout << j.dump(2) << "\n";
  return 0;
}

struct TrainOpts {
  std::string pairs;
  std::string qrels;
  std::string out;
  std::string loss_out;
  uint32_t dim = 64;
  uint32_t vocab = 65536;
  size_t batch = 26;
  size_t accum = 2;
  size_t steps = 0;
  size_t warmup = 0;
  double lr = 5.0;
  bool use_triple_negative = false;
};

int run_train(const GlobalOpts& g, const TrainOpts& o) {
  const auto dataset = load_training_pairs(o.pairs, o.vocab, o.use_triple_negative);
  Qrels qrels;
  TrainConfig cfg;
  cfg.vocab_size = o.vocab;
  cfg.dim = o.dim;
  cfg.batch_size = o.batch;
  cfg.accumulation = o.accum;
  cfg.steps = o.steps;
  cfg.lr = o.lr;
  cfg.warmup_steps = o.warmup;
  cfg.seed = g.seed;
  cfg.use_triple_negative = o.use_triple_negative;
  if (!o.qrels.empty()) {
    qrels = read_qrels(o.qrels);
    cfg.qrels = &qrels;
  }
  log_verbose(g, "training on " + std::to_string(dataset.size()) + " pairs");
  const TrainResult result = train(dataset, cfg);
  save_params(result.params, o.out);

  const auto write_curve = [&](std::ostream& os) {
    os << "step,loss\n";
    for (size_t i = 0; i < result.loss_curve.size(); ++i) {
      char buf[48];
      std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", i + 1, result.loss_curve[i]);
      os << buf;
    }
  };
  if (o.loss_out.empty()) {
    write_curve(std::cout);
  } else {
    binio::AtomicFile file(o.loss_out);
    write_curve(file.out());
    file.commit();
  }
  log_verbose(g, "final loss " + std::to_string(result.loss_curve.back()));
  return 0;
}

struct EncodeOpts {
  std::string params;
  std::string input;
  std::string role = "doc";
  std::string out;
  size_t max_len = 0;
};

int run_encode(const GlobalOpts& g, const EncodeOpts& o) {
  const ToyEncoderParams params = load_params(o.params);
  const auto summary = encode_to_store(o.input, params, parse_role(o.role), o.out,
                                       g.resolved_threads(), o.max_len);
  log_verbose(g, "encoded " + std::to_string(summary.count) + " texts -> " + o.out);
  return 0;
}

struct IndexOpts {
  std::string input;
  std::string out;
  uint32_t dim = 0;  // 0 = infer from the first row
};

int run_index(const GlobalOpts& g, const IndexOpts& o) {
  const auto records = read_vector_tsv(o.input);
  if (records.empty() && o.dim == 0) {
    throw DataError(ErrKind::BadArgument, "empty input needs an explicit --dim");
  }
  const uint32_t dim = o.dim != 0 ? o.dim : static_cast<uint32_t>(records.front().second.size());
  size_t next = 0;
  const auto summary = build_store(
      [&]() -> std::optional<VectorRecord> {
        if (next == records.size()) return std::nullopt;
        const auto& r = records[next++];
        return VectorRecord{r.first, r.second};
      },
      dim, o.out);
  log_verbose(g, "indexed " + std::to_string(summary.count) + " vectors (" +
                     std::to_string(summary.bytes) + " bytes)");
  return 0;
}

struct SearchOpts {
  std::string store;
  std::string queries;
  std::string out;
  std::string tag = "densedex";
  size_t k = 1000;
  size_t shards = 1;
  bool trec = false;
};

int run_search(const GlobalOpts& g, const SearchOpts& o) {
  const EmbeddingStore store = EmbeddingStore::open(o.store);
  const auto queries = load_queries(o.queries);
  BatchSearchOptions opts;
  opts.shards = o.shards;
  opts.threads = g.resolved_threads();
  const auto outcome = batch_search(queries, store, o.k, opts);
  write_run(outcome.run, o.out, o.trec ? RunFormat::Trec : RunFormat::MsMarco, o.tag);
  std::cerr << latency_json(outcome.latency, o.k, o.shards, opts.threads).dump() << "\n";
  return 0;
}

struct EvalOpts {
  std::string run;
  std::string qrels;
  std::string metrics = "mrr@10,recall@1000";
  bool as_json = false;
};

int run_eval(const GlobalOpts&, const EvalOpts& o) {
  const Run run = read_run(o.run);
  const Qrels qrels = read_qrels(o.qrels);
  const auto specs = parse_metric_specs(o.metrics);

  json j;
  size_t evaluated = 0;
  for (const auto& spec : specs) {
    const MetricReport report = spec.name == "mrr" ? mrr_at_k(run, qrels, spec.cutoff)
                                                   : recall_at_k(run, qrels, spec.cutoff);
    evaluated = report.evaluated_queries;
    const std::string key = spec.name + "@" + std::to_string(spec.cutoff);
    if (o.as_json) {
      j[key] = report.value;
    } else {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%-12s %.3f", key.c_str(), report.value);
      std::cout << buf << "  (" << report.evaluated_queries << " queries)\n";
    }
  }
  if (o.as_json) {
    j["evaluated_queries"] = evaluated;
    std::cout << j.dump(2) << "\n";
  }
  return 0;
}

struct FuseOpts {
  std::string a;
  std::string b;
  std::string out;
  std::string tag = "densedex";
  size_t depth_in = 1000;
  size_t depth_out = 1000;
  bool trec = false;
};

int run_fuse(const GlobalOpts&, const FuseOpts& o) {
  const Run run_a = read_run(o.a);
  const Run run_b = read_run(o.b);
  const Run fused = fuse_runs(run_a, run_b, FusionConfig{o.depth_in, o.depth_out});
  write_run(fused, o.out, o.trec ? RunFormat::Trec : RunFormat::MsMarco, o.tag);
  return 0;
}

struct ConsistencyOpts {
  std::string run;
  std::string ref;
  std::string depths = "10,50,100,500,1000";
  size_t ref_depth = 1000;
  bool as_json = false;
};

int run_consistency(const GlobalOpts&, const ConsistencyOpts& o) {
  const Run run_f = read_run(o.run);
  const Run run_ref = read_run(o.ref);
  const auto depths = parse_size_list(o.depths, "depth");
  json j;
  for (const size_t n : depths) {
    const double c = consistency_factor(run_f, run_ref, n, o.ref_depth);
    if (o.as_json) {
      j[std::to_string(n)] = c;
    } else {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "C@%-6zu %.3f", n, c);
      std::cout << buf << "\n";
    }
  }
  if (o.as_json) std::cout << j.dump(2) << "\n";
  return 0;
}

struct PipelineOpts {
  size_t queries = 50;
  size_t docs = 500;
  uint32_t dim = 64;
  uint32_t vocab = 65536;
  size_t batch = 26;
  size_t accum = 2;
  size_t steps = 2000;
  double lr = 5.0;
  size_t k = 100;
  size_t shards = 1;
  std::string workdir;
  bool skip_train = false;
};

int run_pipeline_cmd(const GlobalOpts& g, const PipelineOpts& o) {
  PipelineConfig cfg;
  cfg.synth = SynthConfig{o.queries, o.docs, o.dim, g.seed};
  cfg.vocab_size = o.vocab;
  cfg.batch_size = o.batch;
  cfg.accumulation = o.accum;
  cfg.steps = o.steps;
  cfg.lr = o.lr;
  cfg.seed = g.seed;
  cfg.k = o.k;
  cfg.shards = o.shards;
  cfg.threads = g.resolved_threads();
  cfg.skip_train = o.skip_train;
  cfg.workdir = o.workdir;
  const PipelineOutcome outcome = run_pipeline(cfg);
  std::cerr << latency_json(outcome.search_latency, o.k, o.shards, cfg.threads).dump()
            << "\n";
  if (outcome.workdir_kept) log_verbose(g, "artifacts in " + outcome.workdir.string());
  std::cout << outcome.metrics.dump(2) << "\n";
  return 0;
}

struct BenchOpts {
  size_t docs = 100000;
  uint32_t dim = 128;
  size_t k = 1000;
  size_t queries = 100;
  size_t shards = 0;  // 0 = one per thread
};

int run_bench(const GlobalOpts& g, const BenchOpts& o) {
  const size_t threads = g.resolved_threads();
  const size_t shards = o.shards == 0 ? threads : o.shards;
  std::mt19937_64 rng(g.seed);

  const auto dir = std::filesystem::temp_directory_path();
  const auto store_path =
      dir / ("densedex-bench-" + std::to_string(rng()) + ".ddex");
  uint64_t made = 0;
  build_store(
      [&]() -> std::optional<VectorRecord> {
        if (made == o.docs) return std::nullopt;
        std::vector<float> v(o.dim);
        for (auto& x : v) x = static_cast<float>(uniform_in(rng, -1.0, 1.0));
        return VectorRecord{"d" + std::to_string(made++), std::move(v)};
      },
      o.dim, store_path);

  json report;
  try {
    const EmbeddingStore store = EmbeddingStore::open(store_path);
    std::vector<QueryVec> queries;
    queries.reserve(o.queries);
    for (size_t q = 0; q < o.queries; ++q) {
      std::vector<float> v(o.dim);
      for (auto& x : v) x = static_cast<float>(uniform_in(rng, -1.0, 1.0));
      queries.emplace_back("q" + std::to_string(q), std::move(v));
    }
    BatchSearchOptions opts;
    opts.shards = shards;
    opts.threads = threads;
    const auto outcome = batch_search(queries, store, o.k, opts);
    report["docs"] = o.docs;
    report["dim"] = o.dim;
    report["latency"] = latency_json(outcome.latency, o.k, shards, threads);
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(store_path, ec);
    throw;
  }
  std::error_code ec;
  std::filesystem::remove(store_path, ec);
  std::cout << report.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"densedex: dense first-stage retrieval toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOpts g;
  app.add_option("--seed", g.seed, "global random seed")->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads (0 = all cores)")
      ->envname("DENSEDEX_THREADS")
      ->capture_default_str();
  app.add_flag("-v,--verbose", g.verbose, "log progress to stderr");

  SynthOpts synth_o;
  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  synth->add_option("--queries", synth_o.queries)->capture_default_str();
  synth->add_option("--docs", synth_o.docs)->capture_default_str();
  synth->add_option("--dim", synth_o.dim)->capture_default_str();
  synth->add_option("--out-dir", synth_o.out_dir)->required();

  TrainOpts train_o;
  auto* train_cmd = app.add_subcommand("train-toy", "train the toy encoder");
  train_cmd->add_option("--pairs", train_o.pairs)->required();
  train_cmd->add_option("--qrels", train_o.qrels, "cross-pair positive judgments");
  train_cmd->add_option("--dim", train_o.dim)->capture_default_str();
  train_cmd->add_option("--vocab", train_o.vocab)->capture_default_str();
  train_cmd->add_option("--batch", train_o.batch)->capture_default_str();
  train_cmd->add_option("--accum", train_o.accum)->capture_default_str();
  train_cmd->add_option("--steps", train_o.steps)->required();
  train_cmd->add_option("--warmup", train_o.warmup, "warmup steps (0 = steps/35)");
  train_cmd->add_option("--lr", train_o.lr)->capture_default_str();
  train_cmd->add_flag("--use-triple-negative", train_o.use_triple_negative,
                      "pairs file carries a hard negative per row");
  train_cmd->add_option("--out", train_o.out)->required();
  train_cmd->add_option("--loss-out", train_o.loss_out, "loss curve CSV (default stdout)");

  EncodeOpts encode_o;
  auto* encode_cmd = app.add_subcommand("encode", "encode texts into a vector store");
  encode_cmd->add_option("--params", encode_o.params)->required();
  encode_cmd->add_option("--input", encode_o.input)->required();
  encode_cmd->add_option("--role", encode_o.role, "query|doc")
      ->check(CLI::IsMember({"query", "doc", "document"}))
      ->capture_default_str();
  encode_cmd->add_option("--max-len", encode_o.max_len, "token cap (0 = role default)");
  encode_cmd->add_option("--out", encode_o.out)->required();

  IndexOpts index_o;
  auto* index_cmd = app.add_subcommand("index", "build a store from vector TSV");
  index_cmd->add_option("--input", index_o.input)->required();
  index_cmd->add_option("--dim", index_o.dim, "vector dim (0 = infer)");
  index_cmd->add_option("--out", index_o.out)->required();

  SearchOpts search_o;
  auto* search_cmd = app.add_subcommand("search", "exact top-k inner-product search");
  search_cmd->add_option("--store", search_o.store)->required();
  search_cmd->add_option("--queries", search_o.queries, "query store or vector TSV")->required();
  search_cmd->add_option("--k", search_o.k)->capture_default_str();
  search_cmd->add_option("--shards", search_o.shards)->capture_default_str();
  search_cmd->add_option("--out", search_o.out)->required();
  search_cmd->add_flag("--trec", search_o.trec, "write 6-column TREC lines");
  search_cmd->add_option("--tag", search_o.tag)->capture_default_str();

  EvalOpts eval_o;
  auto* eval_cmd = app.add_subcommand("eval", "score a run against qrels");
  eval_cmd->add_option("--run", eval_o.run)->required();
  eval_cmd->add_option("--qrels", eval_o.qrels)->required();
  eval_cmd->add_option("--metrics", eval_o.metrics)->capture_default_str();
  eval_cmd->add_flag("--json", eval_o.as_json, "full-precision JSON output");

  FuseOpts fuse_o;
  auto* fuse_cmd = app.add_subcommand("fuse", "alternating merge of two runs");
  fuse_cmd->add_option("--a", fuse_o.a)->required();
  fuse_cmd->add_option("--b", fuse_o.b)->required();
  fuse_cmd->add_option("--depth-in", fuse_o.depth_in)->capture_default_str();
  fuse_cmd->add_option("--depth-out", fuse_o.depth_out)->capture_default_str();
  fuse_cmd->add_option("--out", fuse_o.out)->required();
  fuse_cmd->add_flag("--trec", fuse_o.trec);
  fuse_cmd->add_option("--tag", fuse_o.tag)->capture_default_str();

  ConsistencyOpts cons_o;
  auto* cons_cmd = app.add_subcommand("consistency", "overlap with a reference run");
  cons_cmd->add_option("--run", cons_o.run)->required();
  cons_cmd->add_option("--ref", cons_o.ref)->required();
  cons_cmd->add_option("--n", cons_o.depths, "comma-separated depths")->capture_default_str();
  cons_cmd->add_option("--ref-depth", cons_o.ref_depth)->capture_default_str();
  cons_cmd->add_flag("--json", cons_o.as_json);

  PipelineOpts pipe_o;
  auto* pipe_cmd = app.add_subcommand("pipeline", "synth + train + index + search + eval");
  pipe_cmd->add_option("--queries", pipe_o.queries)->capture_default_str();
  pipe_cmd->add_option("--docs", pipe_o.docs)->capture_default_str();
  pipe_cmd->add_option("--dim", pipe_o.dim)->capture_default_str();
  pipe_cmd->add_option("--vocab", pipe_o.vocab)->capture_default_str();
  pipe_cmd->add_option("--batch", pipe_o.batch)->capture_default_str();
  pipe_cmd->add_option("--accum", pipe_o.accum)->capture_default_str();
  pipe_cmd->add_option("--steps", pipe_o.steps)->capture_default_str();
  pipe_cmd->add_option("--lr", pipe_o.lr)->capture_default_str();
  pipe_cmd->add_option("--k", pipe_o.k)->capture_default_str();
  pipe_cmd->add_option("--shards", pipe_o.shards)->capture_default_str();
  pipe_cmd->add_option("--workdir", pipe_o.workdir, "keep artifacts here");
  pipe_cmd->add_flag("--skip-train", pipe_o.skip_train, "random params, no training");

  BenchOpts bench_o;
  auto* bench_cmd = app.add_subcommand("bench", "brute-force search latency report");
  bench_cmd->add_option("--docs", bench_o.docs)->capture_default_str();
  bench_cmd->add_option("--dim", bench_o.dim)->capture_default_str();
  bench_cmd->add_option("--k", bench_o.k)->capture_default_str();
  bench_cmd->add_option("--queries", bench_o.queries)->capture_default_str();
  bench_cmd->add_option("--shards", bench_o.shards, "0 = one per thread");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (*synth) return run_synth(g, synth_o);
    if (*train_cmd) return run_train(g, train_o);
    if (*encode_cmd) return run_encode(g, encode_o);
    if (*index_cmd) return run_index(g, index_o);
    if (*search_cmd) return run_search(g, search_o);
    if (*eval_cmd) return run_eval(g, eval_o);
    if (*fuse_cmd) return run_fuse(g, fuse_o);
    if (*cons_cmd) return run_consistency(g, cons_o);
    if (*pipe_cmd) return run_pipeline_cmd(g, pipe_o);
    if (*bench_cmd) return run_bench(g, bench_o);
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
