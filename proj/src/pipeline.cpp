#include "densedex/pipeline.hpp"

#include <random>

#include "densedex/error.hpp"
#include "densedex/eval.hpp"
#include "densedex/parallel.hpp"
#include "densedex/rng.hpp"

namespace densedex {

namespace {

std::filesystem::path fresh_temp_dir() {
  std::random_device rd;
  const auto base = std::filesystem::temp_directory_path();
  for (int attempt = 0; attempt < 16; ++attempt) {
    const uint64_t tag = (static_cast<uint64_t>(rd()) << 32) ^ rd();
    auto dir = base / ("densedex-" + std::to_string(tag));
    std::error_code ec;
    if (std::filesystem::create_directory(dir, ec)) return dir;
  }
  throw DataError(ErrKind::Io, "cannot create temp directory under " + base.string());
}

}  // namespace

StoreBuildSummary encode_to_store(const std::filesystem::path& texts,
                                  const ToyEncoderParams& params, Role role,
                                  const std::filesystem::path& out_path, size_t threads,
                                  size_t max_len) {
  TsvCollectionReader reader(texts);
  // Chunked streaming keeps memory bounded while letting a chunk's rows
  // encode in parallel; output order stays equal to file order.
  constexpr size_t kChunk = 1024;
  std::vector<TextRecord> chunk;
  std::vector<std::vector<float>> encoded;
  size_t emit = 0;
  bool drained = false;

  const auto source = [&]() -> std::optional<VectorRecord> {
    if (emit == chunk.size()) {
      if (drained) return std::nullopt;
      chunk.clear();
      while (chunk.size() < kChunk) {
        auto rec = reader.next();
        if (!rec) {
          drained = true;
          break;
        }
        chunk.push_back(std::move(*rec));
      }
      if (chunk.empty()) return std::nullopt;
      encoded.assign(chunk.size(), {});
      parallel_tasks(chunk.size(), threads, [&](size_t i) {
        const TokenSeq seq = tokenize(chunk[i].text, role, params.vocab_size, max_len);
        const std::vector<double> emb = encode(seq, params);
        encoded[i].assign(emb.begin(), emb.end());  // f64 -> f32 store precision
      });
      emit = 0;
    }
    const size_t i = emit++;
    return VectorRecord{chunk[i].id, std::move(encoded[i])};
  };
  return build_store(source, params.dim, out_path);
}

PipelineOutcome run_pipeline(const PipelineConfig& config) {
  PipelineOutcome outcome;
  outcome.workdir_kept = !config.workdir.empty();
  outcome.workdir = config.workdir.empty() ? fresh_temp_dir() : config.workdir;
  const auto& dir = outcome.workdir;

  try {
    SynthConfig synth = config.synth;
    synth.seed = config.seed;
    synth.dim = synth.dim == 0 ? 64 : synth.dim;
    const SynthFiles files = generate_corpus(synth, dir);

    ToyEncoderParams params;
    if (config.skip_train) {
      params = init_params(config.vocab_size, synth.dim, config.seed);
    } else {
      const auto dataset = load_training_pairs(files.pairs, config.vocab_size);
      TrainConfig tc;
      tc.vocab_size = config.vocab_size;
      tc.dim = synth.dim;
      tc.batch_size = config.batch_size;
      tc.accumulation = config.accumulation;
      tc.steps = config.steps;
      tc.lr = config.lr;
      tc.seed = config.seed;
      params = train(dataset, tc).params;
    }
    save_params(params, dir / "params.denc");

    encode_to_store(files.queries, params, Role::Query, dir / "queries.ddex",
                    config.threads);
    encode_to_store(files.collection, params, Role::Document, dir / "docs.ddex",
                    config.threads);

    const EmbeddingStore doc_store = EmbeddingStore::open(dir / "docs.ddex");
    const EmbeddingStore query_store = EmbeddingStore::open(dir / "queries.ddex");
    std::vector<QueryVec> queries;
    queries.reserve(query_store.count());
    for (uint64_t i = 0; i < query_store.count(); ++i) {
      const auto row = query_store.row(i);
      queries.emplace_back(query_store.id(i), std::vector<float>(row.begin(), row.end()));
    }
    BatchSearchOptions opts;
    opts.shards = config.shards;
    opts.threads = config.threads;
    auto search = batch_search(queries, doc_store, config.k, opts);
    outcome.search_latency = search.latency;
    write_run(search.run, dir / "run.txt");

    const Qrels qrels = read_qrels(files.qrels);
    const MetricReport mrr = mrr_at_k(search.run, qrels, 10);
    const MetricReport recall = recall_at_k(search.run, qrels, std::min<size_t>(config.k, 100));

    outcome.metrics["mrr@10"] = mrr.value;
    outcome.metrics["recall@" + std::to_string(recall.cutoff)] = recall.value;
    outcome.metrics["evaluated_queries"] = mrr.evaluated_queries;
    outcome.metrics["seed"] = config.seed;
  } catch (...) {
    if (!outcome.workdir_kept) {
      std::error_code ec;
      std::filesystem::remove_all(outcome.workdir, ec);
    }
    throw;
  }
  if (!outcome.workdir_kept) {
    std::error_code ec;
    std::filesystem::remove_all(outcome.workdir, ec);
  }
  return outcome;
}

}  // namespace densedex
