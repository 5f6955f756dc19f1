#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "densedex/corpus_io.hpp"
#include "densedex/embedding_store.hpp"

namespace densedex {

struct ScoredDoc {
  std::string doc_id;
  double score = 0.0;
};

// Entries ordered by (score desc, doc id asc); ties on score are broken by
// ascending id so results are deterministic and shard-order independent.
struct SearchResult {
  std::vector<ScoredDoc> entries;
};

// Exact top-k by inner product over every stored vector. Dot products are
// accumulated in 64-bit.
SearchResult search_topk(std::span<const float> query, const EmbeddingStore& store,
                         size_t k);

struct BatchSearchOptions {
  size_t shards = 1;   // document-matrix partitions, scanned and heap-merged
  size_t threads = 1;  // worker cap for the shard scans of one query
};

struct LatencyStats {
  size_t queries = 0;
  double mean_ms = 0.0;
  double p50_ms = 0.0;
  double p99_ms = 0.0;
};

struct BatchSearchOutcome {
  Run run;
  LatencyStats latency;
};

using QueryVec = std::pair<std::string, std::vector<float>>;

// Runs search_topk for every query. The resulting Run is a pure function of
// (queries, store, k): shard and thread counts never change it.
BatchSearchOutcome batch_search(std::span<const QueryVec> queries,
                                const EmbeddingStore& store, size_t k,
                                const BatchSearchOptions& options = {});

}  // namespace densedex
