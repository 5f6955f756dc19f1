#include "densedex/mips.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>

#include "densedex/error.hpp"
#include "densedex/parallel.hpp"

namespace densedex {

namespace {

struct Hit {
  double score;
  uint64_t row;
};

double dot_f64(std::span<const float> a, std::span<const float> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return s;
}

// Strict total order: higher score first, then ascending external id.
bool hit_better(const Hit& a, const Hit& b, const EmbeddingStore& store) {
  if (a.score != b.score) return a.score > b.score;
  return store.id(a.row) < store.id(b.row);
}

// Bounded-heap scan of rows [begin, end); returns up to k hits, best first.
std::vector<Hit> scan_range(std::span<const float> query, const EmbeddingStore& store,
                            uint64_t begin, uint64_t end, size_t k) {
  const auto cmp = [&store](const Hit& a, const Hit& b) { return hit_better(a, b, store); };
  std::priority_queue<Hit, std::vector<Hit>, decltype(cmp)> heap(cmp);  // top = worst kept
  for (uint64_t r = begin; r < end; ++r) {
    Hit hit{dot_f64(query, store.row(r)), r};
    if (heap.size() < k) {
      heap.push(hit);
    } else if (hit_better(hit, heap.top(), store)) {
      heap.pop();
      heap.push(hit);
    }
  }
  std::vector<Hit> out;
  out.reserve(heap.size());
  while (!heap.empty()) {
    out.push_back(heap.top());
    heap.pop();
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<Hit> search_rows(std::span<const float> query, const EmbeddingStore& store,
                             size_t k, size_t shards, size_t threads) {
  if (query.size() != store.dim()) {
    throw DataError(ErrKind::DimMismatch,
                    "query dim " + std::to_string(query.size()) + " != store dim " +
                        std::to_string(store.dim()));
  }
  if (k == 0) throw DataError(ErrKind::BadArgument, "k must be >= 1");
  if (shards == 0) throw DataError(ErrKind::BadArgument, "shards must be >= 1");
  for (const float v : query) {
    // NaN scores would break the strict ordering the heap and merge rely on
    if (!std::isfinite(v)) {
      throw DataError(ErrKind::Numeric, "query vector has a non-finite value");
    }
  }

  const uint64_t count = store.count();
  shards = std::min<size_t>(shards, std::max<uint64_t>(count, 1));
  if (shards == 1) return scan_range(query, store, 0, count, k);

  // Contiguous ranges; the first (count % shards) ranges get one extra row.
  std::vector<std::vector<Hit>> per_shard(shards);
  const uint64_t base = count / shards;
  const uint64_t extra = count % shards;
  parallel_tasks(shards, threads, [&](size_t s) {
    const uint64_t begin = s * base + std::min<uint64_t>(s, extra);
    const uint64_t end = begin + base + (s < extra ? 1 : 0);
    per_shard[s] = scan_range(query, store, begin, end, k);
  });

  std::vector<Hit> all;
  for (const auto& hits : per_shard) all.insert(all.end(), hits.begin(), hits.end());
  std::sort(all.begin(), all.end(),
            [&store](const Hit& a, const Hit& b) { return hit_better(a, b, store); });
  if (all.size() > k) all.resize(k);
  return all;
}

}  // namespace

SearchResult search_topk(std::span<const float> query, const EmbeddingStore& store,
                         size_t k) {
  const auto hits = search_rows(query, store, k, 1, 1);
  SearchResult result;
  result.entries.reserve(hits.size());
  for (const auto& h : hits) result.entries.push_back({store.id(h.row), h.score});
  return result;
}

BatchSearchOutcome batch_search(std::span<const QueryVec> queries,
                                const EmbeddingStore& store, size_t k,
                                const BatchSearchOptions& options) {
  BatchSearchOutcome outcome;
  std::vector<double> latencies_ms;
  latencies_ms.reserve(queries.size());

  for (const auto& [qid, vec] : queries) {
    if (outcome.run.has(qid)) {
      throw DataError(ErrKind::DuplicateId, "duplicate query id '" + qid + "'");
    }
    const auto start = std::chrono::steady_clock::now();
    const auto hits = search_rows(vec, store, k, options.shards, options.threads);
    const auto stop = std::chrono::steady_clock::now();
    latencies_ms.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
    for (const auto& h : hits) outcome.run.append(qid, store.id(h.row), h.score);
  }

  outcome.latency.queries = latencies_ms.size();
  if (!latencies_ms.empty()) {
    double sum = 0.0;
    for (const double v : latencies_ms) sum += v;
    outcome.latency.mean_ms = sum / static_cast<double>(latencies_ms.size());
    std::sort(latencies_ms.begin(), latencies_ms.end());
    const auto nearest_rank = [&](double pct) {
      const size_t n = latencies_ms.size();
      size_t idx = static_cast<size_t>(std::ceil(pct / 100.0 * static_cast<double>(n)));
      if (idx == 0) idx = 1;
      return latencies_ms[std::min(idx, n) - 1];
    };
    outcome.latency.p50_ms = nearest_rank(50.0);
    outcome.latency.p99_ms = nearest_rank(99.0);
  }
  return outcome;
}

}  // namespace densedex
