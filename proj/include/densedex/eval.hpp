#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "densedex/corpus_io.hpp"

namespace densedex {

struct MetricReport {
  std::string metric;   // "mrr" or "recall"
  size_t cutoff = 0;
  double value = 0.0;   // in [0, 1]
  size_t evaluated_queries = 0;
};

// Mean reciprocal rank of the first relevant document at rank <= k, over
// the qrels queries. A query with no relevant document inside the cutoff
// (or missing from the run) contributes 0; run queries absent from the
// qrels are ignored.
MetricReport mrr_at_k(const Run& run, const Qrels& qrels, size_t k = 10);

// Mean over qrels queries of |relevant in top-k| / |relevant|.
MetricReport recall_at_k(const Run& run, const Qrels& qrels, size_t k = 1000);

// recall_at_k at each depth; non-decreasing in depth.
std::vector<MetricReport> recall_curve(const Run& run, const Qrels& qrels,
                                       std::span<const size_t> depths);

}  // namespace densedex
