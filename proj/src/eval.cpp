#include "densedex/eval.hpp"

#include <algorithm>

#include "densedex/error.hpp"

namespace densedex {

namespace {

void check_args(const Qrels& qrels, size_t k) {
  if (qrels.empty()) throw DataError(ErrKind::Empty, "qrels has no positive judgments");
  if (k == 0) throw DataError(ErrKind::BadArgument, "cutoff must be >= 1");
}

}  // namespace

MetricReport mrr_at_k(const Run& run, const Qrels& qrels, size_t k) {
  check_args(qrels, k);
  double sum = 0.0;
  for (const auto& [qid, relevant] : qrels.all()) {
    const auto* list = run.list(qid);
    if (list == nullptr) continue;  // counts as 0
    const size_t depth = std::min<size_t>(k, list->size());
    for (size_t i = 0; i < depth; ++i) {
      if (relevant.count((*list)[i].doc_id) > 0) {
        sum += 1.0 / static_cast<double>((*list)[i].rank);
        break;
      }
    }
  }
  const size_t evaluated = qrels.query_count();
  return MetricReport{"mrr", k, sum / static_cast<double>(evaluated), evaluated};
}

MetricReport recall_at_k(const Run& run, const Qrels& qrels, size_t k) {
  check_args(qrels, k);
  double sum = 0.0;
  for (const auto& [qid, relevant] : qrels.all()) {
    const auto* list = run.list(qid);
    if (list == nullptr) continue;
    const size_t depth = std::min<size_t>(k, list->size());
    size_t found = 0;
    for (size_t i = 0; i < depth; ++i) {
      if (relevant.count((*list)[i].doc_id) > 0) ++found;
    }
    sum += static_cast<double>(found) / static_cast<double>(relevant.size());
  }
  const size_t evaluated = qrels.query_count();
  return MetricReport{"recall", k, sum / static_cast<double>(evaluated), evaluated};
}

std::vector<MetricReport> recall_curve(const Run& run, const Qrels& qrels,
                                       std::span<const size_t> depths) {
  std::vector<MetricReport> out;
  out.reserve(depths.size());
  for (const size_t depth : depths) out.push_back(recall_at_k(run, qrels, depth));
  return out;
}

}  // namespace densedex
