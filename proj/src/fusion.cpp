#include "densedex/fusion.hpp"

#include <algorithm>
#include <unordered_set>

#include "densedex/error.hpp"

namespace densedex {

namespace {

void check_config(const FusionConfig& config) {
  if (config.depth_in == 0 || config.depth_out == 0) {
    throw DataError(ErrKind::BadArgument, "fusion depths must be >= 1");
  }
}

void check_duplicate_free(std::span<const std::string> list, const char* name) {
  std::unordered_set<std::string_view> seen;
  for (const auto& id : list) {
    if (!seen.insert(id).second) {
      throw DataError(ErrKind::DuplicateId,
                      std::string("input list ") + name + " repeats document '" + id + "'");
    }
  }
}

std::vector<std::string> ids_of(const Run& run, const std::string& qid, size_t depth) {
  std::vector<std::string> ids;
  const auto* list = run.list(qid);
  if (list == nullptr) return ids;
  const size_t n = std::min(depth, list->size());
  ids.reserve(n);
  for (size_t i = 0; i < n; ++i) ids.push_back((*list)[i].doc_id);
  return ids;
}

}  // namespace

std::vector<std::string> alternating_merge(std::span<const std::string> list_a,
                                           std::span<const std::string> list_b,
                                           const FusionConfig& config) {
  check_config(config);
  check_duplicate_free(list_a, "A");
  check_duplicate_free(list_b, "B");

  const size_t take_a = std::min(config.depth_in, list_a.size());
  const size_t take_b = std::min(config.depth_in, list_b.size());

  std::vector<std::string> fused;
  fused.reserve(std::min(config.depth_out, take_a + take_b));
  std::unordered_set<std::string_view> seen;
  const auto push = [&](const std::string& id) {
    if (fused.size() < config.depth_out && seen.insert(id).second) fused.push_back(id);
  };
  for (size_t i = 0; i < std::max(take_a, take_b); ++i) {
    if (i < take_a) push(list_a[i]);
    if (i < take_b) push(list_b[i]);
  }
  return fused;
}

Run fuse_runs(const Run& run_a, const Run& run_b, const FusionConfig& config) {
  check_config(config);

  std::vector<std::string> queries = run_a.query_ids();
  for (const auto& qid : run_b.query_ids()) {
    if (!run_a.has(qid)) queries.push_back(qid);
  }

  Run fused;
  for (const auto& qid : queries) {
    const auto a_ids = ids_of(run_a, qid, config.depth_in);
    const auto b_ids = ids_of(run_b, qid, config.depth_in);
    const auto merged = alternating_merge(a_ids, b_ids, config);
    for (size_t r = 0; r < merged.size(); ++r) {
      fused.append(qid, merged[r], 1.0 / static_cast<double>(r + 1));
    }
  }
  return fused;
}

double consistency_factor(const Run& run_f, const Run& run_ref, size_t n,
                          size_t ref_depth) {
  if (n == 0) throw DataError(ErrKind::BadArgument, "depth n must be >= 1");
  if (ref_depth == 0) throw DataError(ErrKind::BadArgument, "reference depth must be >= 1");

  double sum = 0.0;
  size_t common = 0;
  for (const auto& qid : run_f.query_ids()) {
    const auto* ref_list = run_ref.list(qid);
    if (ref_list == nullptr) continue;
    ++common;

    std::unordered_set<std::string_view> ref_docs;
    const size_t ref_n = std::min(ref_depth, ref_list->size());
    ref_docs.reserve(ref_n);
    for (size_t i = 0; i < ref_n; ++i) ref_docs.insert((*ref_list)[i].doc_id);

    const auto* f_list = run_f.list(qid);
    const size_t top_n = std::min(n, f_list->size());
    size_t overlap = 0;
    for (size_t i = 0; i < top_n; ++i) {
      if (ref_docs.count((*f_list)[i].doc_id) > 0) ++overlap;
    }
    sum += static_cast<double>(overlap) / static_cast<double>(top_n);
  }
  if (common == 0) {
    throw DataError(ErrKind::Empty, "runs share no queries");
  }
  return sum / static_cast<double>(common);
}

}  // namespace densedex
