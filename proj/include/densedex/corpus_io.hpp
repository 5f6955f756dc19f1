#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace densedex {

struct TextRecord {
  std::string id;    // non-empty, no tab/newline
  std::string text;  // UTF-8
};

// Streams `id<TAB>text` lines in file order. Only the set of already seen
// ids is retained (duplicate detection); texts are never buffered beyond
// the current line. CRLF endings are tolerated, invalid UTF-8 is an error.
class TsvCollectionReader {
 public:
  explicit TsvCollectionReader(const std::filesystem::path& path);

  std::optional<TextRecord> next();

 private:
  std::string label_;
  std::ifstream in_;
  std::unordered_set<std::string> seen_ids_;
  size_t line_no_ = 0;
};

std::vector<TextRecord> read_tsv_collection(const std::filesystem::path& path);

// Positive relevance judgments only, deduplicated.
class Qrels {
 public:
  void add(std::string query_id, std::string doc_id);

  bool is_relevant(const std::string& query_id, const std::string& doc_id) const;
  const std::set<std::string>* judged_docs(const std::string& query_id) const;

  size_t query_count() const { return judgments_.size(); }
  bool empty() const { return judgments_.empty(); }

  // Ordered by query id, for deterministic iteration.
  const std::map<std::string, std::set<std::string>>& all() const { return judgments_; }

 private:
  std::map<std::string, std::set<std::string>> judgments_;
};

// Lines `qid 0 docid rel`, tab- or whitespace-separated. Entries with
// rel >= 1 are kept, rel <= 0 dropped.
Qrels read_qrels(const std::filesystem::path& path);

struct RunEntry {
  std::string doc_id;
  double score = 0.0;
  uint32_t rank = 0;  // 1-based, contiguous within a query
};

// Per-query ranked document lists. Query order is first-seen order so that
// files round-trip byte-exactly.
class Run {
 public:
  // Appends with rank = current length + 1. Scores must be non-increasing.
  void append(const std::string& query_id, std::string doc_id, double score);

  // Installs a complete list; validates contiguous ranks starting at 1 and
  // unique doc ids. Entries must already be sorted by rank.
  void add_list(const std::string& query_id, std::vector<RunEntry> entries);

  const std::vector<std::string>& query_ids() const { return order_; }
  const std::vector<RunEntry>* list(const std::string& query_id) const;
  bool has(const std::string& query_id) const { return lists_.count(query_id) > 0; }
  size_t query_count() const { return order_.size(); }

 private:
  std::vector<std::string> order_;
  std::unordered_map<std::string, std::vector<RunEntry>> lists_;
};

enum class RunFormat {
  MsMarco,  // qid<TAB>docid<TAB>rank
  Trec,     // qid Q0 docid rank score tag (space-separated)
};

// Auto-detects the 3-column and 6-column layouts. MS MARCO files carry no
// scores; 1/rank is substituted so score ordering invariants still hold.
// Rank is authoritative in both formats.
Run read_run(const std::filesystem::path& path);

void write_run(const Run& run, const std::filesystem::path& path,
               RunFormat format = RunFormat::MsMarco,
               std::string_view tag = "densedex");

}  // namespace densedex
