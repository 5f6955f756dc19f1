#include "densedex/corpus_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>

#include "densedex/binio.hpp"
#include "densedex/error.hpp"

namespace densedex {

namespace {

std::string loc(const std::string& label, size_t line_no) {
  return label + ":" + std::to_string(line_no) + ": ";
}

// Strips one trailing '\r' so CRLF files parse like LF files.
void chomp_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t start = 0;
  while (true) {
    const size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

std::vector<std::string_view> split_whitespace(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

int64_t parse_int(std::string_view s, const std::string& label, size_t line_no,
                  const char* what) {
  int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw DataError(ErrKind::Parse, loc(label, line_no) + "invalid " + what +
                                        " '" + std::string(s) + "'");
  }
  return v;
}

double parse_double(std::string_view s, const std::string& label, size_t line_no,
                    const char* what) {
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw DataError(ErrKind::Parse, loc(label, line_no) + "invalid " + what +
                                        " '" + std::string(s) + "'");
  }
  return v;
}

void require_utf8(std::string_view line, const std::string& label, size_t line_no) {
  if (!binio::is_valid_utf8(line)) {
    throw DataError(ErrKind::Utf8, loc(label, line_no) + "invalid UTF-8");
  }
}

std::ifstream open_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(ErrKind::Io, "cannot open " + path.string());
  return in;
}

}  // namespace

TsvCollectionReader::TsvCollectionReader(const std::filesystem::path& path)
    : label_(path.filename().string()), in_(open_text(path)) {}

std::optional<TextRecord> TsvCollectionReader::next() {
  std::string line;
  if (!std::getline(in_, line)) return std::nullopt;
  ++line_no_;
  chomp_cr(line);
  require_utf8(line, label_, line_no_);
  const auto fields = split_tabs(line);
  if (fields.size() != 2) {
    throw DataError(ErrKind::Parse,
                    loc(label_, line_no_) + "expected 2 tab-separated fields, got " +
                        std::to_string(fields.size()));
  }
  if (fields[0].empty()) {
    throw DataError(ErrKind::Parse, loc(label_, line_no_) + "empty id");
  }
  TextRecord rec{std::string(fields[0]), std::string(fields[1])};
  if (!seen_ids_.insert(rec.id).second) {
    throw DataError(ErrKind::DuplicateId,
                    loc(label_, line_no_) + "duplicate id '" + rec.id + "'");
  }
  return rec;
}

std::vector<TextRecord> read_tsv_collection(const std::filesystem::path& path) {
  TsvCollectionReader reader(path);
  std::vector<TextRecord> out;
  while (auto rec = reader.next()) out.push_back(std::move(*rec));
  return out;
}

void Qrels::add(std::string query_id, std::string doc_id) {
  judgments_[std::move(query_id)].insert(std::move(doc_id));
}

bool Qrels::is_relevant(const std::string& query_id, const std::string& doc_id) const {
  const auto it = judgments_.find(query_id);
  return it != judgments_.end() && it->second.count(doc_id) > 0;
}

const std::set<std::string>* Qrels::judged_docs(const std::string& query_id) const {
  const auto it = judgments_.find(query_id);
  return it == judgments_.end() ? nullptr : &it->second;
}

Qrels read_qrels(const std::filesystem::path& path) {
  const std::string label = path.filename().string();
  std::ifstream in = open_text(path);
  Qrels qrels;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    chomp_cr(line);
    require_utf8(line, label, line_no);
    const auto fields = split_whitespace(line);
    if (fields.size() != 4) {
      throw DataError(ErrKind::Parse,
                      loc(label, line_no) + "expected 4 fields, got " +
                          std::to_string(fields.size()));
    }
    const int64_t rel = parse_int(fields[3], label, line_no, "relevance");
    if (rel >= 1) qrels.add(std::string(fields[0]), std::string(fields[2]));
  }
  return qrels;
}

void Run::append(const std::string& query_id, std::string doc_id, double score) {
  auto it = lists_.find(query_id);
  if (it == lists_.end()) {
    order_.push_back(query_id);
    it = lists_.emplace(query_id, std::vector<RunEntry>{}).first;
  }
  auto& list = it->second;
  if (!list.empty() && score > list.back().score) {
    throw InternalError("run scores must be non-increasing (query '" + query_id + "')");
  }
  list.push_back(RunEntry{std::move(doc_id), score, static_cast<uint32_t>(list.size() + 1)});
}

void Run::add_list(const std::string& query_id, std::vector<RunEntry> entries) {
  if (lists_.count(query_id) > 0) {
    throw InternalError("list for query '" + query_id + "' installed twice");
  }
  std::unordered_set<std::string_view> docs;
  for (size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].rank != i + 1) {
      throw DataError(ErrKind::Parse,
                      "query '" + query_id + "': ranks not contiguous from 1 (position " +
                          std::to_string(i + 1) + " has rank " +
                          std::to_string(entries[i].rank) + ")");
    }
    if (!docs.insert(entries[i].doc_id).second) {
      throw DataError(ErrKind::DuplicateId, "query '" + query_id + "': duplicate document '" +
                                                entries[i].doc_id + "'");
    }
  }
  order_.push_back(query_id);
  lists_.emplace(query_id, std::move(entries));
}

const std::vector<RunEntry>* Run::list(const std::string& query_id) const {
  const auto it = lists_.find(query_id);
  return it == lists_.end() ? nullptr : &it->second;
}

Run read_run(const std::filesystem::path& path) {
  const std::string label = path.filename().string();
  std::ifstream in = open_text(path);

  // qid -> entries in file order; sorted by rank before installation.
  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<RunEntry>> partial;
  std::string line;
  size_t line_no = 0;
  size_t columns = 0;
  while (std::getline(in, line)) {
    ++line_no;
    chomp_cr(line);
    require_utf8(line, label, line_no);
    const auto fields = split_whitespace(line);
    if (fields.size() != 3 && fields.size() != 6) {
      throw DataError(ErrKind::Parse,
                      loc(label, line_no) + "expected 3 or 6 fields, got " +
                          std::to_string(fields.size()));
    }
    if (columns == 0) columns = fields.size();
    if (fields.size() != columns) {
      throw DataError(ErrKind::Parse, loc(label, line_no) + "mixed 3- and 6-column lines");
    }
    RunEntry entry;
    std::string qid;
    if (columns == 3) {
      qid = std::string(fields[0]);
      entry.doc_id = std::string(fields[1]);
      const int64_t rank = parse_int(fields[2], label, line_no, "rank");
      if (rank < 1) throw DataError(ErrKind::Parse, loc(label, line_no) + "rank must be >= 1");
      entry.rank = static_cast<uint32_t>(rank);
      entry.score = 1.0 / static_cast<double>(rank);
    } else {
      qid = std::string(fields[0]);
      entry.doc_id = std::string(fields[2]);
      const int64_t rank = parse_int(fields[3], label, line_no, "rank");
      if (rank < 1) throw DataError(ErrKind::Parse, loc(label, line_no) + "rank must be >= 1");
      entry.rank = static_cast<uint32_t>(rank);
      entry.score = parse_double(fields[4], label, line_no, "score");
    }
    auto it = partial.find(qid);
    if (it == partial.end()) {
      order.push_back(qid);
      it = partial.emplace(std::move(qid), std::vector<RunEntry>{}).first;
    }
    it->second.push_back(std::move(entry));
  }

  Run run;
  for (const auto& qid : order) {
    auto& entries = partial[qid];
    std::stable_sort(entries.begin(), entries.end(),
                     [](const RunEntry& a, const RunEntry& b) { return a.rank < b.rank; });
    try {
      run.add_list(qid, std::move(entries));
    } catch (const DataError& e) {
      throw DataError(e.kind(), label + ": " + e.what());
    }
  }
  return run;
}

void write_run(const Run& run, const std::filesystem::path& path, RunFormat format,
               std::string_view tag) {
  binio::AtomicFile file(path);
  auto& os = file.out();
  char score_buf[64];
  for (const auto& qid : run.query_ids()) {
    for (const auto& entry : *run.list(qid)) {
      if (format == RunFormat::MsMarco) {
        os << qid << '\t' << entry.doc_id << '\t' << entry.rank << '\n';
      } else {
        std::snprintf(score_buf, sizeof(score_buf), "%.6g", entry.score);
        os << qid << " Q0 " << entry.doc_id << ' ' << entry.rank << ' ' << score_buf
           << ' ' << tag << '\n';
      }
    }
  }
  file.commit();
}

}  // namespace densedex
