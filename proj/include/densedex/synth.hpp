#pragma once

#include <cstdint>
#include <filesystem>

namespace densedex {

// Desk-scale corpus with planted relevance: each query consists of one
// marker word that appears in exactly its relevant document, so a zero-loss
// encoder exists by construction. Output is byte-identical for a given
// config.
struct SynthConfig {
  size_t num_queries = 50;
  size_t num_docs = 500;
  uint32_t dim = 64;  // recorded for downstream stages; text does not depend on it
  uint64_t seed = 1;
};

struct SynthFiles {
  std::filesystem::path collection;  // docid<TAB>text
  std::filesystem::path queries;     // qid<TAB>text
  std::filesystem::path qrels;       // qid 0 docid 1
  std::filesystem::path pairs;       // qid<TAB>qtext<TAB>docid<TAB>dtext
};

SynthFiles generate_corpus(const SynthConfig& config, const std::filesystem::path& out_dir);

}  // namespace densedex
