#include "densedex/synth.hpp"

#include <random>
#include <string>
#include <vector>

#include "densedex/binio.hpp"
#include "densedex/error.hpp"
#include "densedex/rng.hpp"

namespace densedex {

namespace {

constexpr size_t kFillerVocab = 200;
constexpr size_t kMinDocWords = 8;
constexpr size_t kMaxDocWords = 24;

std::string filler_word(uint64_t n) { return "w" + std::to_string(n); }
std::string marker_word(size_t q) { return "mkr" + std::to_string(q); }

}  // namespace

SynthFiles generate_corpus(const SynthConfig& config, const std::filesystem::path& out_dir) {
  if (config.num_queries == 0) throw DataError(ErrKind::BadArgument, "need >= 1 query");
  if (config.num_docs < config.num_queries) {
    throw DataError(ErrKind::BadArgument,
                    "need at least one document per query: docs=" +
                        std::to_string(config.num_docs) + " queries=" +
                        std::to_string(config.num_queries));
  }
  if (config.dim == 0) throw DataError(ErrKind::BadArgument, "dim must be >= 1");
  std::filesystem::create_directories(out_dir);

  std::mt19937_64 rng(config.seed);

  // Filler-only texts first; markers are spliced into the relevant docs.
  std::vector<std::vector<std::string>> doc_words(config.num_docs);
  for (auto& words : doc_words) {
    const size_t len =
        kMinDocWords + uniform_index(rng, kMaxDocWords - kMinDocWords + 1);
    words.reserve(len + 1);
    for (size_t w = 0; w < len; ++w) {
      words.push_back(filler_word(uniform_index(rng, kFillerVocab)));
    }
  }

  // Query i is relevant to the doc at perm[i].
  std::vector<size_t> perm(config.num_docs);
  for (size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  shuffle_vec(perm, rng);
  std::vector<size_t> relevant_doc(config.num_queries);
  for (size_t q = 0; q < config.num_queries; ++q) {
    relevant_doc[q] = perm[q];
    auto& words = doc_words[perm[q]];
    const size_t at = uniform_index(rng, words.size() + 1);
    words.insert(words.begin() + static_cast<ptrdiff_t>(at), marker_word(q));
  }

  SynthFiles files{out_dir / "collection.tsv", out_dir / "queries.tsv",
                   out_dir / "qrels.tsv", out_dir / "pairs.tsv"};

  std::vector<std::string> doc_texts(config.num_docs);
  for (size_t d = 0; d < config.num_docs; ++d) {
    std::string text;
    for (size_t w = 0; w < doc_words[d].size(); ++w) {
      if (w > 0) text += ' ';
      text += doc_words[d][w];
    }
    doc_texts[d] = std::move(text);
  }

  {
    binio::AtomicFile out(files.collection);
    for (size_t d = 0; d < config.num_docs; ++d) {
      out.out() << 'd' << d << '\t' << doc_texts[d] << '\n';
    }
    out.commit();
  }
  {
    binio::AtomicFile out(files.queries);
    for (size_t q = 0; q < config.num_queries; ++q) {
      out.out() << 'q' << q << '\t' << marker_word(q) << '\n';
    }
    out.commit();
  }
  {
    binio::AtomicFile out(files.qrels);
    for (size_t q = 0; q < config.num_queries; ++q) {
      out.out() << 'q' << q << "\t0\td" << relevant_doc[q] << "\t1\n";
    }
    out.commit();
  }
  {
    binio::AtomicFile out(files.pairs);
    for (size_t q = 0; q < config.num_queries; ++q) {
      out.out() << 'q' << q << '\t' << marker_word(q) << '\t' << 'd' << relevant_doc[q]
                << '\t' << doc_texts[relevant_doc[q]] << '\n';
    }
    out.commit();
  }
  return files;
}

}  // namespace densedex
