#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace densedex {

enum class Role { Query, Document };

inline constexpr size_t kMaxQueryTokens = 20;
inline constexpr size_t kMaxDocTokens = 256;

// Bag-of-embeddings encoder state. One instance serves both roles: queries
// and documents share the token table and differ only in which segment
// vector is added before pooling. Token id 0 is reserved for
// out-of-vocabulary input. Everything is f64; stores downcast to f32.
struct ToyEncoderParams {
  uint32_t vocab_size = 0;
  uint32_t dim = 0;
  std::vector<double> token_table;  // vocab_size x dim, row-major
  std::vector<double> seg_query;    // segment 0
  std::vector<double> seg_doc;      // segment 1

  std::span<const double> token_row(uint32_t id) const {
    return {token_table.data() + static_cast<size_t>(id) * dim, dim};
  }
  std::span<double> token_row(uint32_t id) {
    return {token_table.data() + static_cast<size_t>(id) * dim, dim};
  }
};

// Token table i.i.d. uniform in [-0.5/dim, 0.5/dim]; segment vectors zero.
ToyEncoderParams init_params(uint32_t vocab_size, uint32_t dim, uint64_t seed);
ToyEncoderParams init_params(uint32_t vocab_size, uint32_t dim, std::mt19937_64& rng);

// Params file ("DENC" magic, same header style as the vector store).
void save_params(const ToyEncoderParams& params, const std::filesystem::path& path);
ToyEncoderParams load_params(const std::filesystem::path& path);

struct TokenSeq {
  std::vector<uint32_t> ids;  // each in [0, vocab_size)
  Role role = Role::Query;
};

// The fixed token hash: FNV-1a 64-bit over the lowercased word bytes.
uint64_t token_hash(std::string_view word);

// Lowercases, splits on whitespace/punctuation boundaries, hashes each word
// into [1, vocab_size), truncates to max_len (role default when 0: 20 for
// queries, 256 for documents). Input that yields no words becomes the
// single OOV id 0. Total on valid UTF-8.
TokenSeq tokenize(std::string_view text, Role role, uint32_t vocab_size,
                  size_t max_len = 0);

inline TokenSeq tokenize(std::string_view text, Role role,
                         const ToyEncoderParams& params, size_t max_len = 0) {
  return tokenize(text, role, params.vocab_size, max_len);
}

// Mean over tokens of (token_table[id] + segment vector for the role).
std::vector<double> encode(const TokenSeq& seq, const ToyEncoderParams& params);

// Inner product, 64-bit accumulation.
double relevance(std::span<const double> query_emb, std::span<const double> doc_emb);

}  // namespace densedex
