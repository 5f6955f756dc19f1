#include "densedex/toy_encoder.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "densedex/binio.hpp"
#include "densedex/error.hpp"
#include "densedex/rng.hpp"

namespace densedex {

namespace {

constexpr char kMagic[4] = {'D', 'E', 'N', 'C'};
constexpr uint32_t kVersion = 1;

// Word characters: ASCII alphanumerics (case-folded) plus any byte >= 0x80,
// so multi-byte UTF-8 sequences stay inside words. ASCII punctuation,
// whitespace, and control bytes are boundaries and are dropped.
bool is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         c >= 0x80;
}

char fold_ascii(unsigned char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c + 32) : static_cast<char>(c);
}

void check_params(const ToyEncoderParams& p) {
  if (p.vocab_size < 2) throw DataError(ErrKind::BadArgument, "vocab_size must be >= 2");
  if (p.dim == 0) throw DataError(ErrKind::BadArgument, "dim must be >= 1");
  if (p.token_table.size() != static_cast<size_t>(p.vocab_size) * p.dim ||
      p.seg_query.size() != p.dim || p.seg_doc.size() != p.dim) {
    throw InternalError("encoder params have inconsistent shapes");
  }
}

}  // namespace

uint64_t token_hash(std::string_view word) {
  uint64_t h = 1469598103934665603ULL;  // FNV offset basis
  for (const char c : word) {
    h ^= static_cast<uint8_t>(c);
    h *= 1099511628211ULL;  // FNV prime
  }
  return h;
}

ToyEncoderParams init_params(uint32_t vocab_size, uint32_t dim, uint64_t seed) {
  std::mt19937_64 rng(seed);
  return init_params(vocab_size, dim, rng);
}

ToyEncoderParams init_params(uint32_t vocab_size, uint32_t dim, std::mt19937_64& rng) {
  if (vocab_size < 2) throw DataError(ErrKind::BadArgument, "vocab_size must be >= 2");
  if (dim == 0) throw DataError(ErrKind::BadArgument, "dim must be >= 1");
  ToyEncoderParams p;
  p.vocab_size = vocab_size;
  p.dim = dim;
  p.token_table.resize(static_cast<size_t>(vocab_size) * dim);
  const double half = 0.5 / static_cast<double>(dim);
  for (auto& v : p.token_table) v = uniform_in(rng, -half, half);
  p.seg_query.assign(dim, 0.0);
  p.seg_doc.assign(dim, 0.0);
  return p;
}

TokenSeq tokenize(std::string_view text, Role role, uint32_t vocab_size, size_t max_len) {
  if (vocab_size < 2) throw DataError(ErrKind::BadArgument, "vocab_size must be >= 2");
  if (max_len == 0) max_len = role == Role::Query ? kMaxQueryTokens : kMaxDocTokens;

  TokenSeq seq;
  seq.role = role;
  std::string word;
  const auto flush = [&] {
    if (!word.empty()) {
      if (seq.ids.size() < max_len) {
        seq.ids.push_back(1 + static_cast<uint32_t>(token_hash(word) % (vocab_size - 1)));
      }
      word.clear();
    }
  };
  for (const char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_word_byte(c)) {
      word.push_back(fold_ascii(c));
    } else {
      flush();
      if (seq.ids.size() == max_len) break;
    }
  }
  flush();
  if (seq.ids.empty()) seq.ids.push_back(0);  // out-of-vocabulary
  return seq;
}

std::vector<double> encode(const TokenSeq& seq, const ToyEncoderParams& params) {
  check_params(params);
  if (seq.ids.empty()) throw DataError(ErrKind::BadArgument, "empty token sequence");
  std::vector<double> out(params.dim, 0.0);
  for (const uint32_t id : seq.ids) {
    if (id >= params.vocab_size) {
      throw DataError(ErrKind::BadArgument,
                      "token id " + std::to_string(id) + " out of range");
    }
    const auto row = params.token_row(id);
    for (uint32_t j = 0; j < params.dim; ++j) out[j] += row[j];
  }
  const double inv = 1.0 / static_cast<double>(seq.ids.size());
  const auto& seg = seq.role == Role::Query ? params.seg_query : params.seg_doc;
  for (uint32_t j = 0; j < params.dim; ++j) out[j] = out[j] * inv + seg[j];
  return out;
}

double relevance(std::span<const double> query_emb, std::span<const double> doc_emb) {
  if (query_emb.size() != doc_emb.size()) {
    throw DataError(ErrKind::DimMismatch, "embedding dims differ: " +
                                              std::to_string(query_emb.size()) + " vs " +
                                              std::to_string(doc_emb.size()));
  }
  double s = 0.0;
  for (size_t i = 0; i < query_emb.size(); ++i) s += query_emb[i] * doc_emb[i];
  return s;
}

void save_params(const ToyEncoderParams& params, const std::filesystem::path& path) {
  check_params(params);
  binio::AtomicFile file(path);
  auto& os = file.out();
  binio::Crc32 crc;
  const auto put = [&](const char* data, size_t len) {
    os.write(data, static_cast<std::streamsize>(len));
    crc.update(data, len);
  };
  const auto put_u32 = [&](uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    put(b, 4);
  };
  const auto put_u64 = [&](uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    put(b, 8);
  };
  const auto put_f64_block = [&](const std::vector<double>& block) {
    for (const double v : block) put_u64(std::bit_cast<uint64_t>(v));
  };
  put(kMagic, 4);
  put_u32(kVersion);
  put_u32(params.dim);
  put_u64(params.vocab_size);
  put_f64_block(params.token_table);
  put_f64_block(params.seg_query);
  put_f64_block(params.seg_doc);
  binio::write_u32(os, crc.value());
  if (!os) throw DataError(ErrKind::Io, "write failed: " + file.temp_path().string());
  file.commit();
}

ToyEncoderParams load_params(const std::filesystem::path& path) {
  const binio::MappedFile map = binio::MappedFile::open(path);
  const std::byte* data = map.data();
  const size_t size = map.size();
  if (size < 24) throw DataError(ErrKind::Truncated, "unexpected EOF in " + path.string());
  if (std::memcmp(data, kMagic, 4) != 0) {
    throw DataError(ErrKind::BadMagic, "not a densedex params file: " + path.string());
  }
  const uint32_t version = binio::load_u32(data + 4);
  if (version != kVersion) {
    throw DataError(ErrKind::BadVersion,
                    "unsupported params version " + std::to_string(version));
  }
  ToyEncoderParams p;
  p.dim = binio::load_u32(data + 8);
  const uint64_t vocab = binio::load_u64(data + 12);
  // dim cap keeps (vocab + 2) * dim * 8 far from u64 overflow on hostile headers
  if (p.dim == 0 || p.dim > (1u << 24) || vocab < 2 || vocab > UINT32_MAX) {
    throw DataError(ErrKind::Parse, "invalid params header in " + path.string());
  }
  p.vocab_size = static_cast<uint32_t>(vocab);
  const uint64_t doubles = (static_cast<uint64_t>(p.vocab_size) + 2) * p.dim;
  if (size != 20 + doubles * 8 + 4) {
    throw DataError(ErrKind::Truncated, "unexpected EOF in " + path.string());
  }
  const uint32_t stored_crc = binio::load_u32(data + size - 4);
  if (binio::crc32(data, size - 4) != stored_crc) {
    throw DataError(ErrKind::BadChecksum, "checksum mismatch in " + path.string());
  }
  size_t off = 20;
  const auto take_block = [&](std::vector<double>& block, size_t n) {
    block.resize(n);
    for (size_t i = 0; i < n; ++i, off += 8) {
      block[i] = binio::load_f64(data + off);
      if (!std::isfinite(block[i])) {
        throw DataError(ErrKind::Numeric, "non-finite entry in " + path.string());
      }
    }
  };
  take_block(p.token_table, static_cast<size_t>(p.vocab_size) * p.dim);
  take_block(p.seg_query, p.dim);
  take_block(p.seg_doc, p.dim);
  return p;
}

}  // namespace densedex
