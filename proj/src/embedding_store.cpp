#include "densedex/embedding_store.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "densedex/binio.hpp"
#include "densedex/error.hpp"

/*
 * Store layout, all integers little-endian:
 *
 *   offset 0   magic "DDEX" (4 bytes)
 *   offset 4   format version, u32 (currently 1)
 *   offset 8   dim, u32
 *   offset 12  count, u64
 *   offset 20  vector block: count * dim f32, row-major
 *   ...        id table: per id, u32 byte length + UTF-8 bytes
 *   tail       CRC-32 of all preceding bytes, u32
 *
 * The fixed-stride vector block starts at a 4-byte-aligned offset and is
 * served directly from the memory map. The id table sits at the tail so the
 * block stays contiguous.
 */

namespace densedex {

namespace {

constexpr char kMagic[4] = {'D', 'D', 'E', 'X'};
constexpr uint32_t kVersion = 1;
constexpr size_t kHeaderBytes = 20;

static_assert(std::endian::native == std::endian::little,
              "vector block is served in place and assumes a little-endian host");

void validate_id(const std::string& id) {
  if (id.empty()) throw DataError(ErrKind::Parse, "empty id");
  if (id.find('\t') != std::string::npos || id.find('\n') != std::string::npos) {
    throw DataError(ErrKind::Parse, "id contains tab or newline: '" + id + "'");
  }
  if (!binio::is_valid_utf8(id)) {
    throw DataError(ErrKind::Utf8, "id is not valid UTF-8");
  }
}

}  // namespace

StoreBuildSummary build_store(VectorSource source, uint32_t dim,
                              const std::filesystem::path& out_path) {
  if (dim == 0) throw DataError(ErrKind::BadArgument, "dim must be >= 1");

  binio::AtomicFile file(out_path);
  auto& os = file.out();
  os.write(kMagic, 4);
  binio::write_u32(os, kVersion);
  binio::write_u32(os, dim);
  binio::write_u64(os, 0);  // count, patched after the stream is consumed

  std::vector<std::string> ids;
  std::unordered_set<std::string> seen;
  while (auto rec = source()) {
    validate_id(rec->first);
    if (rec->second.size() != dim) {
      throw DataError(ErrKind::DimMismatch,
                      "dim mismatch at id=" + rec->first + ": got " +
                          std::to_string(rec->second.size()) + ", want " +
                          std::to_string(dim));
    }
    for (const float v : rec->second) {
      if (!std::isfinite(v)) {
        throw DataError(ErrKind::Numeric, "non-finite value at id=" + rec->first);
      }
    }
    if (!seen.insert(rec->first).second) {
      throw DataError(ErrKind::DuplicateId, "duplicate id '" + rec->first + "'");
    }
    os.write(reinterpret_cast<const char*>(rec->second.data()),
             static_cast<std::streamsize>(sizeof(float) * dim));
    ids.push_back(std::move(rec->first));
  }
  for (const auto& id : ids) {
    binio::write_u32(os, static_cast<uint32_t>(id.size()));
    os.write(id.data(), static_cast<std::streamsize>(id.size()));
  }
  if (!os) throw DataError(ErrKind::Io, "write failed: " + file.temp_path().string());
  file.close_stream();

  // Patch the count, then checksum the finished bytes in a second pass.
  {
    std::fstream patch(file.temp_path(), std::ios::binary | std::ios::in | std::ios::out);
    patch.seekp(12);
    binio::write_u64(patch, ids.size());
    if (!patch) throw DataError(ErrKind::Io, "patch failed: " + file.temp_path().string());
  }
  binio::Crc32 crc;
  {
    std::ifstream in(file.temp_path(), std::ios::binary);
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
      crc.update(buf, static_cast<size_t>(in.gcount()));
    }
  }
  {
    std::ofstream tail(file.temp_path(), std::ios::binary | std::ios::app);
    binio::write_u32(tail, crc.value());
    if (!tail) throw DataError(ErrKind::Io, "write failed: " + file.temp_path().string());
  }
  const uint64_t bytes = std::filesystem::file_size(file.temp_path());
  file.commit();
  return StoreBuildSummary{ids.size(), bytes};
}

struct EmbeddingStore::Impl {
  binio::MappedFile map;            // empty for in-memory stores
  std::vector<float> owned_matrix;  // used when map is empty
  const float* vectors = nullptr;
  uint32_t dim = 0;
  uint64_t count = 0;
  std::vector<std::string> ids;
  std::unordered_map<std::string_view, uint64_t> index;

  void build_index() {
    index.reserve(ids.size());
    for (uint64_t i = 0; i < ids.size(); ++i) {
      if (!index.emplace(ids[i], i).second) {
        throw DataError(ErrKind::DuplicateId, "duplicate id '" + ids[i] + "'");
      }
    }
  }
};

EmbeddingStore::EmbeddingStore(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

EmbeddingStore EmbeddingStore::open(const std::filesystem::path& path) {
  auto impl = std::make_shared<Impl>();
  impl->map = binio::MappedFile::open(path);
  const std::byte* data = impl->map.data();
  const size_t size = impl->map.size();

  if (size < kHeaderBytes + 4) {
    throw DataError(ErrKind::Truncated, "unexpected EOF in " + path.string());
  }
  if (std::memcmp(data, kMagic, 4) != 0) {
    throw DataError(ErrKind::BadMagic, "not a densedex store: " + path.string());
  }
  const uint32_t version = binio::load_u32(data + 4);
  if (version != kVersion) {
    throw DataError(ErrKind::BadVersion,
                    "unsupported store version " + std::to_string(version));
  }
  impl->dim = binio::load_u32(data + 8);
  impl->count = binio::load_u64(data + 12);
  if (impl->dim == 0) throw DataError(ErrKind::Parse, "store dim is 0");
  if (impl->count > (size - kHeaderBytes - 4) / (sizeof(float) * impl->dim)) {
    throw DataError(ErrKind::Truncated, "unexpected EOF in " + path.string());
  }

  const uint64_t block_bytes = impl->count * impl->dim * sizeof(float);
  if (size < kHeaderBytes + block_bytes + 4) {
    throw DataError(ErrKind::Truncated, "unexpected EOF in " + path.string());
  }
  const uint32_t stored_crc = binio::load_u32(data + size - 4);
  if (binio::crc32(data, size - 4) != stored_crc) {
    throw DataError(ErrKind::BadChecksum, "checksum mismatch in " + path.string());
  }

  impl->vectors = reinterpret_cast<const float*>(data + kHeaderBytes);
  size_t off = kHeaderBytes + block_bytes;
  const size_t table_end = size - 4;
  impl->ids.reserve(impl->count);
  for (uint64_t i = 0; i < impl->count; ++i) {
    if (off + 4 > table_end) {
      throw DataError(ErrKind::Truncated, "unexpected EOF in id table");
    }
    const uint32_t len = binio::load_u32(data + off);
    off += 4;
    if (off + len > table_end) {
      throw DataError(ErrKind::Truncated, "unexpected EOF in id table");
    }
    impl->ids.emplace_back(reinterpret_cast<const char*>(data + off), len);
    off += len;
  }
  if (off != table_end) {
    throw DataError(ErrKind::Parse, "trailing bytes after id table");
  }
  impl->build_index();
  return EmbeddingStore(std::move(impl));
}

EmbeddingStore EmbeddingStore::from_vectors(std::vector<std::string> ids,
                                            std::vector<float> matrix, uint32_t dim) {
  if (dim == 0) throw DataError(ErrKind::BadArgument, "dim must be >= 1");
  if (matrix.size() != ids.size() * static_cast<size_t>(dim)) {
    throw DataError(ErrKind::DimMismatch,
                    "matrix size " + std::to_string(matrix.size()) + " != count*dim");
  }
  for (const auto& id : ids) validate_id(id);
  auto impl = std::make_shared<Impl>();
  impl->owned_matrix = std::move(matrix);
  impl->vectors = impl->owned_matrix.data();
  impl->dim = dim;
  impl->count = ids.size();
  impl->ids = std::move(ids);
  impl->build_index();
  return EmbeddingStore(std::move(impl));
}

uint32_t EmbeddingStore::dim() const { return impl_->dim; }
uint64_t EmbeddingStore::count() const { return impl_->count; }

std::span<const float> EmbeddingStore::row(uint64_t index) const {
  return {impl_->vectors + index * impl_->dim, impl_->dim};
}

const std::string& EmbeddingStore::id(uint64_t index) const { return impl_->ids[index]; }

std::optional<uint64_t> EmbeddingStore::row_of(std::string_view id) const {
  const auto it = impl_->index.find(id);
  if (it == impl_->index.end()) return std::nullopt;
  return it->second;
}

std::optional<std::span<const float>> EmbeddingStore::get(std::string_view id) const {
  const auto r = row_of(id);
  if (!r) return std::nullopt;
  return row(*r);
}

}  // namespace densedex
