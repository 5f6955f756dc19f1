#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace densedex {

struct StoreBuildSummary {
  uint64_t count = 0;
  uint64_t bytes = 0;  // final file size
};

using VectorRecord = std::pair<std::string, std::vector<float>>;

// Pull-based source of (id, vector) records; returns nullopt at end.
using VectorSource = std::function<std::optional<VectorRecord>()>;

// Streams records into the on-disk store format (see embedding_store.cpp
// for the layout). Every vector must have exactly `dim` entries and ids
// must be unique. The output path appears atomically.
StoreBuildSummary build_store(VectorSource source, uint32_t dim,
                              const std::filesystem::path& out_path);

// Immutable collection of fixed-dimension f32 vectors keyed by string ids.
// Opened stores serve vectors straight out of a read-only memory map; copies
// of the handle share it, so concurrent readers need no coordination.
class EmbeddingStore {
 public:
  // Verifies magic, version, and the whole-file checksum.
  static EmbeddingStore open(const std::filesystem::path& path);

  // In-memory store; `matrix` is row-major count x dim.
  static EmbeddingStore from_vectors(std::vector<std::string> ids,
                                     std::vector<float> matrix, uint32_t dim);

  uint32_t dim() const;
  uint64_t count() const;

  std::span<const float> row(uint64_t index) const;
  const std::string& id(uint64_t index) const;

  std::optional<uint64_t> row_of(std::string_view id) const;
  std::optional<std::span<const float>> get(std::string_view id) const;

 private:
  struct Impl;
  explicit EmbeddingStore(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

}  // namespace densedex
