#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

namespace densedex::binio {

// All multi-byte integers on disk are little-endian regardless of host order.

void write_u32(std::ostream& os, uint32_t v);
void write_u64(std::ostream& os, uint64_t v);
void write_f32(std::ostream& os, float v);
void write_f64(std::ostream& os, double v);

uint32_t load_u32(const std::byte* p);
uint64_t load_u64(const std::byte* p);
float load_f32(const std::byte* p);
double load_f64(const std::byte* p);

// CRC-32 (reflected, polynomial 0xEDB88320). crc32("123456789") == 0xCBF43926.
class Crc32 {
 public:
  void update(const void* data, size_t len);
  uint32_t value() const { return ~state_; }

 private:
  uint32_t state_ = 0xFFFFFFFFu;
};

uint32_t crc32(const void* data, size_t len);

bool is_valid_utf8(std::string_view s);

// Writes through a sibling temp file; the target path appears only on
// commit(). The temp file is removed if the writer is destroyed uncommitted.
class AtomicFile {
 public:
  explicit AtomicFile(std::filesystem::path final_path);
  ~AtomicFile();

  AtomicFile(const AtomicFile&) = delete;
  AtomicFile& operator=(const AtomicFile&) = delete;

  std::ofstream& out() { return out_; }
  const std::filesystem::path& temp_path() const { return temp_path_; }

  // Flushes and closes the stream; the temp file stays on disk so callers
  // can reopen it for patching before commit().
  void close_stream();
  void commit();

 private:
  std::filesystem::path final_path_;
  std::filesystem::path temp_path_;
  std::ofstream out_;
  bool committed_ = false;
};

// Read-only memory map of a whole file. Move-only.
class MappedFile {
 public:
  MappedFile() = default;
  ~MappedFile();

  MappedFile(MappedFile&& other) noexcept;
  MappedFile& operator=(MappedFile&& other) noexcept;
  MappedFile(const MappedFile&) = delete;
  MappedFile& operator=(const MappedFile&) = delete;

  static MappedFile open(const std::filesystem::path& path);

  const std::byte* data() const { return data_; }
  size_t size() const { return size_; }

 private:
  const std::byte* data_ = nullptr;
  size_t size_ = 0;
};

}  // namespace densedex::binio
