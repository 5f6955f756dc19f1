#include "densedex/binio.hpp"

#include <fcntl.h>
#include <sys/mman.h>
#include <sys/stat.h>
#include <unistd.h>

#include <array>
#include <atomic>
#include <bit>
#include <cerrno>
#include <cstring>
#include <random>
#include <string>

#include "densedex/error.hpp"

namespace densedex::binio {

namespace {

void put_le(std::ostream& os, uint64_t v, int bytes) {
  char buf[8];
  for (int i = 0; i < bytes; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  os.write(buf, bytes);
}

uint64_t get_le(const std::byte* p, int bytes) {
  uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<uint64_t>(std::to_integer<uint8_t>(p[i])) << (8 * i);
  return v;
}

const std::array<uint32_t, 256>& crc_table() {
  static const std::array<uint32_t, 256> table = [] {
    std::array<uint32_t, 256> t{};
    for (uint32_t i = 0; i < 256; ++i) {
      uint32_t c = i;
      for (int bit = 0; bit < 8; ++bit) c = (c & 1) ? (0xEDB88320u ^ (c >> 1)) : (c >> 1);
      t[i] = c;
    }
    return t;
  }();
  return table;
}

}  // namespace

void write_u32(std::ostream& os, uint32_t v) { put_le(os, v, 4); }
void write_u64(std::ostream& os, uint64_t v) { put_le(os, v, 8); }
void write_f32(std::ostream& os, float v) { put_le(os, std::bit_cast<uint32_t>(v), 4); }
void write_f64(std::ostream& os, double v) { put_le(os, std::bit_cast<uint64_t>(v), 8); }

uint32_t load_u32(const std::byte* p) { return static_cast<uint32_t>(get_le(p, 4)); }
uint64_t load_u64(const std::byte* p) { return get_le(p, 8); }
float load_f32(const std::byte* p) { return std::bit_cast<float>(load_u32(p)); }
double load_f64(const std::byte* p) { return std::bit_cast<double>(load_u64(p)); }

void Crc32::update(const void* data, size_t len) {
  const auto* p = static_cast<const uint8_t*>(data);
  const auto& table = crc_table();
  uint32_t c = state_;
  for (size_t i = 0; i < len; ++i) c = table[(c ^ p[i]) & 0xFF] ^ (c >> 8);
  state_ = c;
}

uint32_t crc32(const void* data, size_t len) {
  Crc32 c;
  c.update(data, len);
  return c.value();
}

bool is_valid_utf8(std::string_view s) {
  size_t i = 0;
  const size_t n = s.size();
  while (i < n) {
    const auto b0 = static_cast<uint8_t>(s[i]);
    size_t len;
    uint32_t cp;
    if (b0 < 0x80) {
      ++i;
      continue;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      return false;
    }
    if (i + len > n) return false;
    for (size_t j = 1; j < len; ++j) {
      const auto b = static_cast<uint8_t>(s[i + j]);
      if ((b & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (b & 0x3F);
    }
    // overlong encodings, surrogates, out of range
    if (len == 2 && cp < 0x80) return false;
    if (len == 3 && cp < 0x800) return false;
    if (len == 4 && cp < 0x10000) return false;
    if (cp > 0x10FFFF) return false;
    if (cp >= 0xD800 && cp <= 0xDFFF) return false;
    i += len;
  }
  return true;
}

AtomicFile::AtomicFile(std::filesystem::path final_path)
    : final_path_(std::move(final_path)) {
  static std::atomic<uint64_t> counter{0};
  std::random_device rd;
  const uint64_t tag =
      (static_cast<uint64_t>(rd()) << 32) ^ rd() ^ counter.fetch_add(1);
  temp_path_ = final_path_;
  temp_path_ += ".tmp-" + std::to_string(tag);
  out_.open(temp_path_, std::ios::binary | std::ios::trunc);
  if (!out_) {
    throw DataError(ErrKind::Io, "cannot open for writing: " + temp_path_.string());
  }
}

AtomicFile::~AtomicFile() {
  if (!committed_) {
    if (out_.is_open()) out_.close();
    std::error_code ec;
    std::filesystem::remove(temp_path_, ec);
  }
}

void AtomicFile::close_stream() {
  if (out_.is_open()) {
    out_.flush();
    if (!out_) throw DataError(ErrKind::Io, "write failed: " + temp_path_.string());
    out_.close();
  }
}

void AtomicFile::commit() {
  close_stream();
  std::error_code ec;
  std::filesystem::rename(temp_path_, final_path_, ec);
  if (ec) {
    throw DataError(ErrKind::Io, "rename to " + final_path_.string() + " failed: " + ec.message());
  }
  committed_ = true;
}

MappedFile::~MappedFile() {
  if (data_ != nullptr && size_ > 0) {
    ::munmap(const_cast<std::byte*>(data_), size_);
  }
}

MappedFile::MappedFile(MappedFile&& other) noexcept
    : data_(other.data_), size_(other.size_) {
  other.data_ = nullptr;
  other.size_ = 0;
}

MappedFile& MappedFile::operator=(MappedFile&& other) noexcept {
  if (this != &other) {
    if (data_ != nullptr && size_ > 0) ::munmap(const_cast<std::byte*>(data_), size_);
    data_ = other.data_;
    size_ = other.size_;
    other.data_ = nullptr;
    other.size_ = 0;
  }
  return *this;
}

MappedFile MappedFile::open(const std::filesystem::path& path) {
  const int fd = ::open(path.c_str(), O_RDONLY);
  if (fd < 0) {
    throw DataError(ErrKind::Io, "cannot open " + path.string() + ": " + std::strerror(errno));
  }
  struct stat st {};
  if (::fstat(fd, &st) != 0) {
    const int err = errno;
    ::close(fd);
    throw DataError(ErrKind::Io, "stat failed on " + path.string() + ": " + std::strerror(err));
  }
  MappedFile m;
  m.size_ = static_cast<size_t>(st.st_size);
  if (m.size_ > 0) {
    void* addr = ::mmap(nullptr, m.size_, PROT_READ, MAP_PRIVATE, fd, 0);
    if (addr == MAP_FAILED) {
      const int err = errno;
      ::close(fd);
      throw DataError(ErrKind::Io, "mmap failed on " + path.string() + ": " + std::strerror(err));
    }
    m.data_ = static_cast<const std::byte*>(addr);
  }
  ::close(fd);
  return m;
}

}  // namespace densedex::binio
