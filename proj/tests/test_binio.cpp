#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>

#include "densedex/binio.hpp"
#include "densedex/error.hpp"
#include "test_util.hpp"

using namespace densedex;

TEST_CASE("crc32 matches the published check value") {
  const char* check = "123456789";
  CHECK(binio::crc32(check, std::strlen(check)) == 0xCBF43926u);
  CHECK(binio::crc32(nullptr, 0) == 0x00000000u);
}

TEST_CASE("crc32 incremental updates equal one-shot") {
  const std::string data = "the quick brown fox jumps over the lazy dog";
  binio::Crc32 crc;
  crc.update(data.data(), 10);
  crc.update(data.data() + 10, data.size() - 10);
  CHECK(crc.value() == binio::crc32(data.data(), data.size()));
}

TEST_CASE("utf8 validation") {
  CHECK(binio::is_valid_utf8("plain ascii"));
  CHECK(binio::is_valid_utf8("h\xC3\xA9llo"));            // é
  CHECK(binio::is_valid_utf8("\xE2\x82\xAC"));            // €
  CHECK(binio::is_valid_utf8("\xF0\x9F\x98\x80"));        // emoji
  CHECK(binio::is_valid_utf8(""));
  CHECK_FALSE(binio::is_valid_utf8("\xFF"));              // invalid lead
  CHECK_FALSE(binio::is_valid_utf8("\xC3"));              // truncated
  CHECK_FALSE(binio::is_valid_utf8("\xC0\xAF"));          // overlong
  CHECK_FALSE(binio::is_valid_utf8("\xED\xA0\x80"));      // surrogate
  CHECK_FALSE(binio::is_valid_utf8("a\x80z"));            // stray continuation
}

TEST_CASE("atomic file appears only on commit") {
  test::TempDir dir;
  const auto target = dir.file("out.bin");
  {
    binio::AtomicFile file(target);
    file.out() << "data";
    CHECK_FALSE(std::filesystem::exists(target));
  }
  CHECK_FALSE(std::filesystem::exists(target));  // uncommitted -> discarded
  {
    binio::AtomicFile file(target);
    file.out() << "data";
    file.commit();
  }
  CHECK(test::read_text(target) == "data");
}

TEST_CASE("little-endian scalar round trips") {
  test::TempDir dir;
  const auto path = dir.file("scalars.bin");
  {
    std::ofstream os(path, std::ios::binary);
    binio::write_u32(os, 0xDEADBEEFu);
    binio::write_u64(os, 0x0123456789ABCDEFull);
    binio::write_f32(os, 1.5f);
    binio::write_f64(os, -2.25);
  }
  const auto map = binio::MappedFile::open(path);
  REQUIRE(map.size() == 24);
  CHECK(binio::load_u32(map.data()) == 0xDEADBEEFu);
  CHECK(binio::load_u64(map.data() + 4) == 0x0123456789ABCDEFull);
  CHECK(binio::load_f32(map.data() + 12) == 1.5f);
  CHECK(binio::load_f64(map.data() + 16) == -2.25);
}

TEST_CASE("mapped file on missing path throws") {
  CHECK_THROWS_AS(binio::MappedFile::open("/nonexistent/densedex"), DataError);
}
