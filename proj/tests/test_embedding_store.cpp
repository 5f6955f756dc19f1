#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <limits>
#include <random>

#include "densedex/embedding_store.hpp"
#include "densedex/error.hpp"
#include "densedex/rng.hpp"
#include "test_util.hpp"

using namespace densedex;
using test::TempDir;

namespace {

VectorSource source_from(std::vector<VectorRecord> records) {
  auto next = std::make_shared<size_t>(0);
  auto data = std::make_shared<std::vector<VectorRecord>>(std::move(records));
  return [next, data]() -> std::optional<VectorRecord> {
    if (*next == data->size()) return std::nullopt;
    return (*data)[(*next)++];
  };
}

std::vector<VectorRecord> random_records(std::mt19937_64& rng, size_t count, uint32_t dim) {
  std::vector<VectorRecord> records;
  records.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    std::vector<float> v(dim);
    for (auto& x : v) x = static_cast<float>(uniform_in(rng, -2.0, 2.0));
    records.emplace_back("id" + std::to_string(i), std::move(v));
  }
  return records;
}

}  // namespace

TEST_CASE("two-vector store has the documented size") {
  TempDir dir;
  const auto path = dir.file("s.ddex");
  const auto summary = build_store(
      source_from({{"a", {1.f, 2.f, 3.f, 4.f}}, {"b", {5.f, 6.f, 7.f, 8.f}}}), 4, path);
  CHECK(summary.count == 2);
  // header 20 + 2*4 floats + id table (4+1)*2 + crc 4
  const uint64_t expected = 20 + 2 * 4 * 4 + (4 + 1) * 2 + 4;
  CHECK(summary.bytes == expected);
  CHECK(std::filesystem::file_size(path) == expected);
}

TEST_CASE("empty stream builds a valid empty store") {
  TempDir dir;
  const auto path = dir.file("s.ddex");
  const auto summary = build_store(source_from({}), 8, path);
  CHECK(summary.count == 0);
  const EmbeddingStore store = EmbeddingStore::open(path);
  CHECK(store.count() == 0);
  CHECK(store.dim() == 8);
  CHECK_FALSE(store.get("anything").has_value());
}

TEST_CASE("wrong-length vector names the offending id") {
  TempDir dir;
  try {
    build_store(source_from({{"ok", {1.f, 2.f, 3.f, 4.f}}, {"bad", {1.f, 2.f, 3.f}}}), 4,
                dir.file("s.ddex"));
    FAIL("expected dim mismatch");
  } catch (const DataError& e) {
    CHECK(e.kind() == ErrKind::DimMismatch);
    CHECK(std::string(e.what()).find("id=bad") != std::string::npos);
  }
  CHECK_FALSE(std::filesystem::exists(dir.file("s.ddex")));  // no partial artifact
}

TEST_CASE("duplicate id rejected") {
  TempDir dir;
  try {
    build_store(source_from({{"x", {1.f}}, {"x", {2.f}}}), 1, dir.file("s.ddex"));
    FAIL("expected duplicate error");
  } catch (const DataError& e) {
    CHECK(e.kind() == ErrKind::DuplicateId);
  }
}

TEST_CASE("non-finite vector values rejected") {
  TempDir dir;
  const float inf = std::numeric_limits<float>::infinity();
  const float nan = std::numeric_limits<float>::quiet_NaN();
  for (const float bad : {inf, -inf, nan}) {
    try {
      build_store(source_from({{"x", {1.f, bad}}}), 2, dir.file("s.ddex"));
      FAIL("expected numeric error");
    } catch (const DataError& e) {
      CHECK(e.kind() == ErrKind::Numeric);
    }
  }
}

TEST_CASE("round trip is bit-exact for random matrices") {
  std::mt19937_64 rng(11);
  TempDir dir;
  for (int iter = 0; iter < 5; ++iter) {
    const uint32_t dim = 1 + static_cast<uint32_t>(uniform_index(rng, 96));
    const size_t count = 1 + uniform_index(rng, 200);
    const auto records = random_records(rng, count, dim);
    const auto path = dir.file("s" + std::to_string(iter) + ".ddex");
    build_store(source_from(records), dim, path);

    const EmbeddingStore store = EmbeddingStore::open(path);
    REQUIRE(store.count() == count);
    REQUIRE(store.dim() == dim);
    for (const auto& [id, vec] : records) {
      const auto got = store.get(id);
      REQUIRE(got.has_value());
      CHECK(std::memcmp(got->data(), vec.data(), sizeof(float) * dim) == 0);
    }
  }
}

TEST_CASE("get is absent for unknown ids and stable across calls") {
  TempDir dir;
  const auto path = dir.file("s.ddex");
  build_store(source_from({{"a", {1.f, 0.f}}, {"b", {0.f, 1.f}}}), 2, path);
  const EmbeddingStore store = EmbeddingStore::open(path);
  CHECK_FALSE(store.get("missing").has_value());
  const auto first = store.get("a");
  const auto second = store.get("a");
  REQUIRE(first.has_value());
  REQUIRE(second.has_value());
  CHECK(first->data() == second->data());  // same mapped bytes
}

TEST_CASE("open rejects damaged files with distinct kinds") {
  TempDir dir;
  const auto path = dir.file("s.ddex");
  std::mt19937_64 rng(5);
  build_store(source_from(random_records(rng, 10, 4)), 4, path);
  const std::string good = test::read_text(path);

  const auto write_variant = [&](std::string bytes) {
    test::write_text(path, bytes);
  };

  SUBCASE("wrong magic") {
    std::string bad = good;
    bad[0] = 'X';
    write_variant(bad);
    try {
      EmbeddingStore::open(path);
      FAIL("expected magic error");
    } catch (const DataError& e) {
      CHECK(e.kind() == ErrKind::BadMagic);
      CHECK(std::string(e.what()).find("not a densedex store") != std::string::npos);
    }
  }
  SUBCASE("wrong version") {
    std::string bad = good;
    bad[4] = 9;
    write_variant(bad);
    try {
      EmbeddingStore::open(path);
      FAIL("expected version error");
    } catch (const DataError& e) {
      CHECK(e.kind() == ErrKind::BadVersion);
    }
  }
  SUBCASE("truncated") {
    write_variant(good.substr(0, good.size() / 2));
    try {
      EmbeddingStore::open(path);
      FAIL("expected truncation error");
    } catch (const DataError& e) {
      CHECK(e.kind() == ErrKind::Truncated);
      CHECK(std::string(e.what()).find("unexpected EOF") != std::string::npos);
    }
  }
  SUBCASE("flipped byte in the vector block") {
    std::string bad = good;
    bad[24] = static_cast<char>(bad[24] ^ 0x40);
    write_variant(bad);
    try {
      EmbeddingStore::open(path);
      FAIL("expected checksum error");
    } catch (const DataError& e) {
      CHECK(e.kind() == ErrKind::BadChecksum);
    }
  }
}

TEST_CASE("in-memory store behaves like an opened one") {
  const EmbeddingStore store =
      EmbeddingStore::from_vectors({"a", "b", "c"}, {1.f, 0.f, 0.f, 1.f, 0.5f, 0.5f}, 2);
  CHECK(store.count() == 3);
  CHECK(store.row_of("c") == 2);
  CHECK((*store.get("b"))[1] == 1.f);
}
