#include <doctest.h>

#include <cstdint>
#include <vector>

#include "dslad/dsl/type_traits.hpp"
#include "dslad/tape/chunked_stream.hpp"

using dslad::ByteStream;
using dslad::ChunkedStream;
using dslad::TapeCorrupted;

TEST_CASE("entries pop in reverse order across chunk boundaries") {
  ChunkedStream<std::uint32_t> s(4);
  for (std::uint32_t i = 0; i < 11; ++i) {
    s.push(i);
  }
  CHECK(s.size() == 11);
  CHECK(s.chunkCount() == 3);
  std::vector<std::uint32_t> seen;
  s.forEach([&](std::uint32_t v) { seen.push_back(v); });
  REQUIRE(seen.size() == 11);
  CHECK(seen.front() == 0);
  CHECK(seen.back() == 10);
  for (std::uint32_t i = 11; i-- > 0;) {
    CHECK(s.pop("test") == i);
  }
  CHECK(s.empty());
  CHECK_THROWS_AS(s.pop("test"), TapeCorrupted);
}

TEST_CASE("clear keeps the allocated chunks") {
  ChunkedStream<double> s(8);
  for (int i = 0; i < 20; ++i) {
    s.push(i);
  }
  const auto allocated = s.allocatedBytes();
  s.clear();
  CHECK(s.size() == 0);
  CHECK(s.usedBytes() == 0);
  CHECK(s.allocatedBytes() == allocated);
  for (int i = 0; i < 20; ++i) {
    s.push(i);
  }
  CHECK(s.allocatedBytes() == allocated);
  CHECK(s.pop("test") == 19.0);
}

TEST_CASE("blocks are never split") {
  ChunkedStream<std::byte> s(10);
  s.pushBlock(7);
  s.pushBlock(7);
  CHECK(s.chunkCount() == 2);
  s.pushBlock(25);
  CHECK(s.chunkCount() == 3);
  CHECK(s.usedBytes() == 39);
  s.popBlock(25, "test");
  s.popBlock(7, "test");
  s.popBlock(7, "test");
  CHECK(s.empty());
}

TEST_CASE("byte stream round trips mixed objects") {
  ByteStream b(16);
  b.pushTrivial(1.5);
  b.pushTrivial(std::int32_t{-3});
  b.pushTrivial(2.5f);
  CHECK(b.objects() == 3);
  CHECK(b.usedBytes() == 16);
  CHECK(b.popTrivial<float>("test") == 2.5f);
  CHECK(b.popTrivial<std::int32_t>("test") == -3);
  CHECK(b.popTrivial<double>("test") == 1.5);
  CHECK(b.objects() == 0);
  CHECK_THROWS_AS(b.popTrivial<double>("test"), TapeCorrupted);
}

TEST_CASE("constant codec for a fixed-size type") {
  ByteStream b;
  dslad::ConstantCodec<double>::push(b, 4.0);
  CHECK(b.usedBytes() == sizeof(double));
  CHECK(dslad::ConstantCodec<double>::pop(b, "test") == 4.0);
  CHECK(dslad::ConstantCodec<double>::toBytes(1.0).size() == sizeof(double));
}
