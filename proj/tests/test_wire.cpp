#include <doctest.h>

#include <vector>

#include "qds/errors.hpp"
#include "qds/rng.hpp"
#include "qds/wire.hpp"

using namespace qds;
using wire::SignedTuple;

namespace {

// Property-style generator over valid tuples: random geometry, random
// message, random digests of a consistent size.
SignedTuple random_tuple(Rng& rng) {
  static const HashAlgorithm block_choices[] = {
      HashAlgorithm::Sha2_256, HashAlgorithm::Sha3_256,
      HashAlgorithm::Sha2_512, HashAlgorithm::Shake256};

  SignedTuple t;
  std::uint32_t n = 2 * static_cast<std::uint32_t>(1 + rng.below(8));
  std::uint32_t block_bytes = 1 + static_cast<std::uint32_t>(rng.below(4));
  std::uint32_t l = n * block_bytes * 8;

  HashSuiteConfig suite;
  suite.message_hash = HashAlgorithm::Shake256;
  suite.delta_msg_bits = 2 * l;
  suite.block_hash = block_choices[rng.below(4)];
  if (is_xof(suite.block_hash)) {
    suite.delta_blk_bits = 8 * static_cast<std::uint32_t>(8 + rng.below(64));
  }
  suite.n_blocks_per_key = n;
  suite.key_length_l_bits = l;
  suite.validate();

  t.message = rng.bytes(rng.below(600));
  t.signature.suite = suite;
  t.signature.block_digest_len_bits = suite.block_digest_bits();
  for (std::uint32_t i = 0; i < 2 * n; ++i) {
    t.signature.per_block_digests.emplace_back(
        rng.bits(suite.block_digest_bits()));
  }
  return t;
}

}  // namespace

TEST_CASE("round trip over generated tuples") {
  Rng rng(2024);
  for (int i = 0; i < 300; ++i) {
    SignedTuple t = random_tuple(rng);
    auto encoded = wire::encode_tuple(t);
    SignedTuple back = wire::decode_tuple(encoded);
    REQUIRE(back == t);
  }
}

TEST_CASE("encoding layout") {
  Rng rng(7);
  SignedTuple t = random_tuple(rng);
  auto encoded = wire::encode_tuple(t);
  CHECK(encoded[0] == 'Q');
  CHECK(encoded[1] == 'D');
  CHECK(encoded[2] == 'S');
  CHECK(encoded[3] == '1');
  CHECK(encoded[4] == wire::kVersion);
  std::size_t digest_bytes = t.signature.block_digest_len_bits / 8;
  CHECK(encoded.size() == wire::kHeaderBytes + t.message.size() +
                              t.signature.total_entries() * digest_bytes);
}

TEST_CASE("decode rejects malformed input with structured errors") {
  Rng rng(8);
  SignedTuple t = random_tuple(rng);
  auto good = wire::encode_tuple(t);

  SUBCASE("bad magic") {
    auto bad = good;
    bad[0] = 'X';
    CHECK_THROWS_WITH_AS(wire::decode_tuple(bad), "decode: bad magic",
                         DecodeError);
    try {
      wire::decode_tuple(bad);
    } catch (const DecodeError& e) {
      CHECK(e.kind() == DecodeErrorKind::BadMagic);
    }
  }

  SUBCASE("unsupported version") {
    auto bad = good;
    bad[4] = 9;
    try {
      wire::decode_tuple(bad);
      FAIL("expected DecodeError");
    } catch (const DecodeError& e) {
      CHECK(e.kind() == DecodeErrorKind::UnsupportedVersion);
    }
  }

  SUBCASE("truncation at every boundary class") {
    for (std::size_t cut :
         {std::size_t{2}, std::size_t{16}, good.size() - 1}) {
      try {
        wire::decode_tuple(std::span(good.data(), cut));
        FAIL("expected DecodeError");
      } catch (const DecodeError& e) {
        bool expected = e.kind() == DecodeErrorKind::TruncatedPayload ||
                        e.kind() == DecodeErrorKind::BadMagic;
        CHECK(expected);
      }
    }
  }

  SUBCASE("trailing garbage is inconsistent") {
    auto bad = good;
    bad.push_back(0);
    try {
      wire::decode_tuple(bad);
      FAIL("expected DecodeError");
    } catch (const DecodeError& e) {
      CHECK(e.kind() == DecodeErrorKind::InconsistentLengths);
    }
  }

  SUBCASE("unknown algorithm id") {
    auto bad = good;
    bad[5] = 42;
    try {
      wire::decode_tuple(bad);
      FAIL("expected DecodeError");
    } catch (const DecodeError& e) {
      CHECK(e.kind() == DecodeErrorKind::UnknownAlgorithm);
    }
  }

  SUBCASE("digest count disagreeing with declared n") {
    // Declare a larger n than the digests present.
    auto bad = good;
    std::uint32_t n = t.signature.suite.n_blocks_per_key * 2;
    bad[16] = static_cast<std::uint8_t>(n >> 24);
    bad[17] = static_cast<std::uint8_t>(n >> 16);
    bad[18] = static_cast<std::uint8_t>(n >> 8);
    bad[19] = static_cast<std::uint8_t>(n);
    try {
      wire::decode_tuple(bad);
      FAIL("expected DecodeError");
    } catch (const DecodeError& e) {
      bool expected = e.kind() == DecodeErrorKind::InconsistentLengths ||
                      e.kind() == DecodeErrorKind::TruncatedPayload;
      CHECK(expected);
    }
  }
}

TEST_CASE("incomplete signatures cannot be encoded") {
  Rng rng(9);
  SignedTuple t = random_tuple(rng);
  t.signature.per_block_digests[1] = std::nullopt;
  CHECK_THROWS_AS(wire::encode_tuple(t), Error);
}

TEST_CASE("frame reader splits back-to-back frames") {
  std::vector<std::uint8_t> stream;
  std::vector<std::uint8_t> a{1, 2, 3};
  std::vector<std::uint8_t> b{9, 8};
  wire::append_frame(stream, a);
  wire::append_frame(stream, b);

  wire::FrameReader reader;
  // Feed in awkward chunks to exercise buffering.
  reader.feed(std::span(stream.data(), 5));
  CHECK_FALSE(reader.next().has_value());
  reader.feed(std::span(stream.data() + 5, stream.size() - 5));
  auto first = reader.next();
  auto second = reader.next();
  REQUIRE(first.has_value());
  REQUIRE(second.has_value());
  CHECK(*first == a);
  CHECK(*second == b);
  CHECK_FALSE(reader.next().has_value());
}
