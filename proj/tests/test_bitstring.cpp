#include <doctest.h>

#include "qds/bitstring.hpp"
#include "qds/errors.hpp"
#include "qds/rng.hpp"

using qds::BitString;

TEST_CASE("bit-level construction and access") {
  BitString b = BitString::from_bit_chars("10110");
  CHECK(b.size_bits() == 5);
  CHECK(b.bit(0));
  CHECK_FALSE(b.bit(1));
  CHECK(b.bit(2));
  CHECK(b.bit(3));
  CHECK_FALSE(b.bit(4));
  CHECK_FALSE(b.byte_aligned());
  CHECK(b.to_bit_chars() == "10110");
}

TEST_CASE("hex round trip") {
  BitString b = BitString::from_hex("deadbeef");
  CHECK(b.size_bits() == 32);
  CHECK(b.to_hex() == "deadbeef");
  CHECK_THROWS_AS(BitString::from_hex("xyz"), qds::Error);
  CHECK_THROWS_AS(BitString::from_hex("abc"), qds::Error);
}

TEST_CASE("to_hex requires byte alignment") {
  BitString b = BitString::from_bit_chars("1010101");
  CHECK_THROWS_AS(b.to_hex(), qds::Error);
}

TEST_CASE("slice and append invert each other") {
  qds::Rng rng(7);
  BitString whole = rng.bits(256);
  BitString rebuilt;
  for (size_t off = 0; off < 256; off += 32) {
    rebuilt.append(whole.slice(off, 32));
  }
  CHECK(rebuilt == whole);
}

TEST_CASE("slice at unaligned offsets") {
  BitString b = BitString::from_bit_chars("110100111");
  CHECK(b.slice(2, 4).to_bit_chars() == "0100");
  CHECK(b.slice(5, 4).to_bit_chars() == "0111");
}

TEST_CASE("xor checks lengths and is an involution") {
  qds::Rng rng(11);
  BitString a = rng.bits(64);
  BitString k = rng.bits(64);
  CHECK(((a ^ k) ^ k) == a);
  BitString shorter = rng.bits(32);
  CHECK_THROWS_AS(a ^ shorter, qds::LengthMismatchError);
}

TEST_CASE("padding bits stay zero so equality is structural") {
  BitString a = BitString::from_bit_chars("111");
  BitString b = BitString::from_bytes(std::vector<std::uint8_t>{0xff}, 3);
  CHECK(a == b);
  a.flip_all();
  CHECK(a.to_bit_chars() == "000");
  // flip_all must not contaminate padding; appending stays consistent.
  a.append(BitString::from_bit_chars("11111"));
  CHECK(a.to_bit_chars() == "00011111");
  CHECK(a.byte_aligned());
}

TEST_CASE("flip_bit changes exactly one position") {
  BitString b = BitString::zeros(16);
  b.flip_bit(9);
  for (size_t i = 0; i < 16; ++i) {
    CHECK(b.bit(i) == (i == 9));
  }
}
