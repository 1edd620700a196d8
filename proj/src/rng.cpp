#include "qds/rng.hpp"

#include <stdexcept>

namespace qds {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

Rng Rng::derive(std::string_view label) const {
  return Rng(splitmix64(seed_ ^ fnv1a64(label)));
}

Rng Rng::derive(std::uint64_t index) const {
  return Rng(splitmix64(seed_ ^ splitmix64(index + 0x51ed2701554a9b0dULL)));
}

std::uint64_t Rng::next_u64() { return engine_(); }

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("Rng::below: zero bound");
  // Rejection sampling keeps the draw unbiased and portable.
  std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t v;
  do {
    v = next_u64();
  } while (v >= limit);
  return v % bound;
}

bool Rng::next_bool() { return next_u64() & 1; }

std::vector<std::uint8_t> Rng::bytes(std::size_t n) {
  std::vector<std::uint8_t> out(n);
  std::size_t i = 0;
  while (i + 8 <= n) {
    std::uint64_t w = next_u64();
    for (int b = 0; b < 8; ++b) {
      out[i + b] = static_cast<std::uint8_t>(w >> (56 - 8 * b));
    }
    i += 8;
  }
  if (i < n) {
    std::uint64_t w = next_u64();
    for (int b = 0; i < n; ++i, ++b) {
      out[i] = static_cast<std::uint8_t>(w >> (56 - 8 * b));
    }
  }
  return out;
}

BitString Rng::bits(std::size_t n_bits) {
  auto raw = bytes((n_bits + 7) / 8);
  return BitString::from_bytes(raw, n_bits);
}

}  // namespace qds
