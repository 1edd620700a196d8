#include "qds/bitstring.hpp"

#include <stdexcept>

#include "qds/errors.hpp"

namespace qds {

namespace {

int hex_nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

BitString BitString::zeros(std::size_t n_bits) {
  BitString out;
  out.n_bits_ = n_bits;
  out.bytes_.assign((n_bits + 7) / 8, 0);
  return out;
}

BitString BitString::from_bytes(std::span<const std::uint8_t> data) {
  return from_bytes(data, data.size() * 8);
}

BitString BitString::from_bytes(std::span<const std::uint8_t> data,
                                std::size_t n_bits) {
  if (n_bits > data.size() * 8) {
    throw Error("BitString: bit length exceeds supplied data");
  }
  BitString out;
  out.n_bits_ = n_bits;
  out.bytes_.assign(data.begin(), data.begin() + (n_bits + 7) / 8);
  out.clear_padding();
  return out;
}

BitString BitString::from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) {
    throw Error("BitString: hex string must have even length");
  }
  std::vector<std::uint8_t> bytes;
  bytes.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    int hi = hex_nibble(hex[i]);
    int lo = hex_nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) {
      throw Error("BitString: invalid hex character");
    }
    bytes.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
  }
  return from_bytes(bytes);
}

BitString BitString::from_bit_chars(std::string_view bits) {
  BitString out = zeros(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') {
      out.set_bit(i, true);
    } else if (bits[i] != '0') {
      throw Error("BitString: invalid bit character");
    }
  }
  return out;
}

bool BitString::bit(std::size_t i) const {
  if (i >= n_bits_) throw std::out_of_range("BitString::bit");
  return (bytes_[i / 8] >> (7 - i % 8)) & 1;
}

void BitString::set_bit(std::size_t i, bool value) {
  if (i >= n_bits_) throw std::out_of_range("BitString::set_bit");
  std::uint8_t mask = static_cast<std::uint8_t>(1u << (7 - i % 8));
  if (value) {
    bytes_[i / 8] |= mask;
  } else {
    bytes_[i / 8] &= static_cast<std::uint8_t>(~mask);
  }
}

void BitString::flip_bit(std::size_t i) { set_bit(i, !bit(i)); }

void BitString::flip_all() {
  for (auto& b : bytes_) b = static_cast<std::uint8_t>(~b);
  clear_padding();
}

BitString BitString::slice(std::size_t offset, std::size_t len) const {
  if (offset + len > n_bits_) {
    throw std::out_of_range("BitString::slice");
  }
  if (offset % 8 == 0) {
    // Common case: protocol geometry keeps everything byte aligned.
    return from_bytes(
        std::span(bytes_).subspan(offset / 8, (len + 7) / 8), len);
  }
  BitString out = zeros(len);
  for (std::size_t i = 0; i < len; ++i) {
    out.set_bit(i, bit(offset + i));
  }
  return out;
}

void BitString::append(const BitString& other) {
  if (n_bits_ % 8 == 0) {
    bytes_.insert(bytes_.end(), other.bytes_.begin(), other.bytes_.end());
    n_bits_ += other.n_bits_;
    return;
  }
  std::size_t base = n_bits_;
  n_bits_ += other.n_bits_;
  bytes_.resize((n_bits_ + 7) / 8, 0);
  for (std::size_t i = 0; i < other.n_bits_; ++i) {
    set_bit(base + i, other.bit(i));
  }
}

std::string BitString::to_hex() const {
  if (!byte_aligned()) {
    throw Error("BitString: to_hex requires byte alignment");
  }
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(bytes_.size() * 2);
  for (std::uint8_t b : bytes_) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0x0f]);
  }
  return out;
}

std::string BitString::to_bit_chars() const {
  std::string out;
  out.reserve(n_bits_);
  for (std::size_t i = 0; i < n_bits_; ++i) {
    out.push_back(bit(i) ? '1' : '0');
  }
  return out;
}

BitString operator^(const BitString& a, const BitString& b) {
  if (a.n_bits_ != b.n_bits_) {
    throw LengthMismatchError("XOR operands differ in bit length");
  }
  BitString out = a;
  for (std::size_t i = 0; i < out.bytes_.size(); ++i) {
    out.bytes_[i] ^= b.bytes_[i];
  }
  // Both operands carry zero padding, so the result does too.
  return out;
}

void BitString::clear_padding() {
  std::size_t tail = n_bits_ % 8;
  if (tail != 0 && !bytes_.empty()) {
    bytes_.back() &= static_cast<std::uint8_t>(0xff << (8 - tail));
  }
}

}  // namespace qds
