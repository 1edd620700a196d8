#ifndef QDS_BITSTRING_HPP
#define QDS_BITSTRING_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qds {

// Ordered sequence of bits with an exact bit length. Storage is byte-packed,
// MSB-first within each byte; pad bits in the last byte are kept zero so that
// equality and hashing can work on the raw bytes.
class BitString {
 public:
  BitString() = default;

  static BitString zeros(std::size_t n_bits);
  static BitString from_bytes(std::span<const std::uint8_t> data);
  static BitString from_bytes(std::span<const std::uint8_t> data,
                              std::size_t n_bits);
  static BitString from_hex(std::string_view hex);
  // Parses "1011"-style literals; handy in tests.
  static BitString from_bit_chars(std::string_view bits);

  std::size_t size_bits() const { return n_bits_; }
  bool empty() const { return n_bits_ == 0; }
  bool byte_aligned() const { return n_bits_ % 8 == 0; }
  std::size_t size_bytes() const { return bytes_.size(); }

  bool bit(std::size_t i) const;
  void set_bit(std::size_t i, bool value);
  void flip_bit(std::size_t i);
  void flip_all();

  // Bits [offset, offset + len).
  BitString slice(std::size_t offset, std::size_t len) const;
  void append(const BitString& other);

  // Raw packed bytes (pad bits zero).
  std::span<const std::uint8_t> bytes() const { return bytes_; }

  // Lowercase hex; requires byte alignment.
  std::string to_hex() const;
  std::string to_bit_chars() const;

  friend BitString operator^(const BitString& a, const BitString& b);
  bool operator==(const BitString&) const = default;

 private:
  std::vector<std::uint8_t> bytes_;
  std::size_t n_bits_ = 0;

  void clear_padding();
};

}  // namespace qds

#endif  // QDS_BITSTRING_HPP
