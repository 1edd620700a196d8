#ifndef QDS_WIRE_HPP
#define QDS_WIRE_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qds/signing.hpp"

namespace qds::wire {

// The (message, signature) tuple as transmitted between parties, together
// with everything a receiver needs to rebuild the suite.
struct SignedTuple {
  std::vector<std::uint8_t> message;
  SignatureBundle signature;

  bool operator==(const SignedTuple&) const = default;
};

inline constexpr std::size_t kHeaderBytes = 32;
inline constexpr std::uint8_t kVersion = 1;

// Fixed big-endian layout:
//   "QDS1" | version u8 | msg-hash id u8 | block-hash id u8 | reserved u8 |
//   delta_msg u32 (bits, 0 if n/a) | l u32 (bits) | n u32 |
//   block-digest-length u32 (bits) | message-length u64 (bytes) |
//   message | 2n block digests in label order
std::vector<std::uint8_t> encode_tuple(const SignedTuple& tuple);

// Returns a fully validated tuple or throws DecodeError; never yields
// partial output.
SignedTuple decode_tuple(std::span<const std::uint8_t> data);

// Length-prefixed framing (u32 frame length + frame) for byte streams.
void append_frame(std::vector<std::uint8_t>& out,
                  std::span<const std::uint8_t> frame);

// Incremental frame extractor for a byte stream arriving in chunks.
class FrameReader {
 public:
  void feed(std::span<const std::uint8_t> data);
  // Next complete frame, if one has fully arrived.
  std::optional<std::vector<std::uint8_t>> next();
  std::size_t buffered_bytes() const { return buffer_.size(); }

 private:
  std::vector<std::uint8_t> buffer_;
};

}  // namespace qds::wire

#endif  // QDS_WIRE_HPP
