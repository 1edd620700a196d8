#include "qds/wire.hpp"

#include <cstring>

#include "qds/errors.hpp"

namespace qds::wire {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  put_u32(out, static_cast<std::uint32_t>(v >> 32));
  put_u32(out, static_cast<std::uint32_t>(v));
}

std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t at) {
  return (static_cast<std::uint32_t>(in[at]) << 24) |
         (static_cast<std::uint32_t>(in[at + 1]) << 16) |
         (static_cast<std::uint32_t>(in[at + 2]) << 8) |
         static_cast<std::uint32_t>(in[at + 3]);
}

std::uint64_t get_u64(std::span<const std::uint8_t> in, std::size_t at) {
  return (static_cast<std::uint64_t>(get_u32(in, at)) << 32) |
         get_u32(in, at + 4);
}

}  // namespace

std::vector<std::uint8_t> encode_tuple(const SignedTuple& tuple) {
  const SignatureBundle& sig = tuple.signature;
  const HashSuiteConfig& suite = sig.suite;
  if (!sig.complete()) {
    throw Error("encode_tuple: only complete signatures travel on the wire");
  }
  if (sig.total_entries() != suite.total_blocks()) {
    throw Error("encode_tuple: bundle entry count disagrees with suite");
  }
  std::size_t digest_bytes = sig.block_digest_len_bits / 8;
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + tuple.message.size() +
              sig.total_entries() * digest_bytes);
  out.insert(out.end(), {'Q', 'D', 'S', '1'});
  out.push_back(kVersion);
  out.push_back(static_cast<std::uint8_t>(suite.message_hash));
  out.push_back(static_cast<std::uint8_t>(suite.block_hash));
  out.push_back(0);  // reserved
  put_u32(out, suite.delta_msg_bits);
  put_u32(out, suite.key_length_l_bits);
  put_u32(out, suite.n_blocks_per_key);
  put_u32(out, sig.block_digest_len_bits);
  put_u64(out, tuple.message.size());
  out.insert(out.end(), tuple.message.begin(), tuple.message.end());
  for (const auto& d : sig.per_block_digests) {
    auto bytes = d->bytes();
    out.insert(out.end(), bytes.begin(), bytes.end());
  }
  return out;
}

SignedTuple decode_tuple(std::span<const std::uint8_t> data) {
  if (data.size() < 4 || std::memcmp(data.data(), "QDS1", 4) != 0) {
    throw DecodeError(DecodeErrorKind::BadMagic, "decode: bad magic");
  }
  if (data.size() < kHeaderBytes) {
    throw DecodeError(DecodeErrorKind::TruncatedPayload,
                      "decode: header truncated");
  }
  if (data[4] != kVersion) {
    throw DecodeError(DecodeErrorKind::UnsupportedVersion,
                      "decode: unsupported version " +
                          std::to_string(data[4]));
  }
  auto msg_alg = hash_algorithm_from_id(data[5]);
  auto blk_alg = hash_algorithm_from_id(data[6]);
  if (!msg_alg || !blk_alg) {
    throw DecodeError(DecodeErrorKind::UnknownAlgorithm,
                      "decode: unknown hash algorithm id");
  }
  std::uint32_t delta_msg = get_u32(data, 8);
  std::uint32_t l_bits = get_u32(data, 12);
  std::uint32_t n = get_u32(data, 16);
  std::uint32_t digest_len_bits = get_u32(data, 20);
  std::uint64_t msg_len = get_u64(data, 24);

  HashSuiteConfig suite;
  suite.message_hash = *msg_alg;
  suite.delta_msg_bits = delta_msg;
  suite.block_hash = *blk_alg;
  suite.delta_blk_bits = is_xof(*blk_alg) ? digest_len_bits : 0;
  suite.n_blocks_per_key = n;
  suite.key_length_l_bits = l_bits;
  try {
    suite.validate();
  } catch (const ConfigError& e) {
    throw DecodeError(DecodeErrorKind::InconsistentLengths,
                      std::string("decode: ") + e.what());
  }
  if (suite.block_digest_bits() != digest_len_bits ||
      digest_len_bits % 8 != 0 || digest_len_bits == 0) {
    throw DecodeError(DecodeErrorKind::InconsistentLengths,
                      "decode: declared block digest length disagrees with "
                      "the block hash");
  }

  if (msg_len > data.size()) {
    throw DecodeError(DecodeErrorKind::TruncatedPayload,
                      "decode: declared message length exceeds payload");
  }
  std::size_t digest_bytes = digest_len_bits / 8;
  std::uint64_t expected =
      kHeaderBytes + msg_len +
      static_cast<std::uint64_t>(2) * n * digest_bytes;
  if (data.size() < expected) {
    throw DecodeError(DecodeErrorKind::TruncatedPayload,
                      "decode: payload shorter than declared lengths");
  }
  if (data.size() > expected) {
    throw DecodeError(DecodeErrorKind::InconsistentLengths,
                      "decode: trailing bytes beyond declared lengths");
  }

  SignedTuple tuple;
  tuple.message.assign(data.begin() + kHeaderBytes,
                       data.begin() + kHeaderBytes + msg_len);
  tuple.signature.suite = suite;
  tuple.signature.block_digest_len_bits = digest_len_bits;
  tuple.signature.per_block_digests.reserve(2 * n);
  std::size_t at = kHeaderBytes + msg_len;
  for (std::uint32_t i = 0; i < 2 * n; ++i) {
    tuple.signature.per_block_digests.emplace_back(
        BitString::from_bytes(data.subspan(at, digest_bytes)));
    at += digest_bytes;
  }
  return tuple;
}

void append_frame(std::vector<std::uint8_t>& out,
                  std::span<const std::uint8_t> frame) {
  if (frame.size() > UINT32_MAX) {
    throw Error("append_frame: frame too large");
  }
  put_u32(out, static_cast<std::uint32_t>(frame.size()));
  out.insert(out.end(), frame.begin(), frame.end());
}

void FrameReader::feed(std::span<const std::uint8_t> data) {
  buffer_.insert(buffer_.end(), data.begin(), data.end());
}

std::optional<std::vector<std::uint8_t>> FrameReader::next() {
  if (buffer_.size() < 4) return std::nullopt;
  std::uint32_t len = get_u32(buffer_, 0);
  if (buffer_.size() < 4 + static_cast<std::size_t>(len)) return std::nullopt;
  std::vector<std::uint8_t> frame(buffer_.begin() + 4,
                                  buffer_.begin() + 4 + len);
  buffer_.erase(buffer_.begin(), buffer_.begin() + 4 + len);
  return frame;
}

}  // namespace qds::wire
