#ifndef QDS_SIGNING_HPP
#define QDS_SIGNING_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qds/bitstring.hpp"
#include "qds/distribution.hpp"
#include "qds/hash_suite.hpp"
#include "qds/keystore.hpp"

namespace qds {

// Hash configuration for one signature scheme instance. The message digest
// length d must equal 2l so the one-time pad lines up, and all block
// boundaries must fall on byte boundaries.
struct HashSuiteConfig {
  HashAlgorithm message_hash = HashAlgorithm::Shake256;
  std::uint32_t delta_msg_bits = 0;  // required iff message_hash is a XOF
  HashAlgorithm block_hash = HashAlgorithm::Sha2_256;
  std::uint32_t delta_blk_bits = 0;  // required iff block_hash is a XOF
  std::uint32_t n_blocks_per_key = 0;   // n
  std::uint32_t key_length_l_bits = 0;  // l, after any XOF expansion

  std::uint32_t message_digest_bits() const;  // d
  std::uint32_t block_digest_bits() const;
  // Length of each ciphertext block: d / 2n == l / n.
  std::uint32_t cipher_block_bits() const;
  std::uint32_t total_blocks() const { return 2 * n_blocks_per_key; }

  void validate() const;  // throws ConfigError

  bool operator==(const HashSuiteConfig&) const = default;
};

// One key half as seen by a party: either a full partition or the subset of
// blocks learned through the exchange. Unknown blocks are absent, never
// zero-filled.
struct KeyHalf {
  std::uint32_t n_blocks = 0;
  std::uint32_t block_len_bits = 0;
  std::vector<std::optional<BitString>> blocks;
  std::string source_key_id;

  static KeyHalf full(const BlockPartition& part);
  static KeyHalf partial(std::uint32_t n_blocks, std::uint32_t block_len_bits,
                         const ExchangedBlockSet& received);
};

// Concatenated key k_1||k_2 as held by a party. 2n labeled blocks; the first
// n belong to the first key, the last n to the second.
struct CombinedKey {
  std::vector<std::optional<BitString>> blocks;
  std::uint32_t block_len_bits = 0;
  std::vector<std::string> source_key_ids;

  std::uint32_t total_blocks() const {
    return static_cast<std::uint32_t>(blocks.size());
  }
  std::uint32_t total_bits() const {
    return total_blocks() * block_len_bits;
  }
  bool fully_known() const;
  KnowledgeMask mask() const;
  // Concatenated bits; requires a fully known key.
  BitString join() const;
};

CombinedKey combine_keys(const KeyHalf& first, const KeyHalf& second);

// The 2n per-block digests. A signer's bundle is complete; a verifier's
// candidate has absent entries where key material is missing.
struct SignatureBundle {
  std::vector<std::optional<BitString>> per_block_digests;
  std::uint32_t block_digest_len_bits = 0;
  HashSuiteConfig suite;

  std::uint32_t total_entries() const {
    return static_cast<std::uint32_t>(per_block_digests.size());
  }
  bool complete() const;
  // Bit length of a complete bundle: 2n * block_digest_len_bits.
  std::size_t total_bits() const;

  bool operator==(const SignatureBundle&) const = default;
};

enum class Verdict : std::uint8_t { Accepted, Rejected };

// Maximum tolerated fraction of mismatching known blocks, kept as an exact
// rational so the floor rule below never suffers float rounding.
struct VerificationThreshold {
  std::uint32_t numerator = 0;
  std::uint32_t denominator = 1;

  static VerificationThreshold zero() { return {0, 1}; }
  static VerificationThreshold percent(std::uint32_t pct);
  // Parses "0.25", "25%", or "1/4".
  static VerificationThreshold parse(const std::string& text);

  // Accept iff mismatches <= floor(fraction * known_count).
  std::uint32_t allowed_mismatches(std::uint32_t known_count) const;
  double fraction() const;
  std::string to_string() const;

  bool operator==(const VerificationThreshold&) const = default;
};

struct VerificationReport {
  std::uint32_t matches = 0;
  std::uint32_t mismatches = 0;
  std::uint32_t unknowns = 0;
  VerificationThreshold threshold_used;
  Verdict verdict = Verdict::Rejected;
  std::vector<std::uint32_t> mismatched_labels;

  bool accepted() const { return verdict == Verdict::Accepted; }
};

// First pipeline step: the message digest h (fixed hash or XOF at delta_msg).
BitString message_digest(const HashSuiteConfig& suite,
                         std::span<const std::uint8_t> message);

// Last pipeline step: the digest of one ciphertext block.
BitString block_digest(const HashSuiteConfig& suite,
                       const BitString& cipher_block);

// Signature generation: h = H(m); c = k XOR h; per-block digests of c.
// Requires a fully known, geometry-consistent key.
SignatureBundle sign(std::span<const std::uint8_t> message,
                     const CombinedKey& key, const HashSuiteConfig& suite);

// Atomically consumes the key's source entries in the store, then signs.
SignatureBundle sign_consuming(std::span<const std::uint8_t> message,
                               const CombinedKey& key,
                               const HashSuiteConfig& suite, KeyStore& store);

// Same pipeline as sign but tolerates absent key blocks, which yield absent
// digest entries.
SignatureBundle compute_candidate(std::span<const std::uint8_t> message,
                                  const CombinedKey& key,
                                  const HashSuiteConfig& suite);

// Per-label comparison of a received bundle against a locally computed
// candidate. Absent entries count as unknowns.
VerificationReport verify(const SignatureBundle& received,
                          const SignatureBundle& candidate,
                          const VerificationThreshold& threshold);

}  // namespace qds

#endif  // QDS_SIGNING_HPP
