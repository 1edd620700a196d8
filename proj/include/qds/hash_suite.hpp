#ifndef QDS_HASH_SUITE_HPP
#define QDS_HASH_SUITE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "qds/bitstring.hpp"

namespace qds {

// NIST-approved hash functions usable by the scheme. SHA-1 is deliberately
// not representable.
enum class HashAlgorithm : std::uint8_t {
  Sha2_224 = 1,
  Sha2_256 = 2,
  Sha2_384 = 3,
  Sha2_512 = 4,
  Sha3_224 = 5,
  Sha3_256 = 6,
  Sha3_384 = 7,
  Sha3_512 = 8,
  Shake128 = 9,
  Shake256 = 10,
};

bool is_xof(HashAlgorithm alg);
// Digest length of a fixed-output algorithm, in bits. Throws for XOFs.
unsigned digest_bits(HashAlgorithm alg);
std::string to_string(HashAlgorithm alg);
// Accepts names like "sha2-256", "SHA3-512", "shake-128", "shake256".
std::optional<HashAlgorithm> parse_hash_algorithm(std::string_view name);
std::optional<HashAlgorithm> hash_algorithm_from_id(std::uint8_t id);

// Resistance strengths in bits. Second-preimage strength is a range for the
// SHA-2 family entries whose strength depends on input size.
struct StrengthTriple {
  unsigned collision_bits = 0;
  unsigned preimage_bits = 0;
  unsigned second_preimage_lo_bits = 0;
  unsigned second_preimage_hi_bits = 0;

  // Overall strength is the weakest of the three resistances.
  unsigned overall_bits() const;
  bool operator==(const StrengthTriple&) const = default;
};

// Fixed-output hash of byte-aligned data. Rejects XOF algorithms.
BitString digest(HashAlgorithm alg, const BitString& data);

// SHAKE expansion of byte-aligned data to exactly delta_bits of output.
// Rejects fixed-output algorithms and delta_bits == 0.
BitString xof_expand(HashAlgorithm alg, const BitString& data,
                     std::size_t delta_bits);

// One-time-pad encryption: element-by-element XOR. An involution.
BitString otp_encrypt(const BitString& key, const BitString& payload);

// Strength table lookup. delta_bits is required iff alg is a SHAKE variant.
StrengthTriple strength_lookup(HashAlgorithm alg,
                               std::optional<unsigned> delta_bits = {});

}  // namespace qds

#endif  // QDS_HASH_SUITE_HPP
