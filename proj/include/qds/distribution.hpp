#ifndef QDS_DISTRIBUTION_HPP
#define QDS_DISTRIBUTION_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qds/bitstring.hpp"
#include "qds/hash_suite.hpp"
#include "qds/rng.hpp"

namespace qds {

// Symmetric key as delivered by a (simulated) QKD link. Both endpoints of the
// link hold identical bits. One key may back at most one signature.
struct QkdKey {
  BitString bits;
  std::string link;    // party-pair identifier, e.g. "alice-bob"
  std::string key_id;  // opaque, unique per generated key

  std::uint32_t length_bits() const {
    return static_cast<std::uint32_t>(bits.size_bits());
  }
};

// A key split into n equal blocks with fixed public labels B1..Bn.
// blocks[i] holds label i+1.
struct BlockPartition {
  std::string source_key_id;
  std::uint32_t n_blocks = 0;
  std::uint32_t block_len_bits = 0;
  std::vector<BitString> blocks;

  // Concatenation of the blocks in label order (the original key bits).
  BitString join() const;
};

// Bijection over {1..n}.
class Permutation {
 public:
  explicit Permutation(std::vector<std::uint32_t> mapping);
  static Permutation identity(std::uint32_t n);

  std::uint32_t n() const { return static_cast<std::uint32_t>(map_.size()); }
  // Image of i under the permutation; i in 1..n.
  std::uint32_t apply(std::uint32_t i) const;
  Permutation inverse() const;
  const std::vector<std::uint32_t>& mapping() const { return map_; }

  bool operator==(const Permutation&) const = default;

 private:
  std::vector<std::uint32_t> map_;
};

// The n/2 labeled blocks one verifier reveals to the other.
struct ExchangedBlockSet {
  std::string source_key_id;
  std::vector<std::pair<std::uint32_t, BitString>> entries;  // (label, bits)

  std::uint32_t count() const {
    return static_cast<std::uint32_t>(entries.size());
  }
};

// Which of the 2n combined-key labels a party knows. Labels 1..n address the
// first key's blocks, labels n+1..2n the second key's.
class KnowledgeMask {
 public:
  KnowledgeMask() = default;
  static KnowledgeMask all_known(std::uint32_t total_labels);
  static KnowledgeMask none_known(std::uint32_t total_labels);

  std::uint32_t total() const {
    return static_cast<std::uint32_t>(known_.size());
  }
  bool known(std::uint32_t label) const;  // label in 1..total
  void mark_known(std::uint32_t label);
  std::uint32_t known_count() const;
  std::vector<std::uint32_t> unknown_labels() const;

  bool operator==(const KnowledgeMask&) const = default;

 private:
  std::vector<bool> known_;
};

// Simulated classic authenticated and encrypted channel. The flags stand in
// for the properties the real channel would provide.
struct AuthenticatedChannel {
  bool authenticated = true;
  bool intact = true;
};

struct ExchangeOutcome {
  KnowledgeMask verifier1_mask;  // Bob: own key first half, received second
  KnowledgeMask verifier2_mask;  // Charlie: received first half, own second
};

// Draws l_bits of shared randomness for one link. Reproducible under the
// same rng state; distinct links should use rng sub-streams (Rng::derive).
QkdKey simulate_qkd_link(Rng& rng, std::uint32_t l_bits,
                         const std::string& link);

// SHAKE expansion of a key from l to delta bits, applied before block
// division. The caller must retire the original key.
QkdKey expand_key_xof(const QkdKey& key, HashAlgorithm alg,
                      std::uint32_t delta_bits);

// Splits a key into n equal labeled blocks.
BlockPartition partition(const QkdKey& key, std::uint32_t n);

// Uniform random permutation of {1..n} (Fisher-Yates).
Permutation random_permutation(std::uint32_t n, Rng& rng);

// The blocks whose labels are the images of 1..n/2 under the permutation.
ExchangedBlockSet select_exchange_blocks(const BlockPartition& part,
                                         const Permutation& perm);

// Applies the Bob<->Charlie block exchange to both knowledge masks. The
// signer is never a party to this call; routing enforcement lives in the
// protocol simulator.
ExchangeOutcome exchange(const ExchangedBlockSet& verifier1_sends,
                         const ExchangedBlockSet& verifier2_sends,
                         const AuthenticatedChannel& channel);

}  // namespace qds

#endif  // QDS_DISTRIBUTION_HPP
