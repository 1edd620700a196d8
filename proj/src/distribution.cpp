#include "qds/distribution.hpp"

#include <algorithm>
#include <numeric>

#include "qds/errors.hpp"

namespace qds {

BitString BlockPartition::join() const {
  BitString out;
  for (const auto& b : blocks) out.append(b);
  return out;
}

Permutation::Permutation(std::vector<std::uint32_t> mapping)
    : map_(std::move(mapping)) {
  std::vector<bool> seen(map_.size(), false);
  for (std::uint32_t v : map_) {
    if (v < 1 || v > map_.size() || seen[v - 1]) {
      throw Error("Permutation: mapping is not a bijection over 1..n");
    }
    seen[v - 1] = true;
  }
}

Permutation Permutation::identity(std::uint32_t n) {
  std::vector<std::uint32_t> m(n);
  std::iota(m.begin(), m.end(), 1u);
  return Permutation(std::move(m));
}

std::uint32_t Permutation::apply(std::uint32_t i) const {
  if (i < 1 || i > map_.size()) throw Error("Permutation: index out of range");
  return map_[i - 1];
}

Permutation Permutation::inverse() const {
  std::vector<std::uint32_t> inv(map_.size());
  for (std::uint32_t i = 0; i < map_.size(); ++i) {
    inv[map_[i] - 1] = i + 1;
  }
  return Permutation(std::move(inv));
}

KnowledgeMask KnowledgeMask::all_known(std::uint32_t total_labels) {
  KnowledgeMask m;
  m.known_.assign(total_labels, true);
  return m;
}

KnowledgeMask KnowledgeMask::none_known(std::uint32_t total_labels) {
  KnowledgeMask m;
  m.known_.assign(total_labels, false);
  return m;
}

bool KnowledgeMask::known(std::uint32_t label) const {
  if (label < 1 || label > known_.size()) {
    throw Error("KnowledgeMask: label out of range");
  }
  return known_[label - 1];
}

void KnowledgeMask::mark_known(std::uint32_t label) {
  if (label < 1 || label > known_.size()) {
    throw Error("KnowledgeMask: label out of range");
  }
  known_[label - 1] = true;
}

std::uint32_t KnowledgeMask::known_count() const {
  return static_cast<std::uint32_t>(
      std::count(known_.begin(), known_.end(), true));
}

std::vector<std::uint32_t> KnowledgeMask::unknown_labels() const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 0; i < known_.size(); ++i) {
    if (!known_[i]) out.push_back(i + 1);
  }
  return out;
}

QkdKey simulate_qkd_link(Rng& rng, std::uint32_t l_bits,
                         const std::string& link) {
  if (l_bits == 0 || l_bits % 8 != 0) {
    throw ConfigError("simulate_qkd_link: key length must be a positive "
                      "multiple of 8 bits");
  }
  QkdKey key;
  key.bits = rng.bits(l_bits);
  key.link = link;
  auto id_bytes = rng.bytes(8);
  key.key_id = link + ":" + BitString::from_bytes(id_bytes).to_hex();
  return key;
}

QkdKey expand_key_xof(const QkdKey& key, HashAlgorithm alg,
                      std::uint32_t delta_bits) {
  if (delta_bits < key.length_bits()) {
    throw ConfigError("expand_key_xof: delta must not shrink the key");
  }
  if (delta_bits % 8 != 0) {
    throw ConfigError("expand_key_xof: delta must be byte aligned");
  }
  QkdKey out;
  out.bits = xof_expand(alg, key.bits, delta_bits);
  out.link = key.link;
  out.key_id = key.key_id + "/x" + std::to_string(delta_bits);
  return out;
}

BlockPartition partition(const QkdKey& key, std::uint32_t n) {
  if (n == 0 || key.length_bits() % n != 0) {
    throw NonDivisibleLengthError(
        "partition: " + std::to_string(key.length_bits()) +
        " bits do not divide into " + std::to_string(n) + " blocks");
  }
  BlockPartition part;
  part.source_key_id = key.key_id;
  part.n_blocks = n;
  part.block_len_bits = key.length_bits() / n;
  part.blocks.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    part.blocks.push_back(key.bits.slice(
        static_cast<std::size_t>(i) * part.block_len_bits,
        part.block_len_bits));
  }
  return part;
}

Permutation random_permutation(std::uint32_t n, Rng& rng) {
  std::vector<std::uint32_t> m(n);
  std::iota(m.begin(), m.end(), 1u);
  for (std::uint32_t i = n; i > 1; --i) {
    std::uint32_t j = static_cast<std::uint32_t>(rng.below(i));
    std::swap(m[i - 1], m[j]);
  }
  return Permutation(std::move(m));
}

ExchangedBlockSet select_exchange_blocks(const BlockPartition& part,
                                         const Permutation& perm) {
  if (perm.n() != part.n_blocks) {
    throw Error("select_exchange_blocks: permutation size does not match "
                "partition");
  }
  if (part.n_blocks % 2 != 0) {
    throw ConfigError("select_exchange_blocks: block count must be even");
  }
  ExchangedBlockSet set;
  set.source_key_id = part.source_key_id;
  std::uint32_t half = part.n_blocks / 2;
  set.entries.reserve(half);
  for (std::uint32_t i = 1; i <= half; ++i) {
    std::uint32_t label = perm.apply(i);
    set.entries.emplace_back(label, part.blocks[label - 1]);
  }
  return set;
}

ExchangeOutcome exchange(const ExchangedBlockSet& verifier1_sends,
                         const ExchangedBlockSet& verifier2_sends,
                         const AuthenticatedChannel& channel) {
  if (!channel.authenticated || !channel.intact) {
    throw ChannelError("exchange: channel failure, distribution aborted");
  }
  if (verifier1_sends.count() != verifier2_sends.count()) {
    throw Error("exchange: block sets disagree on n/2");
  }
  std::uint32_t n = verifier1_sends.count() * 2;
  ExchangeOutcome out;
  out.verifier1_mask = KnowledgeMask::none_known(2 * n);
  out.verifier2_mask = KnowledgeMask::none_known(2 * n);
  // Verifier 1 owns the first key in full; verifier 2 the second.
  for (std::uint32_t label = 1; label <= n; ++label) {
    out.verifier1_mask.mark_known(label);
    out.verifier2_mask.mark_known(n + label);
  }
  for (const auto& [label, bits] : verifier2_sends.entries) {
    out.verifier1_mask.mark_known(n + label);
  }
  for (const auto& [label, bits] : verifier1_sends.entries) {
    out.verifier2_mask.mark_known(label);
  }
  return out;
}

}  // namespace qds
