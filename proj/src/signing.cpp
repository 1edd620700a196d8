#include "qds/signing.hpp"

#include <algorithm>
#include <charconv>

#include "qds/errors.hpp"

namespace qds {

std::uint32_t HashSuiteConfig::message_digest_bits() const {
  return is_xof(message_hash) ? delta_msg_bits : digest_bits(message_hash);
}

std::uint32_t HashSuiteConfig::block_digest_bits() const {
  return is_xof(block_hash) ? delta_blk_bits : digest_bits(block_hash);
}

std::uint32_t HashSuiteConfig::cipher_block_bits() const {
  return message_digest_bits() / total_blocks();
}

void HashSuiteConfig::validate() const {
  if (n_blocks_per_key < 2 || n_blocks_per_key % 2 != 0) {
    throw ConfigError("suite: n must be even and at least 2");
  }
  if (key_length_l_bits == 0 || key_length_l_bits % 8 != 0) {
    throw ConfigError("suite: l must be a positive multiple of 8 bits");
  }
  if (is_xof(message_hash)) {
    if (delta_msg_bits == 0) {
      throw ConfigError("suite: XOF message hash needs a positive delta");
    }
  } else if (delta_msg_bits != 0) {
    throw ConfigError("suite: delta_msg only applies to XOF message hashes");
  }
  if (is_xof(block_hash)) {
    if (delta_blk_bits == 0) {
      throw ConfigError("suite: XOF block hash needs a positive delta");
    }
    if (delta_blk_bits % 8 != 0) {
      throw ConfigError("suite: block digest length must be byte aligned");
    }
  } else if (delta_blk_bits != 0) {
    throw ConfigError("suite: delta_blk only applies to XOF block hashes");
  }
  std::uint32_t d = message_digest_bits();
  if (d != 2 * key_length_l_bits) {
    throw ConfigError("suite: message digest length " + std::to_string(d) +
                      " must equal 2l = " +
                      std::to_string(2 * key_length_l_bits));
  }
  if (key_length_l_bits % n_blocks_per_key != 0 ||
      (key_length_l_bits / n_blocks_per_key) % 8 != 0) {
    throw ConfigError("suite: block boundaries must be byte aligned");
  }
}

KeyHalf KeyHalf::full(const BlockPartition& part) {
  KeyHalf half;
  half.n_blocks = part.n_blocks;
  half.block_len_bits = part.block_len_bits;
  half.source_key_id = part.source_key_id;
  half.blocks.assign(part.blocks.begin(), part.blocks.end());
  return half;
}

KeyHalf KeyHalf::partial(std::uint32_t n_blocks, std::uint32_t block_len_bits,
                         const ExchangedBlockSet& received) {
  KeyHalf half;
  half.n_blocks = n_blocks;
  half.block_len_bits = block_len_bits;
  half.source_key_id = received.source_key_id;
  half.blocks.assign(n_blocks, std::nullopt);
  for (const auto& [label, bits] : received.entries) {
    if (label < 1 || label > n_blocks) {
      throw Error("KeyHalf: exchanged label out of range");
    }
    if (bits.size_bits() != block_len_bits) {
      throw Error("KeyHalf: exchanged block has wrong length");
    }
    half.blocks[label - 1] = bits;
  }
  return half;
}

bool CombinedKey::fully_known() const {
  return std::all_of(blocks.begin(), blocks.end(),
                     [](const auto& b) { return b.has_value(); });
}

KnowledgeMask CombinedKey::mask() const {
  KnowledgeMask m = KnowledgeMask::none_known(total_blocks());
  for (std::uint32_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i]) m.mark_known(i + 1);
  }
  return m;
}

BitString CombinedKey::join() const {
  BitString out;
  for (const auto& b : blocks) {
    if (!b) throw PartialKeyError("CombinedKey: cannot join a partial key");
    out.append(*b);
  }
  return out;
}

CombinedKey combine_keys(const KeyHalf& first, const KeyHalf& second) {
  if (first.n_blocks != second.n_blocks ||
      first.block_len_bits != second.block_len_bits) {
    throw ConfigError("combine_keys: halves disagree on shape");
  }
  CombinedKey key;
  key.block_len_bits = first.block_len_bits;
  key.blocks.reserve(2 * first.n_blocks);
  key.blocks.insert(key.blocks.end(), first.blocks.begin(),
                    first.blocks.end());
  key.blocks.insert(key.blocks.end(), second.blocks.begin(),
                    second.blocks.end());
  key.source_key_ids = {first.source_key_id, second.source_key_id};
  return key;
}

bool SignatureBundle::complete() const {
  return std::all_of(per_block_digests.begin(), per_block_digests.end(),
                     [](const auto& d) { return d.has_value(); });
}

std::size_t SignatureBundle::total_bits() const {
  std::size_t bits = 0;
  for (const auto& d : per_block_digests) {
    if (d) bits += d->size_bits();
  }
  return bits;
}

VerificationThreshold VerificationThreshold::percent(std::uint32_t pct) {
  if (pct > 100) throw ConfigError("threshold: percent above 100");
  return {pct, 100};
}

VerificationThreshold VerificationThreshold::parse(const std::string& text) {
  std::string s = text;
  if (!s.empty() && s.back() == '%') {
    s.pop_back();
    std::uint32_t pct = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), pct);
    if (ec != std::errc() || p != s.data() + s.size()) {
      throw ConfigError("threshold: cannot parse '" + text + "'");
    }
    return percent(pct);
  }
  if (auto slash = s.find('/'); slash != std::string::npos) {
    std::uint32_t num = 0, den = 0;
    auto [p1, e1] = std::from_chars(s.data(), s.data() + slash, num);
    auto [p2, e2] =
        std::from_chars(s.data() + slash + 1, s.data() + s.size(), den);
    if (e1 != std::errc() || e2 != std::errc() || den == 0 || num > den) {
      throw ConfigError("threshold: cannot parse '" + text + "'");
    }
    return {num, den};
  }
  // Decimal in [0, 1]; keep it exact by scaling by a power of ten.
  auto dot = s.find('.');
  std::string digits = dot == std::string::npos ? s : s.substr(0, dot) +
                                                          s.substr(dot + 1);
  std::size_t frac_digits = dot == std::string::npos ? 0 : s.size() - dot - 1;
  if (digits.empty() || frac_digits > 9) {
    throw ConfigError("threshold: cannot parse '" + text + "'");
  }
  std::uint64_t num = 0;
  auto [p, ec] =
      std::from_chars(digits.data(), digits.data() + digits.size(), num);
  if (ec != std::errc() || p != digits.data() + digits.size()) {
    throw ConfigError("threshold: cannot parse '" + text + "'");
  }
  std::uint64_t den = 1;
  for (std::size_t i = 0; i < frac_digits; ++i) den *= 10;
  if (num > den) throw ConfigError("threshold: fraction above 1");
  return {static_cast<std::uint32_t>(num), static_cast<std::uint32_t>(den)};
}

std::uint32_t VerificationThreshold::allowed_mismatches(
    std::uint32_t known_count) const {
  return static_cast<std::uint32_t>(
      static_cast<std::uint64_t>(numerator) * known_count / denominator);
}

double VerificationThreshold::fraction() const {
  return static_cast<double>(numerator) / denominator;
}

std::string VerificationThreshold::to_string() const {
  return std::to_string(numerator) + "/" + std::to_string(denominator);
}

BitString message_digest(const HashSuiteConfig& suite,
                         std::span<const std::uint8_t> message) {
  BitString data = BitString::from_bytes(message);
  if (is_xof(suite.message_hash)) {
    return xof_expand(suite.message_hash, data, suite.delta_msg_bits);
  }
  return digest(suite.message_hash, data);
}

BitString block_digest(const HashSuiteConfig& suite, const BitString& block) {
  if (is_xof(suite.block_hash)) {
    return xof_expand(suite.block_hash, block, suite.delta_blk_bits);
  }
  return digest(suite.block_hash, block);
}

namespace {

// Shared generation pipeline: hash the message, OTP it with the key, hash
// each ciphertext block. Absent key blocks yield absent digests.
SignatureBundle run_pipeline(std::span<const std::uint8_t> message,
                             const CombinedKey& key,
                             const HashSuiteConfig& suite) {
  suite.validate();
  if (key.total_blocks() != suite.total_blocks() ||
      key.block_len_bits != suite.cipher_block_bits()) {
    throw LengthConstraintError(
        "signing: key geometry does not match the suite (2l = d)");
  }
  BitString h = message_digest(suite, message);
  SignatureBundle bundle;
  bundle.suite = suite;
  bundle.block_digest_len_bits = suite.block_digest_bits();
  bundle.per_block_digests.reserve(key.total_blocks());
  std::uint32_t blk = suite.cipher_block_bits();
  for (std::uint32_t i = 0; i < key.total_blocks(); ++i) {
    if (!key.blocks[i]) {
      bundle.per_block_digests.emplace_back(std::nullopt);
      continue;
    }
    BitString h_block = h.slice(static_cast<std::size_t>(i) * blk, blk);
    BitString c_block = otp_encrypt(*key.blocks[i], h_block);
    bundle.per_block_digests.emplace_back(block_digest(suite, c_block));
  }
  return bundle;
}

}  // namespace

SignatureBundle sign(std::span<const std::uint8_t> message,
                     const CombinedKey& key, const HashSuiteConfig& suite) {
  if (!key.fully_known()) {
    throw PartialKeyError("sign: signer key must be fully known");
  }
  return run_pipeline(message, key, suite);
}

SignatureBundle sign_consuming(std::span<const std::uint8_t> message,
                               const CombinedKey& key,
                               const HashSuiteConfig& suite, KeyStore& store) {
  if (!key.fully_known()) {
    throw PartialKeyError("sign: signer key must be fully known");
  }
  for (const std::string& id : key.source_key_ids) {
    store.take_for_signature(id);
  }
  return run_pipeline(message, key, suite);
}

SignatureBundle compute_candidate(std::span<const std::uint8_t> message,
                                  const CombinedKey& key,
                                  const HashSuiteConfig& suite) {
  return run_pipeline(message, key, suite);
}

VerificationReport verify(const SignatureBundle& received,
                          const SignatureBundle& candidate,
                          const VerificationThreshold& threshold) {
  if (received.suite != candidate.suite) {
    throw ConfigError("verify: bundles built under different hash suites "
                      "are incomparable");
  }
  if (received.total_entries() != candidate.total_entries()) {
    throw ConfigError("verify: bundle sizes differ");
  }
  VerificationReport report;
  report.threshold_used = threshold;
  for (std::uint32_t i = 0; i < received.total_entries(); ++i) {
    const auto& rx = received.per_block_digests[i];
    const auto& cand = candidate.per_block_digests[i];
    if (!rx || !cand) {
      ++report.unknowns;
    } else if (*rx == *cand) {
      ++report.matches;
    } else {
      ++report.mismatches;
      report.mismatched_labels.push_back(i + 1);
    }
  }
  std::uint32_t known = report.matches + report.mismatches;
  report.verdict = report.mismatches <= threshold.allowed_mismatches(known)
                       ? Verdict::Accepted
                       : Verdict::Rejected;
  return report;
}

}  // namespace qds
