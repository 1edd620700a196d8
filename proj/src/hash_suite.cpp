#include "qds/hash_suite.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cctype>

#include "qds/errors.hpp"

namespace qds {

bool is_xof(HashAlgorithm alg) {
  return alg == HashAlgorithm::Shake128 || alg == HashAlgorithm::Shake256;
}

unsigned digest_bits(HashAlgorithm alg) {
  switch (alg) {
    case HashAlgorithm::Sha2_224:
    case HashAlgorithm::Sha3_224:
      return 224;
    case HashAlgorithm::Sha2_256:
    case HashAlgorithm::Sha3_256:
      return 256;
    case HashAlgorithm::Sha2_384:
    case HashAlgorithm::Sha3_384:
      return 384;
    case HashAlgorithm::Sha2_512:
    case HashAlgorithm::Sha3_512:
      return 512;
    case HashAlgorithm::Shake128:
    case HashAlgorithm::Shake256:
      throw Error("digest_bits: XOF output length is caller-chosen");
  }
  throw Error("digest_bits: unknown algorithm");
}

std::string to_string(HashAlgorithm alg) {
  switch (alg) {
    case HashAlgorithm::Sha2_224: return "sha2-224";
    case HashAlgorithm::Sha2_256: return "sha2-256";
    case HashAlgorithm::Sha2_384: return "sha2-384";
    case HashAlgorithm::Sha2_512: return "sha2-512";
    case HashAlgorithm::Sha3_224: return "sha3-224";
    case HashAlgorithm::Sha3_256: return "sha3-256";
    case HashAlgorithm::Sha3_384: return "sha3-384";
    case HashAlgorithm::Sha3_512: return "sha3-512";
    case HashAlgorithm::Shake128: return "shake-128";
    case HashAlgorithm::Shake256: return "shake-256";
  }
  return "unknown";
}

std::optional<HashAlgorithm> parse_hash_algorithm(std::string_view name) {
  std::string s;
  s.reserve(name.size());
  for (char c : name) {
    if (c == '_' || c == '-') continue;
    s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (s == "sha2224" || s == "sha224") return HashAlgorithm::Sha2_224;
  if (s == "sha2256" || s == "sha256") return HashAlgorithm::Sha2_256;
  if (s == "sha2384" || s == "sha384") return HashAlgorithm::Sha2_384;
  if (s == "sha2512" || s == "sha512") return HashAlgorithm::Sha2_512;
  if (s == "sha3224") return HashAlgorithm::Sha3_224;
  if (s == "sha3256") return HashAlgorithm::Sha3_256;
  if (s == "sha3384") return HashAlgorithm::Sha3_384;
  if (s == "sha3512") return HashAlgorithm::Sha3_512;
  if (s == "shake128") return HashAlgorithm::Shake128;
  if (s == "shake256") return HashAlgorithm::Shake256;
  return std::nullopt;
}

std::optional<HashAlgorithm> hash_algorithm_from_id(std::uint8_t id) {
  if (id >= 1 && id <= 10) return static_cast<HashAlgorithm>(id);
  return std::nullopt;
}

unsigned StrengthTriple::overall_bits() const {
  return std::min({collision_bits, preimage_bits, second_preimage_lo_bits});
}

namespace {

const EVP_MD* evp_md(HashAlgorithm alg) {
  switch (alg) {
    case HashAlgorithm::Sha2_224: return EVP_sha224();
    case HashAlgorithm::Sha2_256: return EVP_sha256();
    case HashAlgorithm::Sha2_384: return EVP_sha384();
    case HashAlgorithm::Sha2_512: return EVP_sha512();
    case HashAlgorithm::Sha3_224: return EVP_sha3_224();
    case HashAlgorithm::Sha3_256: return EVP_sha3_256();
    case HashAlgorithm::Sha3_384: return EVP_sha3_384();
    case HashAlgorithm::Sha3_512: return EVP_sha3_512();
    case HashAlgorithm::Shake128: return EVP_shake128();
    case HashAlgorithm::Shake256: return EVP_shake256();
  }
  return nullptr;
}

struct MdCtx {
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  ~MdCtx() { EVP_MD_CTX_free(ctx); }
  MdCtx() = default;
  MdCtx(const MdCtx&) = delete;
  MdCtx& operator=(const MdCtx&) = delete;
};

void require_byte_aligned(const BitString& data, const char* op) {
  if (!data.byte_aligned()) {
    throw Error(std::string(op) + ": input must be byte aligned");
  }
}

}  // namespace

BitString digest(HashAlgorithm alg, const BitString& data) {
  if (is_xof(alg)) {
    throw Error("digest: " + to_string(alg) +
                " requires an explicit output length; use xof_expand");
  }
  require_byte_aligned(data, "digest");
  MdCtx md;
  unsigned char out[EVP_MAX_MD_SIZE];
  unsigned out_len = 0;
  if (!md.ctx || EVP_DigestInit_ex(md.ctx, evp_md(alg), nullptr) != 1 ||
      EVP_DigestUpdate(md.ctx, data.bytes().data(), data.size_bytes()) != 1 ||
      EVP_DigestFinal_ex(md.ctx, out, &out_len) != 1) {
    throw Error("digest: OpenSSL failure for " + to_string(alg));
  }
  return BitString::from_bytes(std::span(out, out_len));
}

BitString xof_expand(HashAlgorithm alg, const BitString& data,
                     std::size_t delta_bits) {
  if (!is_xof(alg)) {
    throw Error("xof_expand: " + to_string(alg) + " is not an XOF");
  }
  if (delta_bits == 0) {
    throw Error("xof_expand: delta must be positive");
  }
  require_byte_aligned(data, "xof_expand");
  std::size_t out_bytes = (delta_bits + 7) / 8;
  std::vector<std::uint8_t> out(out_bytes);
  MdCtx md;
  if (!md.ctx || EVP_DigestInit_ex(md.ctx, evp_md(alg), nullptr) != 1 ||
      EVP_DigestUpdate(md.ctx, data.bytes().data(), data.size_bytes()) != 1 ||
      EVP_DigestFinalXOF(md.ctx, out.data(), out_bytes) != 1) {
    throw Error("xof_expand: OpenSSL failure for " + to_string(alg));
  }
  return BitString::from_bytes(out, delta_bits);
}

BitString otp_encrypt(const BitString& key, const BitString& payload) {
  if (key.size_bits() != payload.size_bits()) {
    throw LengthMismatchError(
        "otp_encrypt: key length " + std::to_string(key.size_bits()) +
        " != payload length " + std::to_string(payload.size_bits()));
  }
  return key ^ payload;
}

StrengthTriple strength_lookup(HashAlgorithm alg,
                               std::optional<unsigned> delta_bits) {
  if (is_xof(alg)) {
    if (!delta_bits) {
      throw Error("strength_lookup: delta required for " + to_string(alg));
    }
    unsigned cap = alg == HashAlgorithm::Shake128 ? 128 : 256;
    unsigned d = *delta_bits;
    unsigned cr = std::min(d / 2, cap);
    unsigned pr = std::min(d, cap);
    return {cr, pr, pr, pr};
  }
  if (delta_bits) {
    throw Error("strength_lookup: delta only applies to SHAKE variants");
  }
  switch (alg) {
    case HashAlgorithm::Sha2_224: return {112, 224, 201, 224};
    case HashAlgorithm::Sha2_256: return {128, 256, 201, 256};
    case HashAlgorithm::Sha2_384: return {192, 384, 384, 384};
    case HashAlgorithm::Sha2_512: return {256, 512, 394, 512};
    case HashAlgorithm::Sha3_224: return {112, 224, 224, 224};
    case HashAlgorithm::Sha3_256: return {128, 256, 256, 256};
    case HashAlgorithm::Sha3_384: return {192, 384, 384, 384};
    case HashAlgorithm::Sha3_512: return {256, 512, 512, 512};
    default: break;
  }
  throw Error("strength_lookup: unknown algorithm");
}

}  // namespace qds
