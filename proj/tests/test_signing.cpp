#include <doctest.h>

#include <numeric>
#include <vector>

#include "qds/errors.hpp"
#include "qds/signing.hpp"

using namespace qds;

namespace {

struct Fixture {
  HashSuiteConfig suite;
  BlockPartition p1, p2;
  Permutation gamma_b = Permutation::identity(2);
  Permutation gamma_c = Permutation::identity(2);
  CombinedKey alice_key;   // fully known
  CombinedKey bob_key;     // k_1 full, k'_2 partial
  CombinedKey charlie_key; // k'_1 partial, k_2 full
  std::vector<std::uint8_t> message;
};

Fixture make_fixture(std::uint64_t seed, std::uint32_t l = 64,
                     std::uint32_t n = 8) {
  Fixture f;
  f.suite.message_hash = HashAlgorithm::Shake256;
  f.suite.delta_msg_bits = 2 * l;
  f.suite.block_hash = HashAlgorithm::Sha2_256;
  f.suite.n_blocks_per_key = n;
  f.suite.key_length_l_bits = l;
  f.suite.validate();

  Rng rng(seed);
  Rng rng1 = rng.derive("link:alice-verifier1");
  Rng rng2 = rng.derive("link:alice-verifier2");
  QkdKey k1 = simulate_qkd_link(rng1, l, "alice-verifier1");
  QkdKey k2 = simulate_qkd_link(rng2, l, "alice-verifier2");
  f.p1 = partition(k1, n);
  f.p2 = partition(k2, n);
  Rng pb = rng.derive("perm:verifier1");
  Rng pc = rng.derive("perm:verifier2");
  f.gamma_b = random_permutation(n, pb);
  f.gamma_c = random_permutation(n, pc);

  f.alice_key = combine_keys(KeyHalf::full(f.p1), KeyHalf::full(f.p2));
  f.bob_key = combine_keys(
      KeyHalf::full(f.p1),
      KeyHalf::partial(n, f.p2.block_len_bits,
                       select_exchange_blocks(f.p2, f.gamma_c)));
  f.charlie_key = combine_keys(
      KeyHalf::partial(n, f.p1.block_len_bits,
                       select_exchange_blocks(f.p1, f.gamma_b)),
      KeyHalf::full(f.p2));

  Rng mrng = rng.derive("message");
  f.message = mrng.bytes(48);
  return f;
}

}  // namespace

TEST_CASE("suite validation enforces 2l = d and alignment") {
  HashSuiteConfig suite;
  suite.message_hash = HashAlgorithm::Sha2_512;
  suite.block_hash = HashAlgorithm::Sha2_256;
  suite.n_blocks_per_key = 32;
  suite.key_length_l_bits = 256;
  CHECK_NOTHROW(suite.validate());
  CHECK(suite.message_digest_bits() == 512);
  CHECK(suite.cipher_block_bits() == 8);

  suite.key_length_l_bits = 128;  // d = 512 != 2l
  CHECK_THROWS_AS(suite.validate(), ConfigError);

  suite.key_length_l_bits = 256;
  suite.n_blocks_per_key = 31;  // odd
  CHECK_THROWS_AS(suite.validate(), ConfigError);

  suite.n_blocks_per_key = 64;  // 4-bit blocks, misaligned
  CHECK_THROWS_AS(suite.validate(), ConfigError);

  suite.n_blocks_per_key = 32;
  suite.message_hash = HashAlgorithm::Shake256;
  suite.delta_msg_bits = 0;  // XOF without delta
  CHECK_THROWS_AS(suite.validate(), ConfigError);
}

TEST_CASE("combine_keys shapes and masks") {
  Fixture f = make_fixture(100);
  CHECK(f.alice_key.total_blocks() == 16);
  CHECK(f.alice_key.fully_known());
  CHECK(f.alice_key.total_bits() == 128);  // 2l
  CHECK(f.alice_key.mask().known_count() == 16);

  CHECK(f.bob_key.mask().known_count() == 12);  // 3n/2
  CHECK_FALSE(f.bob_key.fully_known());
  std::uint32_t absent_second_half = 0;
  for (std::uint32_t i = 8; i < 16; ++i) {
    if (!f.bob_key.blocks[i]) ++absent_second_half;
  }
  CHECK(absent_second_half == 4);  // n/2

  CHECK_THROWS_AS(f.bob_key.join(), PartialKeyError);
  BitString both = f.p1.join();
  both.append(f.p2.join());
  CHECK(f.alice_key.join() == both);
}

TEST_CASE("sign produces a complete 2n-entry bundle") {
  Fixture f = make_fixture(101);
  SignatureBundle bundle = sign(f.message, f.alice_key, f.suite);
  CHECK(bundle.total_entries() == 16);
  CHECK(bundle.complete());
  CHECK(bundle.block_digest_len_bits == 256);
  CHECK(bundle.total_bits() == 16 * 256);
  CHECK_THROWS_AS(sign(f.message, f.bob_key, f.suite), PartialKeyError);
}

TEST_CASE("sign is deterministic and message-sensitive") {
  Fixture f = make_fixture(102);
  SignatureBundle a = sign(f.message, f.alice_key, f.suite);
  SignatureBundle b = sign(f.message, f.alice_key, f.suite);
  CHECK(a.per_block_digests == b.per_block_digests);

  auto other = f.message;
  other[0] ^= 0x40;
  SignatureBundle c = sign(other, f.alice_key, f.suite);
  CHECK(a.per_block_digests != c.per_block_digests);
}

TEST_CASE("signing with an all-zero key digests the raw hash blocks") {
  Fixture f = make_fixture(103);
  CombinedKey zero_key = f.alice_key;
  for (auto& block : zero_key.blocks) {
    block = BitString::zeros(zero_key.block_len_bits);
  }
  SignatureBundle bundle = sign(f.message, zero_key, f.suite);
  BitString h = message_digest(f.suite, f.message);
  std::uint32_t blk = f.suite.cipher_block_bits();
  for (std::uint32_t i = 0; i < bundle.total_entries(); ++i) {
    BitString h_block = h.slice(static_cast<std::size_t>(i) * blk, blk);
    CHECK(*bundle.per_block_digests[i] == block_digest(f.suite, h_block));
  }
}

TEST_CASE("candidates carry absences and match the signer where known") {
  Fixture f = make_fixture(104);
  SignatureBundle alice = sign(f.message, f.alice_key, f.suite);
  SignatureBundle full_candidate =
      compute_candidate(f.message, f.alice_key, f.suite);
  CHECK(alice.per_block_digests == full_candidate.per_block_digests);

  SignatureBundle bob = compute_candidate(f.message, f.bob_key, f.suite);
  std::uint32_t absent = 0;
  for (std::uint32_t i = 0; i < bob.total_entries(); ++i) {
    if (!bob.per_block_digests[i]) {
      ++absent;
    } else {
      CHECK(*bob.per_block_digests[i] == *alice.per_block_digests[i]);
    }
  }
  CHECK(absent == 4);  // n/2
}

TEST_CASE("verification tallies and threshold floor rule") {
  Fixture f = make_fixture(105);
  SignatureBundle alice = sign(f.message, f.alice_key, f.suite);
  SignatureBundle bob = compute_candidate(f.message, f.bob_key, f.suite);

  VerificationReport honest =
      verify(alice, bob, VerificationThreshold::zero());
  CHECK(honest.matches == 12);
  CHECK(honest.mismatches == 0);
  CHECK(honest.unknowns == 4);
  CHECK(honest.accepted());

  // One corrupted known entry breaks a zero threshold.
  SignatureBundle tampered = alice;
  tampered.per_block_digests[0]->flip_bit(0);
  VerificationReport broken =
      verify(tampered, bob, VerificationThreshold::zero());
  CHECK(broken.mismatches == 1);
  CHECK(broken.mismatched_labels == std::vector<std::uint32_t>{1});
  CHECK_FALSE(broken.accepted());
}

TEST_CASE("threshold arithmetic matches the floor rule at 25% of 48") {
  VerificationThreshold vb = VerificationThreshold::percent(25);
  CHECK(vb.allowed_mismatches(48) == 12);

  // Direct check of the acceptance inequality on synthetic tallies.
  for (std::uint32_t mism : {12u, 13u}) {
    std::uint32_t matches = 48 - mism;
    bool accepted = mism <= vb.allowed_mismatches(matches + mism);
    CHECK(accepted == (mism == 12));
  }
}

TEST_CASE("threshold parsing") {
  CHECK(VerificationThreshold::parse("0.25") ==
        VerificationThreshold{25, 100});
  CHECK(VerificationThreshold::parse("25%") ==
        VerificationThreshold{25, 100});
  CHECK(VerificationThreshold::parse("1/4") == VerificationThreshold{1, 4});
  CHECK(VerificationThreshold::parse("0") == VerificationThreshold{0, 1});
  CHECK(VerificationThreshold::parse("1") == VerificationThreshold{1, 1});
  CHECK_THROWS_AS(VerificationThreshold::parse("1.5"), ConfigError);
  CHECK_THROWS_AS(VerificationThreshold::parse("5/4"), ConfigError);
  CHECK_THROWS_AS(VerificationThreshold::parse("abc"), ConfigError);
}

TEST_CASE("verify rejects mismatched suites") {
  Fixture f = make_fixture(106);
  SignatureBundle alice = sign(f.message, f.alice_key, f.suite);
  SignatureBundle other = alice;
  other.suite.block_hash = HashAlgorithm::Sha3_256;
  CHECK_THROWS_AS(verify(alice, other, VerificationThreshold::zero()),
                  ConfigError);
}

TEST_CASE("honest completeness across message sizes") {
  Fixture f = make_fixture(107);
  for (std::size_t size : {std::size_t{0}, std::size_t{1}, std::size_t{1024}}) {
    std::vector<std::uint8_t> msg(size, 0xa5);
    SignatureBundle alice = sign(msg, f.alice_key, f.suite);
    SignatureBundle bob = compute_candidate(msg, f.bob_key, f.suite);
    SignatureBundle charlie = compute_candidate(msg, f.charlie_key, f.suite);
    CHECK(verify(alice, bob, VerificationThreshold::zero()).accepted());
    CHECK(verify(alice, charlie, VerificationThreshold::zero()).accepted());
  }
}

TEST_CASE("message sensitivity: tampered messages never verify clean") {
  Fixture f = make_fixture(108, 16, 2);
  Rng rng(555);
  for (int i = 0; i < 1000; ++i) {
    auto m = rng.bytes(8);
    auto other = rng.bytes(8);
    if (m == other) continue;
    SignatureBundle alice = sign(m, f.alice_key, f.suite);
    SignatureBundle candidate = compute_candidate(other, f.bob_key, f.suite);
    VerificationReport report =
        verify(alice, candidate, VerificationThreshold::zero());
    REQUIRE(report.mismatches >= 1);
  }
}

TEST_CASE("positional binding: permuted bundles are rejected") {
  Fixture f = make_fixture(109);
  SignatureBundle alice = sign(f.message, f.alice_key, f.suite);
  SignatureBundle bob = compute_candidate(f.message, f.bob_key, f.suite);

  SignatureBundle shuffled = alice;
  std::rotate(shuffled.per_block_digests.begin(),
              shuffled.per_block_digests.begin() + 1,
              shuffled.per_block_digests.end());
  VerificationReport report =
      verify(shuffled, bob, VerificationThreshold::zero());
  CHECK_FALSE(report.accepted());
}

TEST_CASE("signature bit length is 4nl when block digests have length d") {
  // l = 128, n = 8, d = 256; SHAKE-256 block hash stretched to d bits.
  HashSuiteConfig suite;
  suite.message_hash = HashAlgorithm::Sha2_256;
  suite.block_hash = HashAlgorithm::Shake256;
  suite.delta_blk_bits = 256;
  suite.n_blocks_per_key = 8;
  suite.key_length_l_bits = 128;
  suite.validate();

  Rng rng(41);
  QkdKey k1 = simulate_qkd_link(rng, 128, "a");
  QkdKey k2 = simulate_qkd_link(rng, 128, "b");
  CombinedKey key =
      combine_keys(KeyHalf::full(partition(k1, 8)),
                   KeyHalf::full(partition(k2, 8)));
  std::vector<std::uint8_t> msg{1, 2, 3};
  SignatureBundle bundle = sign(msg, key, suite);
  CHECK(bundle.total_bits() == 4u * 8 * 128);  // 4nl
  CHECK(bundle.total_bits() ==
        bundle.total_entries() * bundle.block_digest_len_bits);
}

TEST_CASE("sign_consuming enforces one-time keys") {
  Fixture f = make_fixture(110);
  KeyStore store;
  Rng rng(110);
  Rng r1 = rng.derive("link:alice-verifier1");
  Rng r2 = rng.derive("link:alice-verifier2");
  QkdKey k1 = simulate_qkd_link(r1, 64, "alice-verifier1");
  QkdKey k2 = simulate_qkd_link(r2, 64, "alice-verifier2");
  store.add(k1);
  store.add(k2);
  CombinedKey key = combine_keys(KeyHalf::full(partition(k1, 8)),
                                 KeyHalf::full(partition(k2, 8)));
  CHECK_NOTHROW(sign_consuming(f.message, key, f.suite, store));
  CHECK_THROWS_AS(sign_consuming(f.message, key, f.suite, store),
                  KeyConsumedError);
}

TEST_CASE("geometry mismatches are length-constraint errors") {
  Fixture f = make_fixture(111);
  HashSuiteConfig wrong = f.suite;
  wrong.n_blocks_per_key = 4;  // key has 8 blocks per half
  CHECK_THROWS_AS(sign(f.message, f.alice_key, wrong),
                  LengthConstraintError);
}
