#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "qds/distribution.hpp"
#include "qds/errors.hpp"

using namespace qds;

TEST_CASE("qkd link is reproducible under a fixed seed") {
  Rng a(1234), b(1234);
  QkdKey k1 = simulate_qkd_link(a, 256, "alice-bob");
  QkdKey k2 = simulate_qkd_link(b, 256, "alice-bob");
  CHECK(k1.bits == k2.bits);
  CHECK(k1.key_id == k2.key_id);
  CHECK(k1.length_bits() == 256);
}

TEST_CASE("different links give independent streams (chi-square)") {
  Rng base(99);
  Rng ra = base.derive("link:alice-bob");
  Rng rb = base.derive("link:alice-charlie");
  const size_t nbits = 100000;
  BitString a = ra.bits(nbits);
  BitString b = rb.bits(nbits);
  // Pair counts over (bit_a, bit_b); uniformity across the 4 cells.
  double counts[4] = {0, 0, 0, 0};
  for (size_t i = 0; i < nbits; ++i) {
    counts[(a.bit(i) ? 2 : 0) + (b.bit(i) ? 1 : 0)] += 1;
  }
  double expected = nbits / 4.0;
  double chi2 = 0;
  for (double c : counts) {
    chi2 += (c - expected) * (c - expected) / expected;
  }
  // Critical value for 3 degrees of freedom at p = 0.001.
  CHECK(chi2 < 16.266);
}

TEST_CASE("qkd link validates length") {
  Rng rng(1);
  CHECK_THROWS_AS(simulate_qkd_link(rng, 0, "x"), ConfigError);
  CHECK_THROWS_AS(simulate_qkd_link(rng, 12, "x"), ConfigError);
}

TEST_CASE("partition splits and join restores") {
  Rng rng(7);
  QkdKey key = simulate_qkd_link(rng, 1024, "alice-bob");
  BlockPartition part = partition(key, 32);
  CHECK(part.n_blocks == 32);
  CHECK(part.block_len_bits == 32);
  CHECK(part.blocks.size() == 32);
  CHECK(part.join() == key.bits);

  BlockPartition whole = partition(key, 1);
  CHECK(whole.blocks.size() == 1);
  CHECK(whole.blocks[0] == key.bits);

  CHECK_THROWS_AS(partition(key, 3), NonDivisibleLengthError);
}

TEST_CASE("xof expansion enlarges the key deterministically") {
  Rng rng(21);
  QkdKey key = simulate_qkd_link(rng, 256, "alice-bob");
  QkdKey big = expand_key_xof(key, HashAlgorithm::Shake256, 1024);
  CHECK(big.length_bits() == 1024);
  CHECK(expand_key_xof(key, HashAlgorithm::Shake256, 1024).bits == big.bits);
  QkdKey same = expand_key_xof(key, HashAlgorithm::Shake256, 256);
  CHECK(same.length_bits() == 256);
  CHECK_THROWS_AS(expand_key_xof(big, HashAlgorithm::Shake256, 256),
                  ConfigError);
}

TEST_CASE("permutation type enforces bijectivity") {
  CHECK_THROWS_AS(Permutation({1, 1, 3}), Error);
  CHECK_THROWS_AS(Permutation({0, 1}), Error);
  CHECK_THROWS_AS(Permutation({1, 4}), Error);
  Permutation p({3, 1, 4, 2});
  CHECK(p.apply(1) == 3);
  CHECK(p.apply(2) == 1);
  Permutation inv = p.inverse();
  for (std::uint32_t i = 1; i <= 4; ++i) {
    CHECK(inv.apply(p.apply(i)) == i);
  }
}

TEST_CASE("random permutation covers S_2") {
  Rng rng(5);
  std::set<std::vector<std::uint32_t>> seen;
  for (int i = 0; i < 64; ++i) {
    seen.insert(random_permutation(2, rng).mapping());
  }
  CHECK(seen.size() == 2);
}

TEST_CASE("random permutation position frequencies, n = 8") {
  Rng rng(31);
  const int draws = 100000;
  std::vector<int> label1_at(8, 0);
  for (int i = 0; i < draws; ++i) {
    Permutation p = random_permutation(8, rng);
    for (std::uint32_t pos = 1; pos <= 8; ++pos) {
      if (p.apply(pos) == 1) {
        ++label1_at[pos - 1];
        break;
      }
    }
  }
  double expected = draws / 8.0;
  double sigma = std::sqrt(draws * (1.0 / 8) * (7.0 / 8));
  for (int c : label1_at) {
    CHECK(std::abs(c - expected) < 3 * sigma);
  }
}

TEST_CASE("random permutation uniform over all n! permutations, n <= 5") {
  for (std::uint32_t n : {3u, 4u, 5u}) {
    CAPTURE(n);
    Rng rng(1000 + n);
    const int draws = 100000;
    std::map<std::vector<std::uint32_t>, int> counts;
    for (int i = 0; i < draws; ++i) {
      ++counts[random_permutation(n, rng).mapping()];
    }
    std::uint32_t factorial = 1;
    for (std::uint32_t i = 2; i <= n; ++i) factorial *= i;
    CHECK(counts.size() == factorial);
    double p = 1.0 / factorial;
    double expected = draws * p;
    double sigma = std::sqrt(draws * p * (1 - p));
    for (const auto& [perm, c] : counts) {
      CHECK(std::abs(c - expected) < 4 * sigma);
    }
  }
}

TEST_CASE("select_exchange_blocks picks the first n/2 images") {
  Rng rng(3);
  QkdKey key = simulate_qkd_link(rng, 32, "alice-bob");
  BlockPartition part = partition(key, 4);

  ExchangedBlockSet under_identity =
      select_exchange_blocks(part, Permutation::identity(4));
  REQUIRE(under_identity.count() == 2);
  CHECK(under_identity.entries[0].first == 1);
  CHECK(under_identity.entries[1].first == 2);

  ExchangedBlockSet under_p =
      select_exchange_blocks(part, Permutation({3, 1, 4, 2}));
  REQUIRE(under_p.count() == 2);
  CHECK(under_p.entries[0].first == 3);
  CHECK(under_p.entries[1].first == 1);
  CHECK(under_p.entries[0].second == part.blocks[2]);
  CHECK(under_p.entries[1].second == part.blocks[0]);

  CHECK_THROWS_AS(select_exchange_blocks(part, Permutation::identity(6)),
                  Error);
}

TEST_CASE("exchange builds the verifier masks") {
  Rng rng(77);
  QkdKey k1 = simulate_qkd_link(rng, 64, "alice-bob");
  QkdKey k2 = simulate_qkd_link(rng, 64, "alice-charlie");
  BlockPartition p1 = partition(k1, 8);
  BlockPartition p2 = partition(k2, 8);
  Permutation gb = random_permutation(8, rng);
  Permutation gc = random_permutation(8, rng);
  ExchangedBlockSet bob_sends = select_exchange_blocks(p1, gb);
  ExchangedBlockSet charlie_sends = select_exchange_blocks(p2, gc);

  ExchangeOutcome out = exchange(bob_sends, charlie_sends, {});
  CHECK(out.verifier1_mask.known_count() == 12);  // 3n/2 with n = 8
  CHECK(out.verifier2_mask.known_count() == 12);
  CHECK(out.verifier1_mask.unknown_labels().size() == 4);
  CHECK(out.verifier2_mask.unknown_labels().size() == 4);

  // Verifier 1's unknown labels are exactly the complement of the exchanged
  // labels within the second key's half.
  std::set<std::uint32_t> received;
  for (const auto& [label, bits] : charlie_sends.entries) {
    received.insert(label);
  }
  for (std::uint32_t label : out.verifier1_mask.unknown_labels()) {
    CHECK(label > 8);
    CHECK(received.count(label - 8) == 0);
  }

  AuthenticatedChannel broken{.authenticated = true, .intact = false};
  CHECK_THROWS_AS(exchange(bob_sends, charlie_sends, broken), ChannelError);
}
