#include <doctest.h>

#include <cstdio>
#include <string>

#include "qds/errors.hpp"
#include "qds/keystore.hpp"

using namespace qds;

namespace {

QkdKey make_key(std::uint64_t seed, const std::string& link) {
  Rng rng(seed);
  return simulate_qkd_link(rng, 128, link);
}

}  // namespace

TEST_CASE("keys are single-use") {
  KeyStore store;
  QkdKey key = make_key(1, "alice-bob");
  store.add(key);
  CHECK_FALSE(store.get(key.key_id)->consumed);

  QkdKey taken = store.take_for_signature(key.key_id);
  CHECK(taken.bits == key.bits);
  CHECK(store.get(key.key_id)->consumed);
  CHECK_THROWS_AS(store.take_for_signature(key.key_id), KeyConsumedError);
}

TEST_CASE("duplicate ids and unknown ids are rejected") {
  KeyStore store;
  QkdKey key = make_key(2, "alice-bob");
  store.add(key);
  CHECK_THROWS_AS(store.add(key), Error);
  CHECK_THROWS_AS(store.take_for_signature("nope"), Error);
  CHECK_FALSE(store.get("nope").has_value());
}

TEST_CASE("json round trip preserves bits and consumed flags") {
  KeyStore store;
  store.add(make_key(3, "alice-bob"));
  QkdKey second = make_key(4, "alice-charlie");
  store.add(second);
  store.take_for_signature(second.key_id);

  KeyStore restored = KeyStore::from_json(store.to_json());
  REQUIRE(restored.size() == 2);
  auto entry = restored.get(second.key_id);
  REQUIRE(entry.has_value());
  CHECK(entry->consumed);
  CHECK(entry->key.bits == second.bits);
  CHECK(entry->key.link == "alice-charlie");
}

TEST_CASE("file save and load") {
  std::string path = "keystore_test_tmp.json";
  {
    KeyStore store;
    store.add(make_key(5, "alice-bob"));
    store.save(path);
  }
  KeyStore loaded = KeyStore::load(path);
  CHECK(loaded.size() == 1);
  std::remove(path.c_str());
}
