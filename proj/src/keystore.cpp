#include "qds/keystore.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qds/errors.hpp"

namespace qds {

namespace {

std::string now_iso8601() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

void KeyStore::add(const QkdKey& key) {
  std::lock_guard lock(mutex_);
  if (find_locked(key.key_id)) {
    throw Error("KeyStore: duplicate key id " + key.key_id);
  }
  entries_.push_back({key, false, now_iso8601()});
}

std::optional<KeyStore::Entry> KeyStore::get(const std::string& key_id) const {
  std::lock_guard lock(mutex_);
  if (const Entry* e = find_locked(key_id)) return *e;
  return std::nullopt;
}

QkdKey KeyStore::take_for_signature(const std::string& key_id) {
  std::lock_guard lock(mutex_);
  Entry* e = find_locked(key_id);
  if (!e) throw Error("KeyStore: unknown key id " + key_id);
  if (e->consumed) {
    throw KeyConsumedError("KeyStore: key " + key_id +
                           " was already used for a signature");
  }
  e->consumed = true;
  return e->key;
}

std::vector<KeyStore::Entry> KeyStore::list() const {
  std::lock_guard lock(mutex_);
  return entries_;
}

std::size_t KeyStore::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::string KeyStore::to_json() const {
  std::lock_guard lock(mutex_);
  nlohmann::json arr = nlohmann::json::array();
  for (const Entry& e : entries_) {
    arr.push_back({{"key_id", e.key.key_id},
                   {"link", e.key.link},
                   {"l_bits", e.key.length_bits()},
                   {"bits_hex", e.key.bits.to_hex()},
                   {"consumed", e.consumed},
                   {"created_at", e.created_at}});
  }
  return arr.dump(2);
}

KeyStore KeyStore::from_json(const std::string& text) {
  nlohmann::json arr = nlohmann::json::parse(text);
  if (!arr.is_array()) throw Error("KeyStore: expected a JSON array");
  std::vector<Entry> entries;
  for (const auto& item : arr) {
    Entry e;
    e.key.key_id = item.at("key_id").get<std::string>();
    e.key.link = item.at("link").get<std::string>();
    e.key.bits = BitString::from_hex(item.at("bits_hex").get<std::string>());
    if (e.key.length_bits() != item.at("l_bits").get<std::uint32_t>()) {
      throw Error("KeyStore: l_bits disagrees with bits_hex for " +
                  e.key.key_id);
    }
    e.consumed = item.at("consumed").get<bool>();
    e.created_at = item.value("created_at", "");
    entries.push_back(std::move(e));
  }
  return KeyStore(std::move(entries));
}

void KeyStore::save(const std::string& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("KeyStore: cannot open " + path + " for writing");
  out << to_json() << '\n';
}

KeyStore KeyStore::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("KeyStore: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

KeyStore::Entry* KeyStore::find_locked(const std::string& key_id) {
  for (Entry& e : entries_) {
    if (e.key.key_id == key_id) return &e;
  }
  return nullptr;
}

const KeyStore::Entry* KeyStore::find_locked(const std::string& key_id) const {
  for (const Entry& e : entries_) {
    if (e.key.key_id == key_id) return &e;
  }
  return nullptr;
}

}  // namespace qds
