#ifndef QDS_KEYSTORE_HPP
#define QDS_KEYSTORE_HPP

#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "qds/distribution.hpp"

namespace qds {

// In-memory key store with JSON persistence. One-time-pad security requires
// single use, so retrieval-for-signing and the consumed flag are one atomic
// step.
class KeyStore {
 public:
  struct Entry {
    QkdKey key;
    bool consumed = false;
    std::string created_at;  // ISO 8601, informational only
  };

  // Registers a fresh key; rejects duplicate ids.
  void add(const QkdKey& key);

  std::optional<Entry> get(const std::string& key_id) const;

  // Atomically marks the key consumed and returns it. Throws
  // KeyConsumedError on reuse, Error if the id is unknown.
  QkdKey take_for_signature(const std::string& key_id);

  std::vector<Entry> list() const;
  std::size_t size() const;

  // JSON array of {key_id, link, l_bits, bits_hex, consumed, created_at}.
  std::string to_json() const;
  static KeyStore from_json(const std::string& text);

  void save(const std::string& path) const;
  static KeyStore load(const std::string& path);

  KeyStore() = default;
  explicit KeyStore(std::vector<Entry> entries)
      : entries_(std::move(entries)) {}

 private:
  mutable std::mutex mutex_;
  std::vector<Entry> entries_;

  Entry* find_locked(const std::string& key_id);
  const Entry* find_locked(const std::string& key_id) const;
};

}  // namespace qds

#endif  // QDS_KEYSTORE_HPP
