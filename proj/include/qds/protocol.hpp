#ifndef QDS_PROTOCOL_HPP
#define QDS_PROTOCOL_HPP

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "qds/keystore.hpp"
#include "qds/signing.hpp"
#include "qds/wire.hpp"

namespace qds::sim {

enum class PartyRole : std::uint8_t { Signer = 0, Verifier1 = 1, Verifier2 = 2 };
enum class Phase : std::uint8_t { Distribution = 0, Exchange = 1, Messaging = 2 };

std::string to_string(PartyRole role);
std::string to_string(Phase phase);

struct Delivery {
  PartyRole from;
  PartyRole to;
  Phase phase;
  std::vector<std::uint8_t> payload;
};

// Abstract inter-party channel. Payloads are delivered intact exactly once.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual void send(const Delivery& delivery) = 0;
  virtual std::optional<Delivery> receive(PartyRole recipient) = 0;
  virtual void close() = 0;
  virtual bool closed() const = 0;
};

// Default transport: per-recipient FIFO queues.
class InMemoryTransport : public Transport {
 public:
  void send(const Delivery& delivery) override;
  std::optional<Delivery> receive(PartyRole recipient) override;
  void close() override { closed_ = true; }
  bool closed() const override { return closed_; }

 private:
  std::map<PartyRole, std::deque<Delivery>> queues_;
  bool closed_ = false;
};

// Length-prefixed framing over per-recipient byte streams. The byte buffers
// stand in for sockets or pipes in a multi-process deployment.
class FramedStreamTransport : public Transport {
 public:
  void send(const Delivery& delivery) override;
  std::optional<Delivery> receive(PartyRole recipient) override;
  void close() override { closed_ = true; }
  bool closed() const override { return closed_; }

  // Raw stream access, e.g. to hand bytes to another process.
  const std::vector<std::uint8_t>& stream_for(PartyRole recipient) const;

 private:
  std::map<PartyRole, std::vector<std::uint8_t>> streams_;
  std::map<PartyRole, std::size_t> read_offsets_;
  bool closed_ = false;
};

struct TranscriptEvent {
  std::uint64_t seq = 0;
  std::string kind;
  nlohmann::json detail;
};

// Ordered event log of one protocol run.
class Transcript {
 public:
  void record(std::string kind, nlohmann::json detail);
  const std::vector<TranscriptEvent>& events() const { return events_; }
  std::size_t count(std::string_view kind) const;
  // Events of a phase delivered to the given role.
  std::size_t deliveries_to(PartyRole role, Phase phase) const;
  nlohmann::json to_json() const;

 private:
  std::vector<TranscriptEvent> events_;
};

// Sends a payload through the transport, enforcing the routing policy: the
// signer must never receive exchange-phase traffic.
Delivery route(PartyRole sender, PartyRole receiver, Phase phase,
               std::vector<std::uint8_t> payload, Transport& transport,
               Transcript& transcript);

// Full run configuration: key sizes, hash suite, thresholds.
struct ProtocolConfig {
  std::uint32_t qkd_l_bits = 256;
  std::uint32_t n_blocks = 32;
  // Optional key expansion applied before block division.
  std::optional<HashAlgorithm> key_expansion_alg;
  std::uint32_t delta_key_bits = 0;
  HashAlgorithm message_hash = HashAlgorithm::Shake256;
  std::uint32_t delta_msg_bits = 0;
  HashAlgorithm block_hash = HashAlgorithm::Sha2_256;
  std::uint32_t delta_blk_bits = 0;
  VerificationThreshold v_b = VerificationThreshold::zero();
  VerificationThreshold v_c = VerificationThreshold::zero();

  std::uint32_t effective_l_bits() const {
    return key_expansion_alg ? delta_key_bits : qkd_l_bits;
  }
  HashSuiteConfig suite() const;
  void validate() const;

  // Recommended instance: 256-bit QKD keys expanded to 1024 bits with
  // SHAKE-256, SHAKE-256 message hash with delta 2048, 32 blocks per key,
  // SHA2-256 block hash.
  static ProtocolConfig defaults();
  // Smallest sensible instance for a given n: one-byte key blocks and a
  // SHAKE-256 message hash sized to match. Used by simulation campaigns.
  static ProtocolConfig compact(std::uint32_t n_blocks);

  nlohmann::json to_json() const;
};

// Signer state machine (Alice).
class SignerMachine {
 public:
  SignerMachine(HashSuiteConfig suite, KeyHalf first, KeyHalf second);

  // Consumes the underlying keys in the store and produces (m, S_a).
  wire::SignedTuple sign_message(std::span<const std::uint8_t> message,
                                 KeyStore& store);

  CombinedKey& combined_key() { return key_; }
  const HashSuiteConfig& suite() const { return suite_; }

 private:
  HashSuiteConfig suite_;
  CombinedKey key_;
};

// Verifier state machine (Bob or Charlie).
class VerifierMachine {
 public:
  VerifierMachine(PartyRole role, HashSuiteConfig suite,
                  VerificationThreshold threshold, KeyHalf first,
                  KeyHalf second);

  VerificationReport process_tuple(const wire::SignedTuple& tuple) const;

  PartyRole role() const { return role_; }
  const HashSuiteConfig& suite() const { return suite_; }
  const VerificationThreshold& threshold() const { return threshold_; }
  CombinedKey& combined_key() { return key_; }
  const CombinedKey& combined_key() const { return key_; }

 private:
  PartyRole role_;
  HashSuiteConfig suite_;
  VerificationThreshold threshold_;
  CombinedKey key_;
};

// Injection points for adversarial behaviour. Attacks are the honest
// machines plus these overrides, so they exercise the same code paths.
struct AttackHooks {
  // Mutates the signer's combined key right before signing.
  std::function<void(CombinedKey&)> corrupt_signer_key;
  // Mutates a verifier's stored key material before it verifies.
  std::function<void(CombinedKey&)> corrupt_verifier1_key;
  std::function<void(CombinedKey&)> corrupt_verifier2_key;
  // Lets verifier 1 substitute the tuple it forwards to verifier 2.
  std::function<wire::SignedTuple(const wire::SignedTuple&,
                                  const VerifierMachine& verifier1)>
      replace_forwarded;
};

struct RunResult {
  Transcript transcript;
  std::optional<VerificationReport> verifier1_report;
  std::optional<VerificationReport> verifier2_report;
  bool aborted = false;

  bool verifier1_accepted() const {
    return verifier1_report && verifier1_report->accepted();
  }
  bool verifier2_accepted() const {
    return verifier2_report && verifier2_report->accepted();
  }
};

// Executes a complete run: distribution, exchange, signing, both
// verifications. All randomness derives from the seed. If verifier 1
// rejects, the run aborts before verifier 2 acts.
RunResult run_protocol(const ProtocolConfig& config,
                       std::span<const std::uint8_t> message,
                       std::uint64_t seed, const AttackHooks& hooks = {},
                       KeyStore* store = nullptr);

// Honest run; returns the transcript (both verdicts are in it).
Transcript run_honest_protocol(const ProtocolConfig& config,
                               std::span<const std::uint8_t> message,
                               std::uint64_t seed);

}  // namespace qds::sim

#endif  // QDS_PROTOCOL_HPP
