#include "qds/protocol.hpp"

#include "qds/errors.hpp"
#include "qds/rng.hpp"
#include "qds/wire.hpp"

namespace qds::sim {

std::string to_string(PartyRole role) {
  switch (role) {
    case PartyRole::Signer: return "signer";
    case PartyRole::Verifier1: return "verifier1";
    case PartyRole::Verifier2: return "verifier2";
  }
  return "unknown";
}

std::string to_string(Phase phase) {
  switch (phase) {
    case Phase::Distribution: return "distribution";
    case Phase::Exchange: return "exchange";
    case Phase::Messaging: return "messaging";
  }
  return "unknown";
}

void InMemoryTransport::send(const Delivery& delivery) {
  if (closed_) throw TransportClosedError("transport closed");
  queues_[delivery.to].push_back(delivery);
}

std::optional<Delivery> InMemoryTransport::receive(PartyRole recipient) {
  if (closed_) throw TransportClosedError("transport closed");
  auto& q = queues_[recipient];
  if (q.empty()) return std::nullopt;
  Delivery d = std::move(q.front());
  q.pop_front();
  return d;
}

void FramedStreamTransport::send(const Delivery& delivery) {
  if (closed_) throw TransportClosedError("transport closed");
  std::vector<std::uint8_t> frame;
  frame.reserve(delivery.payload.size() + 3);
  frame.push_back(static_cast<std::uint8_t>(delivery.from));
  frame.push_back(static_cast<std::uint8_t>(delivery.to));
  frame.push_back(static_cast<std::uint8_t>(delivery.phase));
  frame.insert(frame.end(), delivery.payload.begin(), delivery.payload.end());
  wire::append_frame(streams_[delivery.to], frame);
}

std::optional<Delivery> FramedStreamTransport::receive(PartyRole recipient) {
  if (closed_) throw TransportClosedError("transport closed");
  auto& stream = streams_[recipient];
  std::size_t& offset = read_offsets_[recipient];
  wire::FrameReader reader;
  reader.feed(std::span(stream).subspan(offset));
  auto frame = reader.next();
  if (!frame) return std::nullopt;
  offset += 4 + frame->size();
  if (frame->size() < 3) {
    throw Error("framed transport: runt frame");
  }
  Delivery d;
  d.from = static_cast<PartyRole>((*frame)[0]);
  d.to = static_cast<PartyRole>((*frame)[1]);
  d.phase = static_cast<Phase>((*frame)[2]);
  d.payload.assign(frame->begin() + 3, frame->end());
  return d;
}

const std::vector<std::uint8_t>& FramedStreamTransport::stream_for(
    PartyRole recipient) const {
  static const std::vector<std::uint8_t> empty;
  auto it = streams_.find(recipient);
  return it == streams_.end() ? empty : it->second;
}

void Transcript::record(std::string kind, nlohmann::json detail) {
  events_.push_back(
      {static_cast<std::uint64_t>(events_.size()), std::move(kind),
       std::move(detail)});
}

std::size_t Transcript::count(std::string_view kind) const {
  std::size_t n = 0;
  for (const auto& e : events_) {
    if (e.kind == kind) ++n;
  }
  return n;
}

std::size_t Transcript::deliveries_to(PartyRole role, Phase phase) const {
  std::size_t n = 0;
  for (const auto& e : events_) {
    if ((e.kind == "send" || e.kind == "receive") &&
        e.detail.value("to", "") == to_string(role) &&
        e.detail.value("phase", "") == to_string(phase)) {
      ++n;
    }
  }
  return n;
}

nlohmann::json Transcript::to_json() const {
  nlohmann::json events = nlohmann::json::array();
  for (const auto& e : events_) {
    events.push_back(
        {{"seq", e.seq}, {"kind", e.kind}, {"detail", e.detail}});
  }
  return {{"events", events}};
}

Delivery route(PartyRole sender, PartyRole receiver, Phase phase,
               std::vector<std::uint8_t> payload, Transport& transport,
               Transcript& transcript) {
  if (phase == Phase::Exchange && receiver == PartyRole::Signer) {
    throw RoutingError(
        "route: exchange-phase traffic must not reach the signer");
  }
  Delivery delivery{sender, receiver, phase, std::move(payload)};
  transport.send(delivery);
  transcript.record("send", {{"from", to_string(sender)},
                             {"to", to_string(receiver)},
                             {"phase", to_string(phase)},
                             {"bytes", delivery.payload.size()}});
  return delivery;
}

HashSuiteConfig ProtocolConfig::suite() const {
  HashSuiteConfig suite;
  suite.message_hash = message_hash;
  suite.delta_msg_bits = delta_msg_bits;
  suite.block_hash = block_hash;
  suite.delta_blk_bits = delta_blk_bits;
  suite.n_blocks_per_key = n_blocks;
  suite.key_length_l_bits = effective_l_bits();
  return suite;
}

void ProtocolConfig::validate() const {
  if (qkd_l_bits == 0 || qkd_l_bits % 8 != 0) {
    throw ConfigError("config: QKD key length must be a positive multiple "
                      "of 8 bits");
  }
  if (key_expansion_alg) {
    if (!is_xof(*key_expansion_alg)) {
      throw ConfigError("config: key expansion requires a XOF");
    }
    if (delta_key_bits < qkd_l_bits) {
      throw ConfigError("config: key expansion must not shrink the key");
    }
    if (delta_key_bits % 8 != 0) {
      throw ConfigError("config: expanded key length must be byte aligned");
    }
  } else if (delta_key_bits != 0) {
    throw ConfigError("config: delta_key set without an expansion XOF");
  }
  if (v_b.numerator > v_b.denominator || v_c.numerator > v_c.denominator) {
    throw ConfigError("config: thresholds must lie in [0, 1]");
  }
  suite().validate();
}

ProtocolConfig ProtocolConfig::defaults() {
  ProtocolConfig config;
  config.qkd_l_bits = 256;
  config.n_blocks = 32;
  config.key_expansion_alg = HashAlgorithm::Shake256;
  config.delta_key_bits = 1024;
  config.message_hash = HashAlgorithm::Shake256;
  config.delta_msg_bits = 2048;
  config.block_hash = HashAlgorithm::Sha2_256;
  return config;
}

ProtocolConfig ProtocolConfig::compact(std::uint32_t n_blocks) {
  ProtocolConfig config;
  config.qkd_l_bits = n_blocks * 8;
  config.n_blocks = n_blocks;
  config.message_hash = HashAlgorithm::Shake256;
  config.delta_msg_bits = n_blocks * 16;
  config.block_hash = HashAlgorithm::Sha2_256;
  return config;
}

nlohmann::json ProtocolConfig::to_json() const {
  nlohmann::json j{{"l_bits", qkd_l_bits},
                   {"n_blocks", n_blocks},
                   {"message_hash", qds::to_string(message_hash)},
                   {"delta_msg_bits", delta_msg_bits},
                   {"block_hash", qds::to_string(block_hash)},
                   {"delta_blk_bits", delta_blk_bits},
                   {"v_b", v_b.to_string()},
                   {"v_c", v_c.to_string()}};
  if (key_expansion_alg) {
    j["key_expansion"] = qds::to_string(*key_expansion_alg);
    j["delta_key_bits"] = delta_key_bits;
  }
  return j;
}

SignerMachine::SignerMachine(HashSuiteConfig suite, KeyHalf first,
                             KeyHalf second)
    : suite_(std::move(suite)), key_(combine_keys(first, second)) {}

wire::SignedTuple SignerMachine::sign_message(
    std::span<const std::uint8_t> message, KeyStore& store) {
  wire::SignedTuple tuple;
  tuple.message.assign(message.begin(), message.end());
  tuple.signature = sign_consuming(message, key_, suite_, store);
  return tuple;
}

VerifierMachine::VerifierMachine(PartyRole role, HashSuiteConfig suite,
                                 VerificationThreshold threshold,
                                 KeyHalf first, KeyHalf second)
    : role_(role),
      suite_(std::move(suite)),
      threshold_(threshold),
      key_(combine_keys(first, second)) {}

VerificationReport VerifierMachine::process_tuple(
    const wire::SignedTuple& tuple) const {
  // The candidate is always computed under the verifier's own suite; verify
  // rejects tuples whose declared suite disagrees.
  SignatureBundle candidate = compute_candidate(tuple.message, key_, suite_);
  return verify(tuple.signature, candidate, threshold_);
}

namespace {

nlohmann::json report_json(const VerificationReport& report) {
  return {{"matches", report.matches},
          {"mismatches", report.mismatches},
          {"unknowns", report.unknowns},
          {"threshold", report.threshold_used.to_string()},
          {"verdict", report.accepted() ? "accepted" : "rejected"},
          {"mismatched_labels", report.mismatched_labels}};
}

nlohmann::json exchange_set_json(const ExchangedBlockSet& set) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& [label, bits] : set.entries) {
    entries.push_back({{"label", label}, {"bits_hex", bits.to_hex()}});
  }
  return {{"source_key_id", set.source_key_id}, {"entries", entries}};
}

ExchangedBlockSet exchange_set_from_json(const nlohmann::json& j) {
  ExchangedBlockSet set;
  set.source_key_id = j.at("source_key_id").get<std::string>();
  for (const auto& e : j.at("entries")) {
    set.entries.emplace_back(
        e.at("label").get<std::uint32_t>(),
        BitString::from_hex(e.at("bits_hex").get<std::string>()));
  }
  return set;
}

std::vector<std::uint8_t> json_bytes(const nlohmann::json& j) {
  std::string s = j.dump();
  return {s.begin(), s.end()};
}

}  // namespace

RunResult run_protocol(const ProtocolConfig& config,
                       std::span<const std::uint8_t> message,
                       std::uint64_t seed, const AttackHooks& hooks,
                       KeyStore* store) {
  config.validate();
  RunResult result;
  Transcript& log = result.transcript;
  InMemoryTransport transport;
  KeyStore local_store;
  KeyStore& keys = store ? *store : local_store;
  Rng run_rng(seed);

  log.record("config", config.to_json());

  // Distribution phase: one QKD link per verifier.
  Rng rng_b = run_rng.derive("link:alice-verifier1");
  Rng rng_c = run_rng.derive("link:alice-verifier2");
  QkdKey k1 = simulate_qkd_link(rng_b, config.qkd_l_bits, "alice-verifier1");
  QkdKey k2 = simulate_qkd_link(rng_c, config.qkd_l_bits, "alice-verifier2");
  keys.add(k1);
  keys.add(k2);
  log.record("qkd_key", {{"link", k1.link},
                         {"key_id", k1.key_id},
                         {"l_bits", k1.length_bits()}});
  log.record("qkd_key", {{"link", k2.link},
                         {"key_id", k2.key_id},
                         {"l_bits", k2.length_bits()}});

  if (config.key_expansion_alg) {
    QkdKey k1x = expand_key_xof(k1, *config.key_expansion_alg,
                                config.delta_key_bits);
    QkdKey k2x = expand_key_xof(k2, *config.key_expansion_alg,
                                config.delta_key_bits);
    log.record("key_expanded",
               {{"key_id", k1x.key_id},
                {"from_bits", k1.length_bits()},
                {"to_bits", k1x.length_bits()},
                {"alg", qds::to_string(*config.key_expansion_alg)}});
    log.record("key_expanded",
               {{"key_id", k2x.key_id},
                {"from_bits", k2.length_bits()},
                {"to_bits", k2x.length_bits()},
                {"alg", qds::to_string(*config.key_expansion_alg)}});
    k1 = std::move(k1x);
    k2 = std::move(k2x);
    keys.add(k1);
    keys.add(k2);
  }

  BlockPartition p1 = partition(k1, config.n_blocks);
  BlockPartition p2 = partition(k2, config.n_blocks);

  // Exchange phase: fresh independent permutations each run, and the
  // exchanged blocks travel verifier-to-verifier only.
  Rng perm_rng_b = run_rng.derive("perm:verifier1");
  Rng perm_rng_c = run_rng.derive("perm:verifier2");
  Permutation gamma_b = random_permutation(config.n_blocks, perm_rng_b);
  Permutation gamma_c = random_permutation(config.n_blocks, perm_rng_c);
  log.record("permutation",
             {{"party", "verifier1"}, {"mapping", gamma_b.mapping()}});
  log.record("permutation",
             {{"party", "verifier2"}, {"mapping", gamma_c.mapping()}});

  ExchangedBlockSet bob_sends = select_exchange_blocks(p1, gamma_b);
  ExchangedBlockSet charlie_sends = select_exchange_blocks(p2, gamma_c);

  route(PartyRole::Verifier1, PartyRole::Verifier2, Phase::Exchange,
        json_bytes(exchange_set_json(bob_sends)), transport, log);
  route(PartyRole::Verifier2, PartyRole::Verifier1, Phase::Exchange,
        json_bytes(exchange_set_json(charlie_sends)), transport, log);

  auto to_v2 = transport.receive(PartyRole::Verifier2);
  auto to_v1 = transport.receive(PartyRole::Verifier1);
  if (!to_v1 || !to_v2) {
    throw ChannelError("exchange: delivery failed, distribution aborted");
  }
  log.record("receive", {{"from", to_string(to_v2->from)},
                         {"to", to_string(to_v2->to)},
                         {"phase", to_string(to_v2->phase)},
                         {"bytes", to_v2->payload.size()}});
  log.record("receive", {{"from", to_string(to_v1->from)},
                         {"to", to_string(to_v1->to)},
                         {"phase", to_string(to_v1->phase)},
                         {"bytes", to_v1->payload.size()}});

  ExchangedBlockSet v1_received = exchange_set_from_json(nlohmann::json::parse(
      std::string(to_v1->payload.begin(), to_v1->payload.end())));
  ExchangedBlockSet v2_received = exchange_set_from_json(nlohmann::json::parse(
      std::string(to_v2->payload.begin(), to_v2->payload.end())));

  AuthenticatedChannel channel;
  ExchangeOutcome masks = exchange(bob_sends, charlie_sends, channel);
  log.record("exchange_complete",
             {{"verifier1_known", masks.verifier1_mask.known_count()},
              {"verifier2_known", masks.verifier2_mask.known_count()}});

  HashSuiteConfig suite = config.suite();

  SignerMachine alice(suite, KeyHalf::full(p1), KeyHalf::full(p2));
  VerifierMachine bob(
      PartyRole::Verifier1, suite, config.v_b, KeyHalf::full(p1),
      KeyHalf::partial(config.n_blocks, p2.block_len_bits, v1_received));
  VerifierMachine charlie(
      PartyRole::Verifier2, suite, config.v_c,
      KeyHalf::partial(config.n_blocks, p1.block_len_bits, v2_received),
      KeyHalf::full(p2));

  // Messaging phase.
  if (hooks.corrupt_signer_key) {
    hooks.corrupt_signer_key(alice.combined_key());
    log.record("signer_key_corrupted", {});
  }
  wire::SignedTuple tuple = alice.sign_message(message, keys);
  log.record("signature_created",
             {{"message_bytes", tuple.message.size()},
              {"signature_bits", tuple.signature.total_bits()}});

  std::vector<std::uint8_t> encoded = wire::encode_tuple(tuple);
  route(PartyRole::Signer, PartyRole::Verifier1, Phase::Messaging, encoded,
        transport, log);
  auto at_bob = transport.receive(PartyRole::Verifier1);
  log.record("receive", {{"from", to_string(at_bob->from)},
                         {"to", to_string(at_bob->to)},
                         {"phase", to_string(at_bob->phase)},
                         {"bytes", at_bob->payload.size()}});
  wire::SignedTuple bob_tuple = wire::decode_tuple(at_bob->payload);

  if (hooks.corrupt_verifier1_key) {
    hooks.corrupt_verifier1_key(bob.combined_key());
    log.record("verifier_key_corrupted", {{"party", "verifier1"}});
  }
  VerificationReport bob_report = bob.process_tuple(bob_tuple);
  result.verifier1_report = bob_report;
  nlohmann::json bob_verif = report_json(bob_report);
  bob_verif["party"] = "verifier1";
  log.record("verification", bob_verif);
  log.record("verdict", {{"party", "verifier1"},
                         {"accepted", bob_report.accepted()}});

  if (!bob_report.accepted()) {
    result.aborted = true;
    log.record("aborted", {{"after", "verifier1"}});
    return result;
  }

  // Forwarding: verifier 1 passes the tuple on, possibly maliciously.
  wire::SignedTuple forwarded =
      hooks.replace_forwarded ? hooks.replace_forwarded(bob_tuple, bob)
                              : bob_tuple;
  std::vector<std::uint8_t> fwd_encoded = wire::encode_tuple(forwarded);
  route(PartyRole::Verifier1, PartyRole::Verifier2, Phase::Messaging,
        fwd_encoded, transport, log);
  auto at_charlie = transport.receive(PartyRole::Verifier2);
  log.record("receive", {{"from", to_string(at_charlie->from)},
                         {"to", to_string(at_charlie->to)},
                         {"phase", to_string(at_charlie->phase)},
                         {"bytes", at_charlie->payload.size()}});
  wire::SignedTuple charlie_tuple = wire::decode_tuple(at_charlie->payload);

  if (hooks.corrupt_verifier2_key) {
    hooks.corrupt_verifier2_key(charlie.combined_key());
    log.record("verifier_key_corrupted", {{"party", "verifier2"}});
  }
  VerificationReport charlie_report = charlie.process_tuple(charlie_tuple);
  result.verifier2_report = charlie_report;
  nlohmann::json charlie_verif = report_json(charlie_report);
  charlie_verif["party"] = "verifier2";
  log.record("verification", charlie_verif);
  log.record("verdict", {{"party", "verifier2"},
                         {"accepted", charlie_report.accepted()}});
  return result;
}

Transcript run_honest_protocol(const ProtocolConfig& config,
                               std::span<const std::uint8_t> message,
                               std::uint64_t seed) {
  return run_protocol(config, message, seed).transcript;
}

}  // namespace qds::sim
