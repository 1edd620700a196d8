#include "qds/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "qds/errors.hpp"
#include "qds/rng.hpp"

namespace qds::adversary {

std::string to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::Integrity: return "integrity";
    case AttackKind::ForgeryGuess: return "forgery";
    case AttackKind::ForgeryReuse: return "forgery-reuse";
    case AttackKind::Repudiation: return "repudiation";
    case AttackKind::Dos: return "dos";
  }
  return "unknown";
}

std::optional<AttackKind> parse_attack_kind(std::string_view name) {
  if (name == "integrity") return AttackKind::Integrity;
  if (name == "forgery" || name == "forgery-guess") {
    return AttackKind::ForgeryGuess;
  }
  if (name == "forgery-reuse") return AttackKind::ForgeryReuse;
  if (name == "repudiation") return AttackKind::Repudiation;
  if (name == "dos") return AttackKind::Dos;
  return std::nullopt;
}

namespace {

using sim::PartyRole;

std::vector<std::uint8_t> default_message(std::uint64_t seed) {
  Rng rng = Rng(seed).derive("message");
  return rng.bytes(32);
}

// Deterministic M != m used by forgery scenarios.
std::vector<std::uint8_t> tamper_deterministic(
    std::vector<std::uint8_t> message) {
  if (message.empty()) {
    message.push_back(0x01);
  } else {
    message[0] ^= 0x01;
  }
  return message;
}

// Random single- or multi-bit tampering for integrity trials.
std::vector<std::uint8_t> tamper_random(std::vector<std::uint8_t> message,
                                        Rng& rng) {
  if (message.empty()) {
    message.push_back(static_cast<std::uint8_t>(1 + rng.below(255)));
    return message;
  }
  std::size_t total_bits = message.size() * 8;
  std::size_t flips = 1 + rng.below(std::min<std::uint64_t>(16, total_bits));
  for (std::size_t i = 0; i < flips; ++i) {
    std::size_t bit = rng.below(total_bits);
    message[bit / 8] ^= static_cast<std::uint8_t>(0x80u >> (bit % 8));
  }
  return message;
}

// e distinct labels out of 1..n (partial Fisher-Yates).
std::vector<std::uint32_t> sample_distinct_labels(Rng& rng, std::uint32_t n,
                                                  std::uint32_t e) {
  std::vector<std::uint32_t> labels(n);
  std::iota(labels.begin(), labels.end(), 1u);
  for (std::uint32_t i = 0; i < e; ++i) {
    std::uint32_t j = i + static_cast<std::uint32_t>(rng.below(n - i));
    std::swap(labels[i], labels[j]);
  }
  labels.resize(e);
  return labels;
}

// The same sub-stream derivations the protocol driver performs; attacks and
// campaign trials re-derive state from the run seed through these.
Permutation derive_permutation(std::uint64_t run_seed, const char* label,
                               std::uint32_t n) {
  Rng rng = Rng(run_seed).derive(label);
  return random_permutation(n, rng);
}

QkdKey derive_link_key(std::uint64_t run_seed,
                       const sim::ProtocolConfig& config, const char* label,
                       const char* link) {
  Rng rng = Rng(run_seed).derive(label);
  QkdKey key = simulate_qkd_link(rng, config.qkd_l_bits, link);
  if (config.key_expansion_alg) {
    key = expand_key_xof(key, *config.key_expansion_alg,
                         config.delta_key_bits);
  }
  return key;
}

// Labels of k_2 that verifier 1 learned during the exchange.
std::vector<bool> verifier1_known_k2(const Permutation& gamma_c) {
  std::vector<bool> known(gamma_c.n(), false);
  for (std::uint32_t i = 1; i <= gamma_c.n() / 2; ++i) {
    known[gamma_c.apply(i) - 1] = true;
  }
  return known;
}

std::vector<std::uint32_t> resolve_repudiation_labels(
    const RepudiationPlan& plan, std::uint32_t n, std::uint64_t run_seed) {
  std::uint32_t e = plan.error_block_count;
  if (e < 1 || e > n) {
    throw DomainError("repudiation: e must lie in 1..n");
  }
  if (plan.explicit_labels) {
    auto labels = *plan.explicit_labels;
    std::sort(labels.begin(), labels.end());
    if (labels.size() != e ||
        std::adjacent_find(labels.begin(), labels.end()) != labels.end() ||
        labels.front() < 1 || labels.back() > n) {
      throw DomainError("repudiation: explicit labels must be e distinct "
                        "labels in 1..n");
    }
    return labels;
  }
  if (plan.placement == RepudiationPlan::Placement::Random) {
    Rng rng = Rng(run_seed).derive("attack:repudiation");
    return sample_distinct_labels(rng, n, e);
  }
  // Oracle placements peek at verifier 1's exchange permutation.
  Permutation gamma_c = derive_permutation(run_seed, "perm:verifier2", n);
  std::vector<bool> known = verifier1_known_k2(gamma_c);
  std::vector<std::uint32_t> labels;
  if (plan.placement == RepudiationPlan::Placement::OracleUnknown) {
    for (std::uint32_t l = 1; l <= n && labels.size() < e; ++l) {
      if (!known[l - 1]) labels.push_back(l);
    }
    if (labels.size() < e) {
      throw DomainError("repudiation: cannot place that many errors in "
                        "unknown labels");
    }
  } else {  // OracleHitKnown
    labels.push_back(gamma_c.apply(1));
    for (std::uint32_t l = 1; l <= n && labels.size() < e; ++l) {
      if (l != labels.front()) labels.push_back(l);
    }
  }
  return labels;
}

AttackOutcome outcome_from_run(sim::RunResult&& run, bool success) {
  AttackOutcome outcome;
  if (run.verifier1_report) {
    outcome.verifier1_verdict = run.verifier1_report->verdict;
  }
  if (run.verifier2_report) {
    outcome.verifier2_verdict = run.verifier2_report->verdict;
  }
  outcome.aborted = run.aborted;
  outcome.success = success;
  outcome.transcript = std::move(run.transcript);
  return outcome;
}

}  // namespace

AttackOutcome integrity_attack(const sim::ProtocolConfig& config,
                               std::uint64_t seed) {
  std::vector<std::uint8_t> message = default_message(seed);
  Rng tamper_rng = Rng(seed).derive("attack:integrity");
  sim::AttackHooks hooks;
  hooks.replace_forwarded = [&](const wire::SignedTuple& tuple,
                                const sim::VerifierMachine&) {
    wire::SignedTuple tampered = tuple;
    tampered.message = tamper_random(tampered.message, tamper_rng);
    return tampered;
  };
  sim::RunResult run = sim::run_protocol(config, message, seed, hooks);
  bool success = run.verifier2_accepted();
  return outcome_from_run(std::move(run), success);
}

AttackOutcome forgery_attack(const ForgeryOptions& options,
                             const sim::ProtocolConfig& config,
                             std::uint64_t seed) {
  std::vector<std::uint8_t> message = default_message(seed);
  sim::AttackHooks hooks;
  hooks.replace_forwarded = [&](const wire::SignedTuple& tuple,
                                const sim::VerifierMachine& bob) {
    wire::SignedTuple forged;
    forged.message = tamper_deterministic(tuple.message);
    if (options.reuse_signature) {
      forged.signature = tuple.signature;  // replay of S_a
      return forged;
    }
    CombinedKey guess_key = bob.combined_key();
    if (options.oracle_correct_guess) {
      QkdKey k2 = derive_link_key(seed, config, "link:alice-verifier2",
                                  "alice-verifier2");
      BlockPartition p2 = partition(k2, config.n_blocks);
      for (std::uint32_t i = 0; i < config.n_blocks; ++i) {
        auto& block = guess_key.blocks[config.n_blocks + i];
        if (!block) block = p2.blocks[i];
      }
    } else {
      Rng guess_rng = Rng(seed).derive("attack:forgery");
      for (auto& block : guess_key.blocks) {
        if (!block) block = guess_rng.bits(guess_key.block_len_bits);
      }
    }
    forged.signature = sign(forged.message, guess_key, bob.suite());
    return forged;
  };
  sim::RunResult run = sim::run_protocol(config, message, seed, hooks);
  bool success = run.verifier2_accepted();
  return outcome_from_run(std::move(run), success);
}

AttackOutcome repudiation_attack(const RepudiationPlan& plan,
                                 const sim::ProtocolConfig& config,
                                 std::uint64_t seed) {
  std::uint32_t n = config.n_blocks;
  std::vector<std::uint32_t> labels =
      resolve_repudiation_labels(plan, n, seed);
  std::vector<std::uint8_t> message = default_message(seed);
  sim::AttackHooks hooks;
  // Whole-block corruption: every bit of each chosen k_2 block is flipped,
  // so block-level and bit-level error accounting coincide.
  hooks.corrupt_signer_key = [&labels, n](CombinedKey& key) {
    for (std::uint32_t label : labels) {
      key.blocks[n + label - 1]->flip_all();
    }
  };
  sim::RunResult run = sim::run_protocol(config, message, seed, hooks);
  bool success = run.verifier1_accepted() && run.verifier2_report &&
                 !run.verifier2_report->accepted();
  return outcome_from_run(std::move(run), success);
}

AttackOutcome dos_scenario(const DosPlan& plan,
                           const sim::ProtocolConfig& config,
                           std::uint64_t seed) {
  if (plan.target != PartyRole::Verifier1 &&
      plan.target != PartyRole::Verifier2) {
    throw DomainError("dos: target must be a verifier");
  }
  std::vector<std::uint8_t> message = default_message(seed);
  Rng pick_rng = Rng(seed).derive("attack:dos");
  auto corrupt = [&pick_rng, blocks = plan.corrupt_blocks](CombinedKey& key) {
    std::vector<std::uint32_t> known;
    for (std::uint32_t i = 0; i < key.blocks.size(); ++i) {
      if (key.blocks[i]) known.push_back(i);
    }
    if (blocks > known.size()) {
      throw DomainError("dos: cannot corrupt more blocks than are known");
    }
    for (std::uint32_t i = 0; i < blocks; ++i) {
      std::uint32_t j =
          i + static_cast<std::uint32_t>(pick_rng.below(known.size() - i));
      std::swap(known[i], known[j]);
      key.blocks[known[i]]->flip_all();
    }
  };
  sim::AttackHooks hooks;
  if (plan.target == PartyRole::Verifier1) {
    hooks.corrupt_verifier1_key = corrupt;
  } else {
    hooks.corrupt_verifier2_key = corrupt;
  }
  sim::RunResult run = sim::run_protocol(config, message, seed, hooks);
  bool rejected = plan.target == PartyRole::Verifier1
                      ? (run.verifier1_report && !run.verifier1_accepted())
                      : (run.verifier2_report && !run.verifier2_accepted());
  return outcome_from_run(std::move(run), rejected);
}

namespace {

// Campaign state for repudiation trials: keys, message and the honest bundle
// are fixed once; the verdicts depend only on the per-trial permutations and
// error placement. OTP encryption is bitwise, so corrupting one key block
// changes exactly that block's digest; every per-label digest (honest and
// corrupted) is produced here by the ordinary pipeline primitives.
struct RepudiationCampaign {
  sim::ProtocolConfig config;
  HashSuiteConfig suite;
  std::uint32_t n = 0;
  SignatureBundle honest;
  std::vector<BitString> corrupted_k2_digest;  // per k_2 label

  RepudiationCampaign(const sim::ProtocolConfig& cfg,
                      std::vector<std::uint8_t> message, std::uint64_t seed)
      : config(cfg), suite(cfg.suite()), n(cfg.n_blocks) {
    config.validate();
    if (message.empty()) message = default_message(seed);
    QkdKey k1 = derive_link_key(seed, config, "link:alice-verifier1",
                                "alice-verifier1");
    QkdKey k2 = derive_link_key(seed, config, "link:alice-verifier2",
                                "alice-verifier2");
    BlockPartition p1 = partition(k1, n);
    BlockPartition p2 = partition(k2, n);
    CombinedKey ka = combine_keys(KeyHalf::full(p1), KeyHalf::full(p2));
    honest = sign(message, ka, suite);
    BitString h = message_digest(suite, message);
    std::uint32_t blk = suite.cipher_block_bits();
    corrupted_k2_digest.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      BitString corrupted = p2.blocks[i];
      corrupted.flip_all();
      BitString h_block =
          h.slice(static_cast<std::size_t>(n + i) * blk, blk);
      corrupted_k2_digest.push_back(
          block_digest(suite, otp_encrypt(corrupted, h_block)));
    }
  }

  AttackOutcome run_trial(const RepudiationPlan& plan,
                          std::uint64_t trial_seed) const {
    Permutation gamma_b =
        derive_permutation(trial_seed, "perm:verifier1", n);
    Permutation gamma_c =
        derive_permutation(trial_seed, "perm:verifier2", n);
    std::vector<std::uint32_t> labels =
        resolve_repudiation_labels(plan, n, trial_seed);

    SignatureBundle alice = honest;
    for (std::uint32_t label : labels) {
      alice.per_block_digests[n + label - 1] = corrupted_k2_digest[label - 1];
    }

    // A verifier's candidate matches the honest bundle wherever its own key
    // material is honest; unknown labels are absent.
    SignatureBundle bob_candidate = honest;
    std::vector<bool> bob_knows_k2 = verifier1_known_k2(gamma_c);
    for (std::uint32_t i = 0; i < n; ++i) {
      if (!bob_knows_k2[i]) {
        bob_candidate.per_block_digests[n + i] = std::nullopt;
      }
    }
    SignatureBundle charlie_candidate = honest;
    std::vector<bool> charlie_knows_k1 = verifier1_known_k2(gamma_b);
    for (std::uint32_t i = 0; i < n; ++i) {
      if (!charlie_knows_k1[i]) {
        charlie_candidate.per_block_digests[i] = std::nullopt;
      }
    }

    AttackOutcome outcome;
    VerificationReport bob = verify(alice, bob_candidate, config.v_b);
    outcome.verifier1_verdict = bob.verdict;
    if (!bob.accepted()) {
      outcome.aborted = true;
      return outcome;
    }
    VerificationReport charlie =
        verify(alice, charlie_candidate, config.v_c);
    outcome.verifier2_verdict = charlie.verdict;
    outcome.success = !charlie.accepted();
    return outcome;
  }
};

bool forgery_guess_trial(const sim::ProtocolConfig& config,
                         std::uint64_t trial_seed) {
  HashSuiteConfig suite = config.suite();
  std::uint32_t n = config.n_blocks;
  QkdKey k1 = derive_link_key(trial_seed, config, "link:alice-verifier1",
                              "alice-verifier1");
  QkdKey k2 = derive_link_key(trial_seed, config, "link:alice-verifier2",
                              "alice-verifier2");
  BlockPartition p1 = partition(k1, n);
  BlockPartition p2 = partition(k2, n);
  Permutation gamma_b = derive_permutation(trial_seed, "perm:verifier1", n);
  Permutation gamma_c = derive_permutation(trial_seed, "perm:verifier2", n);

  std::vector<std::uint8_t> message =
      tamper_deterministic(default_message(trial_seed));

  // Verifier 1 forges with its own key view plus uniform guesses.
  CombinedKey forge_key = combine_keys(
      KeyHalf::full(p1),
      KeyHalf::partial(n, p2.block_len_bits,
                       select_exchange_blocks(p2, gamma_c)));
  Rng guess_rng = Rng(trial_seed).derive("attack:forgery");
  for (auto& block : forge_key.blocks) {
    if (!block) block = guess_rng.bits(forge_key.block_len_bits);
  }
  SignatureBundle forged = sign(message, forge_key, suite);

  CombinedKey charlie_key = combine_keys(
      KeyHalf::partial(n, p1.block_len_bits,
                       select_exchange_blocks(p1, gamma_b)),
      KeyHalf::full(p2));
  SignatureBundle candidate = compute_candidate(message, charlie_key, suite);
  return verify(forged, candidate, config.v_c).accepted();
}

}  // namespace

AttackOutcome repudiation_trial(const RepudiationPlan& plan,
                                const sim::ProtocolConfig& config,
                                std::uint64_t trial_seed) {
  RepudiationCampaign campaign(config, {}, trial_seed);
  return campaign.run_trial(plan, trial_seed);
}

std::pair<double, double> wilson_interval(std::uint64_t successes,
                                          std::uint64_t trials) {
  if (trials == 0) return {0.0, 1.0};
  const double z = 1.959963984540054;  // 97.5th normal percentile
  double nt = static_cast<double>(trials);
  double p = static_cast<double>(successes) / nt;
  double z2 = z * z;
  double denom = 1.0 + z2 / nt;
  double center = (p + z2 / (2.0 * nt)) / denom;
  double half =
      z * std::sqrt(p * (1.0 - p) / nt + z2 / (4.0 * nt * nt)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

nlohmann::json MonteCarloResult::to_json(const nlohmann::json& params) const {
  return {{"kind", to_string(kind)}, {"params", params},
          {"trials", trials},       {"successes", successes},
          {"rate", rate},           {"ci_low", ci_low},
          {"ci_high", ci_high},     {"seed", seed}};
}

MonteCarloResult monte_carlo(AttackKind kind, const MonteCarloParams& params,
                             std::uint64_t trials, std::uint64_t seed) {
  if (trials < 1) throw DomainError("monte_carlo: trials must be >= 1");
  params.config.validate();
  Rng campaign_rng(seed);

  std::optional<RepudiationCampaign> campaign;
  if (kind == AttackKind::Repudiation) {
    campaign.emplace(params.config, params.message, seed);
  }

  auto trial_success = [&](std::uint64_t index) {
    std::uint64_t trial_seed = campaign_rng.derive(index).seed();
    switch (kind) {
      case AttackKind::Integrity:
        return integrity_attack(params.config, trial_seed).success;
      case AttackKind::ForgeryGuess:
        return forgery_guess_trial(params.config, trial_seed);
      case AttackKind::ForgeryReuse:
        return forgery_attack({.reuse_signature = true}, params.config,
                              trial_seed)
            .success;
      case AttackKind::Repudiation:
        return campaign->run_trial(params.repudiation, trial_seed).success;
      case AttackKind::Dos:
        return dos_scenario(params.dos, params.config, trial_seed).success;
    }
    return false;
  };

  unsigned worker_count = std::max(1u, std::thread::hardware_concurrency());
  worker_count = static_cast<unsigned>(
      std::min<std::uint64_t>(worker_count, trials));
  std::vector<std::uint64_t> counts(worker_count, 0);
  std::vector<std::thread> workers;
  workers.reserve(worker_count);
  for (unsigned w = 0; w < worker_count; ++w) {
    workers.emplace_back([&, w] {
      std::uint64_t local = 0;
      for (std::uint64_t i = w; i < trials; i += worker_count) {
        if (trial_success(i)) ++local;
      }
      counts[w] = local;
    });
  }
  for (auto& t : workers) t.join();

  MonteCarloResult result;
  result.kind = kind;
  result.trials = trials;
  result.successes = std::accumulate(counts.begin(), counts.end(),
                                     std::uint64_t{0});
  result.rate = static_cast<double>(result.successes) / trials;
  auto [lo, hi] = wilson_interval(result.successes, trials);
  result.ci_low = lo;
  result.ci_high = hi;
  result.seed = seed;
  return result;
}

}  // namespace qds::adversary
