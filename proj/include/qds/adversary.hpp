#ifndef QDS_ADVERSARY_HPP
#define QDS_ADVERSARY_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qds/protocol.hpp"

namespace qds::adversary {

enum class AttackKind : std::uint8_t {
  Integrity,
  ForgeryGuess,
  ForgeryReuse,
  Repudiation,
  Dos,
};

std::string to_string(AttackKind kind);
std::optional<AttackKind> parse_attack_kind(std::string_view name);

// Where the repudiating signer places its corrupted blocks within k_2.
struct RepudiationPlan {
  std::uint32_t error_block_count = 1;  // e
  enum class Placement {
    Random,         // uniform e-subset of the n labels
    OracleUnknown,  // all errors in labels verifier 1 does not know
    OracleHitKnown  // at least one error in a label verifier 1 knows
  };
  Placement placement = Placement::Random;
  // Explicit labels (1..n) override the placement strategy.
  std::optional<std::vector<std::uint32_t>> explicit_labels;
};

struct DosPlan {
  sim::PartyRole target = sim::PartyRole::Verifier1;
  std::uint32_t corrupt_blocks = 1;  // known blocks the target corrupts
};

struct ForgeryOptions {
  bool reuse_signature = false;      // replay S_a instead of forging
  bool oracle_correct_guess = false; // sanity path: guesses are the true key
};

struct AttackOutcome {
  std::optional<Verdict> verifier1_verdict;
  std::optional<Verdict> verifier2_verdict;
  bool aborted = false;
  bool success = false;
  sim::Transcript transcript;
};

// Verifier 1 verifies honestly, then forwards a tampered message with the
// original signature (random single- or multi-bit tampering).
AttackOutcome integrity_attack(const sim::ProtocolConfig& config,
                               std::uint64_t seed);

// Verifier 1 rebuilds a signature over a tampered message, filling its n/2
// unknown k_2 blocks with uniform guesses (or replaying S_a).
AttackOutcome forgery_attack(const ForgeryOptions& options,
                             const sim::ProtocolConfig& config,
                             std::uint64_t seed);

// The signer corrupts e blocks of k_2 before signing. Succeeds when
// verifier 1 accepts and verifier 2 rejects.
AttackOutcome repudiation_attack(const RepudiationPlan& plan,
                                 const sim::ProtocolConfig& config,
                                 std::uint64_t seed);

// A verifier corrupts its own key material, forcing rejection of an honest
// signature. Success means the rejection was forced.
AttackOutcome dos_scenario(const DosPlan& plan,
                           const sim::ProtocolConfig& config,
                           std::uint64_t seed);

struct MonteCarloParams {
  sim::ProtocolConfig config;
  RepudiationPlan repudiation;
  DosPlan dos;
  ForgeryOptions forgery;
  // Campaign message; empty means a fixed 32-byte message derived from the
  // campaign seed.
  std::vector<std::uint8_t> message;
};

struct MonteCarloResult {
  AttackKind kind = AttackKind::Integrity;
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  double rate = 0.0;
  double ci_low = 0.0;   // Wilson 95% interval
  double ci_high = 0.0;
  std::uint64_t seed = 0;

  nlohmann::json to_json(const nlohmann::json& params) const;
};

// Independent seeded trials of the named attack. Trials are derived from the
// campaign seed by index, so aggregation is order-independent and the
// campaign may be partitioned across threads.
MonteCarloResult monte_carlo(AttackKind kind, const MonteCarloParams& params,
                             std::uint64_t trials, std::uint64_t seed);

// Single repudiation trial evaluated without transport overhead; used by the
// Monte Carlo engine. Exposed so tests can pin it against full protocol runs
// seed for seed.
AttackOutcome repudiation_trial(const RepudiationPlan& plan,
                                const sim::ProtocolConfig& config,
                                std::uint64_t trial_seed);

// Wilson score interval for a binomial proportion at 95% confidence.
std::pair<double, double> wilson_interval(std::uint64_t successes,
                                          std::uint64_t trials);

}  // namespace qds::adversary

#endif  // QDS_ADVERSARY_HPP
